#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "dcglab/kernels.hpp"
#include "dcglab/ranking.hpp"
#include "oracles.hpp"

using namespace dcglab;

namespace {

class ThreadCount : public ::testing::TestWithParam<int> {
protected:
    void SetUp() override { set_num_threads(GetParam()); }
    void TearDown() override { set_num_threads(1); }
};

}  // namespace

TEST_P(ThreadCount, DenseKernelsMatchSerialBitForBit) {
    std::mt19937_64 gen(static_cast<std::uint64_t>(GetParam()));
    const Matrix a = oracle::random_matrix(37, 23, gen);
    const Matrix b = oracle::random_matrix(23, 19, gen);
    const Matrix c = oracle::random_matrix(41, 23, gen);
    const Matrix d = oracle::random_matrix(37, 11, gen);
    EXPECT_EQ(kernels::omp::matmul(a, b), kernels::serial::matmul(a, b));
    EXPECT_EQ(kernels::omp::matmul_transposed(a, c), kernels::serial::matmul_transposed(a, c));
    EXPECT_EQ(kernels::omp::transposed_matmul(a, d), kernels::serial::transposed_matmul(a, d));
    EXPECT_EQ(kernels::omp::l2_normalize_rows(c), kernels::serial::l2_normalize_rows(c));
    EXPECT_EQ(kernels::omp::cosine_similarity_matrix(a, c), kernels::serial::cosine_similarity_matrix(a, c));

    const MatrixD ad = a.cast<double>();
    const MatrixD bd = b.cast<double>();
    EXPECT_EQ(kernels::omp::matmul(ad, bd), kernels::serial::matmul(ad, bd));
}

TEST_P(ThreadCount, RankingKernelsMatchSerial) {
    std::mt19937_64 gen(100 + static_cast<std::uint64_t>(GetParam()));
    const Matrix q = l2_normalize_rows(oracle::random_matrix(300, 8, gen));
    const Matrix c = l2_normalize_rows(oracle::random_matrix(300, 8, gen));
    std::vector<std::size_t> positions(150);
    std::iota(positions.begin(), positions.end(), std::size_t{75});
    EXPECT_EQ(ranking::omp::diagonal_ranks(q, c, positions), ranking::serial::diagonal_ranks(q, c, positions));
    EXPECT_EQ(ranking::omp::row_gaps(q, c, positions), ranking::serial::row_gaps(q, c, positions));
}

INSTANTIATE_TEST_SUITE_P(Threads, ThreadCount, ::testing::Values(1, 2, 3, 8));

TEST(Threads, RejectsNonPositiveCount) { EXPECT_THROW(set_num_threads(0), ArgumentError); }

TEST(Ranking, StreamedRanksAgreeWithSimilarityMatrix) {
    std::mt19937_64 gen(4);
    const Matrix q = l2_normalize_rows(oracle::random_matrix(20, 5, gen));
    const Matrix c = l2_normalize_rows(oracle::random_matrix(20, 5, gen));
    std::vector<std::size_t> positions(20);
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    const Matrix sim = matmul_transposed(q, c);
    const auto ranks = ranking::serial::diagonal_ranks(q, c, positions);
    for (std::size_t i = 0; i < 20; ++i) {
        const auto row = sim.row(i);
        EXPECT_EQ(ranks[i], oracle::sorted_rank(std::vector<float>(row.begin(), row.end()), i));
    }
}

TEST(Ranking, OutOfRangePositionRejected) {
    const Matrix q(3, 2, 1.0F);
    const std::vector<std::size_t> positions{0, 3};
    EXPECT_THROW((void)ranking::serial::diagonal_ranks(q, q, positions), ArgumentError);
}
