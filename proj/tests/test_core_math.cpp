#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dcglab/kernels.hpp"
#include "dcglab/softmax.hpp"
#include "oracles.hpp"

using namespace dcglab;

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
    const Matrix m = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
    EXPECT_EQ(matmul(Matrix::identity(3), m), m);
}

TEST(Matmul, HandComputedProduct) {
    const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    const Matrix b = Matrix::from_rows({{5}, {6}});
    EXPECT_EQ(matmul(a, b), Matrix::from_rows({{17}, {39}}));
}

TEST(Matmul, ZeroMatrix) {
    const Matrix m = Matrix::from_rows({{1, -2}, {3, 4}, {5, 6}});
    EXPECT_EQ(matmul(Matrix(4, 3), m), Matrix(4, 2));
}

TEST(Matmul, ShapeErrorNamesBothShapes) {
    try {
        (void)matmul(Matrix(2, 3), Matrix(2, 3));
        FAIL() << "expected ShapeError";
    } catch (const ShapeError& e) {
        EXPECT_NE(std::string(e.what()).find("(2x3)"), std::string::npos);
    }
}

TEST(Matmul, AssociativityOnRandomSmallMatrices) {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = oracle::random_matrix(4, 5, gen);
        const Matrix b = oracle::random_matrix(5, 3, gen);
        const Matrix c = oracle::random_matrix(3, 6, gen);
        const Matrix left = matmul(matmul(a, b), c);
        const Matrix right = matmul(a, matmul(b, c));
        for (std::size_t i = 0; i < left.size(); ++i) EXPECT_NEAR(left.data()[i], right.data()[i], 1e-4);
    }
}

TEST(Matmul, TransposedVariantsAgreeWithExplicitTranspose) {
    std::mt19937_64 gen(3);
    const Matrix a = oracle::random_matrix(5, 4, gen);
    const Matrix b = oracle::random_matrix(6, 4, gen);
    const Matrix c = oracle::random_matrix(5, 3, gen);
    EXPECT_EQ(matmul_transposed(a, b), matmul(a, b.transposed()));
    EXPECT_EQ(transposed_matmul(a, c), matmul(a.transposed(), c));
}

TEST(Normalize, HandComputedRow) {
    const Matrix out = l2_normalize_rows(Matrix::from_rows({{3, 4}}));
    EXPECT_NEAR(out(0, 0), 0.6F, 1e-7);
    EXPECT_NEAR(out(0, 1), 0.8F, 1e-7);
}

TEST(Normalize, UnitRowUnchangedAndZeroRowStaysZero) {
    const Matrix in = Matrix::from_rows({{0.6F, 0.8F}, {0.0F, 0.0F}});
    const Matrix out = l2_normalize_rows(in);
    EXPECT_NEAR(out(0, 0), 0.6F, 1e-6);
    EXPECT_NEAR(out(0, 1), 0.8F, 1e-6);
    EXPECT_EQ(out(1, 0), 0.0F);
    EXPECT_EQ(out(1, 1), 0.0F);
    EXPECT_TRUE(all_finite(out));
}

TEST(Normalize, RandomRowsHaveUnitNorm) {
    std::mt19937_64 gen(5);
    const Matrix out = l2_normalize_rows(oracle::random_matrix(30, 17, gen, 10.0));
    for (std::size_t i = 0; i < out.rows(); ++i) {
        double sq = 0.0;
        for (const float v : out.row(i)) sq += static_cast<double>(v) * v;
        EXPECT_NEAR(std::sqrt(sq), 1.0, 1e-6);
    }
}

TEST(Cosine, HandComputedAndOrthogonal) {
    const Matrix s = cosine_similarity_matrix(Matrix::from_rows({{1, 0}}), Matrix::from_rows({{1, 1}, {0, 5}}));
    EXPECT_NEAR(s(0, 0), 1.0 / std::sqrt(2.0), 1e-6);
    EXPECT_NEAR(s(0, 1), 0.0, 1e-6);
}

TEST(Cosine, SelfSimilarityIsSymmetricWithUnitDiagonal) {
    std::mt19937_64 gen(8);
    const Matrix u = oracle::random_matrix(12, 7, gen);
    const Matrix s = cosine_similarity_matrix(u, u);
    for (std::size_t i = 0; i < s.rows(); ++i) {
        EXPECT_NEAR(s(i, i), 1.0, 1e-6);
        for (std::size_t j = 0; j < s.cols(); ++j) {
            EXPECT_NEAR(s(i, j), s(j, i), 1e-6);
            EXPECT_LE(s(i, j), 1.0 + 1e-6);
            EXPECT_GE(s(i, j), -1.0 - 1e-6);
        }
    }
}

TEST(Cosine, ShapeMismatch) {
    EXPECT_THROW((void)cosine_similarity_matrix(Matrix(2, 3), Matrix(2, 4)), ShapeError);
}

TEST(SoftmaxCrossEntropy, SingleClassIsZero) {
    for (const double x : {-5.0, 0.0, 3.5}) {
        EXPECT_DOUBLE_EQ(softmax_cross_entropy_rows(MatrixD(1, 1, x)).loss, 0.0);
    }
}

TEST(SoftmaxCrossEntropy, IdentityLogits) {
    EXPECT_NEAR(softmax_cross_entropy_rows(MatrixD::identity(2)).loss, 0.31326168751822286, 1e-12);
}

TEST(SoftmaxCrossEntropy, ScaledIdentityDecreasesMonotonically) {
    double prev = std::numeric_limits<double>::infinity();
    for (const double c : {1.0, 2.0, 5.0, 10.0, 50.0, 200.0}) {
        MatrixD logits = MatrixD::identity(4);
        for (double& v : logits.data()) v *= c;
        const double loss = softmax_cross_entropy_rows(logits).loss;
        EXPECT_LT(loss, prev);
        prev = loss;
    }
    EXPECT_LT(prev, 1e-60);
}

TEST(SoftmaxCrossEntropy, NonSquareRejected) {
    EXPECT_THROW((void)softmax_cross_entropy_rows(MatrixD(2, 3)), ShapeError);
}

TEST(SoftmaxCrossEntropy, FloatOverloadMatchesDouble) {
    const Matrix logits = Matrix::from_rows({{1, 2}, {0.5F, -1}});
    EXPECT_DOUBLE_EQ(softmax_cross_entropy_rows(logits).loss, softmax_cross_entropy_rows(logits.cast<double>()).loss);
}

TEST(SoftmaxCrossEntropy, RowsSumToOneAndShiftInvariant) {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 20; ++trial) {
        const MatrixD logits = oracle::random_matrix(6, 6, gen, 5.0).cast<double>();
        const MatrixD p = softmax_rows(logits);
        MatrixD shifted = logits;
        for (std::size_t j = 0; j < 6; ++j) shifted(2, j) += 123.25;
        const MatrixD ps = softmax_rows(shifted);
        for (std::size_t i = 0; i < 6; ++i) {
            double total = 0.0;
            for (const double v : p.row(i)) total += v;
            EXPECT_NEAR(total, 1.0, 1e-6);
            for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(p(i, j), ps(i, j), 1e-6);
        }
    }
}

TEST(SoftmaxCrossEntropy, GradientMatchesFiniteDifferences) {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 5);
        const MatrixD logits = oracle::random_matrix(n, n, gen, 2.0).cast<double>();
        const auto analytic = softmax_cross_entropy_rows(logits);
        const std::vector<double> x(logits.data().begin(), logits.data().end());
        const auto fd = oracle::central_differences(x, [&](const std::vector<double>& v) {
            return oracle::cross_entropy_rows64(MatrixD(n, n, v));
        });
        const std::vector<double> g(analytic.grad_logits.data().begin(), analytic.grad_logits.data().end());
        EXPECT_LT(oracle::relative_error(g, fd), 1e-4);
        EXPECT_NEAR(analytic.loss, oracle::cross_entropy_rows64(logits), 1e-12);
    }
}
