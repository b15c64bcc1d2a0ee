#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "dcglab/viz.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace dcglab;
using dcglab::testing::TempDir;

namespace {

double column_variance(const Matrix& m, std::size_t c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) mean += m(i, c);
    mean /= static_cast<double>(m.rows());
    double var = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) var += (m(i, c) - mean) * (m(i, c) - mean);
    return var / static_cast<double>(m.rows() - 1);
}

MatrixD sample_covariance(const Matrix& m) {
    const std::size_t n = m.rows();
    const std::size_t d = m.cols();
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) mean[c] += m(i, c);
    for (double& v : mean) v /= static_cast<double>(n);
    MatrixD cov(d, d);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += (m(i, a) - mean[a]) * (m(i, b) - mean[b]);
            cov(a, b) = acc / static_cast<double>(n - 1);
        }
    }
    return cov;
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

}  // namespace

TEST(Pca, DiagonalCovarianceIsIdentityUpToSign) {
    // Centered, covariance diag(4, 1).
    const Matrix m = Matrix::from_rows({{2, 1}, {-2, 1}, {2, -1}, {-2, -1}});
    const auto fit = pca_fit_2d(m);
    EXPECT_NEAR(fit.variances[0], 16.0 / 3.0, 1e-12);
    EXPECT_NEAR(fit.variances[1], 4.0 / 3.0, 1e-12);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(std::abs(fit.coords(i, 0)), 2.0F, 1e-6F);
        EXPECT_NEAR(std::abs(fit.coords(i, 1)), 1.0F, 1e-6F);
        EXPECT_NEAR(fit.coords(i, 0), m(i, 0), 1e-6F);  // positive loading keeps the sign
        EXPECT_NEAR(fit.coords(i, 1), m(i, 1), 1e-6F);
    }
}

TEST(Pca, RankOneHasZeroSecondComponent) {
    Matrix m(20, 5);
    for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t c = 0; c < 5; ++c) m(i, c) = static_cast<float>(i) * static_cast<float>(c + 1) * 0.1F;
    const Matrix coords = pca_2d(m);
    for (std::size_t i = 0; i < 20; ++i) EXPECT_NEAR(coords(i, 1), 0.0F, 1e-6F);
}

TEST(Pca, VariancesMatchIndependentEigensolver) {
    std::mt19937_64 gen(3);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t d = 2 + gen() % 8;
        const Matrix m = oracle::random_matrix(30 + gen() % 40, d, gen, 1.0 + rep % 3);
        const auto fit = pca_fit_2d(m);
        const auto eig = oracle::jacobi_eigenvalues(sample_covariance(m));
        EXPECT_NEAR(fit.variances[0], eig[0], 1e-6 * eig[0]);
        EXPECT_NEAR(fit.variances[1], eig[1], 1e-6 * eig[0]);
        EXPECT_GE(fit.variances[0], fit.variances[1]);
        // Projected variances are the eigenvalues.
        EXPECT_NEAR(column_variance(fit.coords, 0), eig[0], 1e-5 * eig[0]);
        EXPECT_NEAR(column_variance(fit.coords, 1), eig[1], 1e-5 * eig[0]);
        double total = 0.0;
        for (std::size_t c = 0; c < d; ++c) total += column_variance(m, c);
        EXPECT_LE(column_variance(fit.coords, 0) + column_variance(fit.coords, 1), total * (1 + 1e-6));
        // Sign convention on the loadings.
        for (std::size_t c = 0; c < 2; ++c) {
            double best = 0.0;
            for (std::size_t r = 0; r < d; ++r) {
                if (std::abs(fit.components(r, c)) > std::abs(best)) best = fit.components(r, c);
            }
            EXPECT_GT(best, 0.0);
        }
    }
}

TEST(Pca, TranslationInvariant) {
    std::mt19937_64 gen(4);
    const Matrix m = oracle::random_matrix(50, 6, gen);
    Matrix shifted = m;
    const float shift[6] = {0.5F, -1.25F, 3.0F, 0.0F, -0.75F, 2.0F};
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t c = 0; c < 6; ++c) shifted(i, c) += shift[c];
    const Matrix a = pca_2d(m);
    const Matrix b = pca_2d(shifted);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.data()[i], b.data()[i], 1e-6F);
}

TEST(Pca, Errors) {
    EXPECT_THROW((void)pca_2d(Matrix(1, 3)), ArgumentError);
    EXPECT_THROW((void)pca_2d(Matrix(0, 3)), ArgumentError);
}

TEST(Scatter, OneGroupWritesOneRowPerPoint) {
    TempDir dir;
    std::mt19937_64 gen(5);
    const std::vector<ScatterGroup> groups{{"image", oracle::random_matrix(12, 4, gen), {}}};
    const auto rows = export_scatter(groups, dir / "s.csv");
    const auto lines = read_lines(dir / "s.csv");
    ASSERT_EQ(lines.size(), 13U);
    EXPECT_EQ(lines[0], "x,y,group,id");
    EXPECT_EQ(rows.size(), 12U);
    EXPECT_EQ(rows[3].id, "image-3");
    for (const auto& r : rows) EXPECT_TRUE(std::isfinite(r.x) && std::isfinite(r.y));
}

TEST(Scatter, SeparatedGroupsSeparateAlongFirstComponent) {
    TempDir dir;
    std::mt19937_64 gen(6);
    Matrix a = oracle::random_matrix(100, 8, gen);
    Matrix b = oracle::random_matrix(100, 8, gen);
    for (std::size_t i = 0; i < 100; ++i) b(i, 2) += 10.0F;
    const std::vector<ScatterGroup> groups{{"descriptive-text", a, {}}, {"commentative-text", b, {}}};
    const auto rows = export_scatter(groups, dir / "s.csv");
    double ca = 0.0;
    double cb = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
        ca += rows[i].x;
        cb += rows[100 + i].x;
    }
    ca /= 100.0;
    cb /= 100.0;
    double var = 0.0;
    for (std::size_t i = 0; i < 100; ++i) var += (rows[i].x - ca) * (rows[i].x - ca);
    const double sd = std::sqrt(var / 100.0);
    EXPECT_GT(std::abs(ca - cb), 3.0 * sd);
}

TEST(Scatter, CsvQuotingAndIds) {
    TempDir dir;
    const std::vector<ScatterGroup> groups{
        {"a,b", Matrix::from_rows({{0, 1}, {1, 0}}), {"x\"1", "plain"}}};
    (void)export_scatter(groups, dir / "q.csv");
    const auto lines = read_lines(dir / "q.csv");
    ASSERT_EQ(lines.size(), 3U);
    EXPECT_NE(lines[1].find(",\"a,b\",\"x\"\"1\""), std::string::npos) << lines[1];
}

TEST(Scatter, Errors) {
    TempDir dir;
    EXPECT_THROW((void)export_scatter(std::vector<ScatterGroup>{}, dir / "e.csv"), ArgumentError);
    const std::vector<ScatterGroup> mismatch{{"a", Matrix(3, 2), {}}, {"b", Matrix(3, 3), {}}};
    EXPECT_THROW((void)export_scatter(mismatch, dir / "e.csv"), ShapeError);
}
