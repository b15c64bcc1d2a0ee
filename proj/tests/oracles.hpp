#pragma once

// Independent reference implementations used only by tests. Nothing here
// calls into the library's numeric code paths.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "dcglab/matrix.hpp"

namespace dcglab::oracle {

/// Plain 64-bit symmetric contrastive loss. Weights are row-major d_in x d_out.
inline double clip_loss64(const std::vector<double>& w_img, const std::vector<double>& w_txt, double log_scale,
                          const MatrixD& x, const MatrixD& y, std::size_t d_out) {
    const std::size_t b = x.rows();
    auto project = [&](const MatrixD& in, const std::vector<double>& w) {
        std::vector<std::vector<double>> out(b, std::vector<double>(d_out, 0.0));
        for (std::size_t i = 0; i < b; ++i) {
            for (std::size_t o = 0; o < d_out; ++o) {
                double acc = 0.0;
                for (std::size_t k = 0; k < in.cols(); ++k) acc += in(i, k) * w[k * d_out + o];
                out[i][o] = acc;
            }
            double norm = 0.0;
            for (const double v : out[i]) norm += v * v;
            norm = std::max(std::sqrt(norm), 1e-12);
            for (double& v : out[i]) v /= norm;
        }
        return out;
    };
    const auto u = project(x, w_img);
    const auto v = project(y, w_txt);
    const double s = std::min(std::exp(log_scale), 100.0);
    std::vector<std::vector<double>> logits(b, std::vector<double>(b));
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < b; ++j) {
            double acc = 0.0;
            for (std::size_t o = 0; o < d_out; ++o) acc += u[i][o] * v[j][o];
            logits[i][j] = s * acc;
        }
    double rows = 0.0;
    double cols = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        double mr = -1e300;
        double mc = -1e300;
        for (std::size_t j = 0; j < b; ++j) {
            mr = std::max(mr, logits[i][j]);
            mc = std::max(mc, logits[j][i]);
        }
        double zr = 0.0;
        double zc = 0.0;
        for (std::size_t j = 0; j < b; ++j) {
            zr += std::exp(logits[i][j] - mr);
            zc += std::exp(logits[j][i] - mc);
        }
        rows += mr + std::log(zr) - logits[i][i];
        cols += mc + std::log(zc) - logits[i][i];
    }
    return 0.5 * (rows + cols) / static_cast<double>(b);
}

/// Mean over rows of -log softmax(row)[i], 64-bit, no stabilisation tricks beyond max-shift.
inline double cross_entropy_rows64(const MatrixD& logits) {
    double total = 0.0;
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        double mx = -1e300;
        for (std::size_t j = 0; j < logits.cols(); ++j) mx = std::max(mx, logits(i, j));
        double z = 0.0;
        for (std::size_t j = 0; j < logits.cols(); ++j) z += std::exp(logits(i, j) - mx);
        total += mx + std::log(z) - logits(i, i);
    }
    return total / static_cast<double>(logits.rows());
}

/// Central finite differences of f over every coordinate of x.
template <typename F>
std::vector<double> central_differences(std::vector<double> x, F&& f, double h = 1e-4) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double saved = x[i];
        x[i] = saved + h;
        const double up = f(x);
        x[i] = saved - h;
        const double down = f(x);
        x[i] = saved;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

/// ||a - b|| / max(||a||, ||b||, floor)
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b, double floor = 1e-12) {
    double diff = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), floor});
}

/// Ranks every candidate by full sort on (similarity desc, index asc) and
/// returns the 0-based position of `target`.
inline std::size_t sorted_rank(const std::vector<float>& row, std::size_t target) {
    std::vector<std::size_t> order(row.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (row[a] != row[b]) return row[a] > row[b];
        return a < b;
    });
    return static_cast<std::size_t>(std::find(order.begin(), order.end(), target) - order.begin());
}

inline std::vector<double> recall(const Matrix& sim, const std::vector<std::size_t>& ks) {
    std::vector<double> out;
    for (const std::size_t k : ks) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < sim.rows(); ++i) {
            const auto r = sim.row(i);
            if (sorted_rank(std::vector<float>(r.begin(), r.end()), i) < k) ++hits;
        }
        out.push_back(static_cast<double>(hits) / static_cast<double>(sim.rows()));
    }
    return out;
}

inline double gap(const Matrix& sim) {
    double total = 0.0;
    for (std::size_t i = 0; i < sim.rows(); ++i) {
        double others = 0.0;
        for (std::size_t j = 0; j < sim.cols(); ++j) {
            if (j != i) others += static_cast<double>(sim(i, j));
        }
        total += static_cast<double>(sim(i, i)) - others / static_cast<double>(sim.cols() - 1);
    }
    return total / static_cast<double>(sim.rows());
}

/// Full stable sort of candidate positions by descending similarity.
inline std::vector<std::size_t> topk(const std::vector<float>& sims, std::size_t k) {
    std::vector<std::size_t> order(sims.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sims[a] > sims[b]; });
    order.resize(k);
    return order;
}

/// Scalar Adam with a constant gradient, written out step by step.
inline std::vector<double> adam_constant_gradient(double w, double g, std::size_t steps, double lr,
                                                  double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) {
    std::vector<double> out;
    double m = 0.0;
    double v = 0.0;
    double b1t = 1.0;
    double b2t = 1.0;
    for (std::size_t t = 0; t < steps; ++t) {
        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g * g;
        b1t *= beta1;
        b2t *= beta2;
        w -= lr * (m / (1.0 - b1t)) / (std::sqrt(v / (1.0 - b2t)) + eps);
        out.push_back(w);
    }
    return out;
}

/// Cyclic Jacobi eigenvalues of a symmetric matrix, sorted descending.
inline std::vector<double> jacobi_eigenvalues(MatrixD a) {
    const std::size_t n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end(), std::greater<>());
    return eig;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& gen, double scale = 1.0) {
    std::normal_distribution<double> dist(0.0, scale);
    Matrix m(rows, cols);
    for (float& v : m.data()) v = static_cast<float>(dist(gen));
    return m;
}

}  // namespace dcglab::oracle
