#include "dcglab/softmax.hpp"

#include <algorithm>
#include <cmath>

namespace dcglab {

MatrixD softmax_rows(const MatrixD& logits) {
    MatrixD out(logits.rows(), logits.cols());
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        const auto in = logits.row(i);
        auto row = out.row(i);
        if (in.empty()) continue;
        const double mx = *std::max_element(in.begin(), in.end());
        double total = 0.0;
        for (std::size_t j = 0; j < in.size(); ++j) {
            row[j] = std::exp(in[j] - mx);
            total += row[j];
        }
        for (double& v : row) v /= total;
    }
    return out;
}

CrossEntropyResult softmax_cross_entropy_rows(const MatrixD& logits) {
    if (logits.rows() != logits.cols() || logits.rows() == 0) {
        throw ShapeError("softmax_cross_entropy_rows: expected non-empty square logits, got " +
                         logits.shape_string());
    }
    const std::size_t n = logits.rows();
    CrossEntropyResult result;
    result.grad_logits = MatrixD(n, n);
    const double inv_n = 1.0 / static_cast<double>(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto in = logits.row(i);
        const double mx = *std::max_element(in.begin(), in.end());
        // Off-target mass kept separate so a confident row keeps its tiny loss.
        double others = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) others += std::exp(in[j] - mx);
        }
        const double target = std::exp(in[i] - mx);
        const double sum_exp = others + target;
        total += in[i] == mx ? std::log1p(others) : std::log(sum_exp) - (in[i] - mx);
        auto g = result.grad_logits.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            g[j] = std::exp(in[j] - mx) / sum_exp * inv_n;
        }
        g[i] = -others / sum_exp * inv_n;
    }
    result.loss = total * inv_n;
    return result;
}

CrossEntropyResult softmax_cross_entropy_rows(const Matrix& logits) {
    return softmax_cross_entropy_rows(logits.cast<double>());
}

}  // namespace dcglab
