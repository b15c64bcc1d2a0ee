#pragma once

#include <cmath>
#include <span>

#include "dcglab/kernels.hpp"

namespace dcglab::kernels::detail {

template <typename T>
void require_inner(const DenseMatrix<T>& a, const DenseMatrix<T>& b, std::size_t a_dim, std::size_t b_dim,
                   const char* op) {
    if (a_dim != b_dim) {
        throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " + b.shape_string());
    }
}

template <typename T>
double dot(std::span<const T> x, std::span<const T> y) {
    double acc = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) acc += static_cast<double>(x[k]) * static_cast<double>(y[k]);
    return acc;
}

template <typename T>
void normalize_row(std::span<const T> in, std::span<T> out) {
    const double norm = std::max(std::sqrt(dot(in, in)), kNormEpsilon);
    for (std::size_t k = 0; k < in.size(); ++k) out[k] = static_cast<T>(static_cast<double>(in[k]) / norm);
}

}  // namespace dcglab::kernels::detail
