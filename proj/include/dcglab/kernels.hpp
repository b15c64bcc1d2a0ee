#pragma once

#include "dcglab/matrix.hpp"

// Dense kernels. Every kernel has a serial reference in `kernels::serial`
// and an OpenMP version in `kernels::omp`. Each output element is reduced
// by exactly one thread in a fixed order, so both paths return bit-identical
// results for any thread count. Reductions accumulate in double.
namespace dcglab {

inline constexpr double kNormEpsilon = 1e-12;

namespace kernels::serial {

/// a · b
template <typename T>
DenseMatrix<T> matmul(const DenseMatrix<T>& a, const DenseMatrix<T>& b);
/// a · bᵀ
template <typename T>
DenseMatrix<T> matmul_transposed(const DenseMatrix<T>& a, const DenseMatrix<T>& b);
/// aᵀ · b
template <typename T>
DenseMatrix<T> transposed_matmul(const DenseMatrix<T>& a, const DenseMatrix<T>& b);
template <typename T>
DenseMatrix<T> l2_normalize_rows(const DenseMatrix<T>& m);
template <typename T>
DenseMatrix<T> cosine_similarity_matrix(const DenseMatrix<T>& u, const DenseMatrix<T>& v);

}  // namespace kernels::serial

namespace kernels::omp {

template <typename T>
DenseMatrix<T> matmul(const DenseMatrix<T>& a, const DenseMatrix<T>& b);
template <typename T>
DenseMatrix<T> matmul_transposed(const DenseMatrix<T>& a, const DenseMatrix<T>& b);
template <typename T>
DenseMatrix<T> transposed_matmul(const DenseMatrix<T>& a, const DenseMatrix<T>& b);
template <typename T>
DenseMatrix<T> l2_normalize_rows(const DenseMatrix<T>& m);
template <typename T>
DenseMatrix<T> cosine_similarity_matrix(const DenseMatrix<T>& u, const DenseMatrix<T>& v);

}  // namespace kernels::omp

// Library entry points route to the OpenMP kernels.
template <typename T>
DenseMatrix<T> matmul(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    return kernels::omp::matmul(a, b);
}
template <typename T>
DenseMatrix<T> matmul_transposed(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    return kernels::omp::matmul_transposed(a, b);
}
template <typename T>
DenseMatrix<T> transposed_matmul(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    return kernels::omp::transposed_matmul(a, b);
}
template <typename T>
DenseMatrix<T> l2_normalize_rows(const DenseMatrix<T>& m) {
    return kernels::omp::l2_normalize_rows(m);
}
template <typename T>
DenseMatrix<T> cosine_similarity_matrix(const DenseMatrix<T>& u, const DenseMatrix<T>& v) {
    return kernels::omp::cosine_similarity_matrix(u, v);
}

/// Caps the number of OpenMP threads used by the kernels (n >= 1).
void set_num_threads(int n);
[[nodiscard]] int num_threads();

}  // namespace dcglab
