#include "dcglab/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdint>

#include "kernel_checks.hpp"

namespace dcglab {

void set_num_threads(int n) {
    if (n < 1) throw ArgumentError("thread count must be >= 1, got " + std::to_string(n));
    omp_set_num_threads(n);
}

int num_threads() { return omp_get_max_threads(); }

namespace kernels::omp {

// Signed loop indices keep the pragmas portable to OpenMP 2.x compilers.
using index_t = std::int64_t;

template <typename T>
DenseMatrix<T> matmul(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    detail::require_inner(a, b, a.cols(), b.rows(), "matmul");
    // bᵀ gives contiguous access; the k-order of every dot product is unchanged.
    const DenseMatrix<T> bt = b.transposed();
    DenseMatrix<T> c(a.rows(), b.cols());
    const auto rows = static_cast<index_t>(a.rows());
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < rows; ++i) {
        const auto ar = a.row(static_cast<std::size_t>(i));
        auto cr = c.row(static_cast<std::size_t>(i));
        for (std::size_t j = 0; j < bt.rows(); ++j) cr[j] = static_cast<T>(detail::dot(ar, bt.row(j)));
    }
    return c;
}

template <typename T>
DenseMatrix<T> matmul_transposed(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    detail::require_inner(a, b, a.cols(), b.cols(), "matmul_transposed");
    DenseMatrix<T> c(a.rows(), b.rows());
    const auto rows = static_cast<index_t>(a.rows());
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < rows; ++i) {
        const auto ar = a.row(static_cast<std::size_t>(i));
        auto cr = c.row(static_cast<std::size_t>(i));
        for (std::size_t j = 0; j < b.rows(); ++j) cr[j] = static_cast<T>(detail::dot(ar, b.row(j)));
    }
    return c;
}

template <typename T>
DenseMatrix<T> transposed_matmul(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    detail::require_inner(a, b, a.rows(), b.rows(), "transposed_matmul");
    const DenseMatrix<T> at = a.transposed();
    const DenseMatrix<T> bt = b.transposed();
    DenseMatrix<T> c(a.cols(), b.cols());
    const auto rows = static_cast<index_t>(at.rows());
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < rows; ++i) {
        const auto ar = at.row(static_cast<std::size_t>(i));
        auto cr = c.row(static_cast<std::size_t>(i));
        for (std::size_t j = 0; j < bt.rows(); ++j) cr[j] = static_cast<T>(detail::dot(ar, bt.row(j)));
    }
    return c;
}

template <typename T>
DenseMatrix<T> l2_normalize_rows(const DenseMatrix<T>& m) {
    DenseMatrix<T> out(m.rows(), m.cols());
    const auto rows = static_cast<index_t>(m.rows());
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < rows; ++i) {
        detail::normalize_row(m.row(static_cast<std::size_t>(i)), out.row(static_cast<std::size_t>(i)));
    }
    return out;
}

template <typename T>
DenseMatrix<T> cosine_similarity_matrix(const DenseMatrix<T>& u, const DenseMatrix<T>& v) {
    detail::require_inner(u, v, u.cols(), v.cols(), "cosine_similarity_matrix");
    return omp::matmul_transposed(omp::l2_normalize_rows(u), omp::l2_normalize_rows(v));
}

#define DCGLAB_INSTANTIATE(T)                                                                 \
    template DenseMatrix<T> matmul(const DenseMatrix<T>&, const DenseMatrix<T>&);             \
    template DenseMatrix<T> matmul_transposed(const DenseMatrix<T>&, const DenseMatrix<T>&);  \
    template DenseMatrix<T> transposed_matmul(const DenseMatrix<T>&, const DenseMatrix<T>&);  \
    template DenseMatrix<T> l2_normalize_rows(const DenseMatrix<T>&);                         \
    template DenseMatrix<T> cosine_similarity_matrix(const DenseMatrix<T>&, const DenseMatrix<T>&);

DCGLAB_INSTANTIATE(float)
DCGLAB_INSTANTIATE(double)

#undef DCGLAB_INSTANTIATE

}  // namespace kernels::omp
}  // namespace dcglab
