#include "dcglab/kernels.hpp"

#include "kernel_checks.hpp"

namespace dcglab::kernels::serial {

template <typename T>
DenseMatrix<T> matmul(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    detail::require_inner(a, b, a.cols(), b.rows(), "matmul");
    DenseMatrix<T> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                acc += static_cast<double>(a(i, k)) * static_cast<double>(b(k, j));
            }
            c(i, j) = static_cast<T>(acc);
        }
    }
    return c;
}

template <typename T>
DenseMatrix<T> matmul_transposed(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    detail::require_inner(a, b, a.cols(), b.cols(), "matmul_transposed");
    DenseMatrix<T> c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.rows(); ++j) c(i, j) = static_cast<T>(detail::dot(a.row(i), b.row(j)));
    }
    return c;
}

template <typename T>
DenseMatrix<T> transposed_matmul(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    detail::require_inner(a, b, a.rows(), b.rows(), "transposed_matmul");
    DenseMatrix<T> c(a.cols(), b.cols());
    for (std::size_t i = 0; i < a.cols(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.rows(); ++k) {
                acc += static_cast<double>(a(k, i)) * static_cast<double>(b(k, j));
            }
            c(i, j) = static_cast<T>(acc);
        }
    }
    return c;
}

template <typename T>
DenseMatrix<T> l2_normalize_rows(const DenseMatrix<T>& m) {
    DenseMatrix<T> out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) detail::normalize_row(m.row(i), out.row(i));
    return out;
}

template <typename T>
DenseMatrix<T> cosine_similarity_matrix(const DenseMatrix<T>& u, const DenseMatrix<T>& v) {
    detail::require_inner(u, v, u.cols(), v.cols(), "cosine_similarity_matrix");
    return serial::matmul_transposed(serial::l2_normalize_rows(u), serial::l2_normalize_rows(v));
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

}  // namespace dcglab::kernels::serial
