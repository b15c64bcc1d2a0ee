#pragma once

#include "dcglab/matrix.hpp"

namespace dcglab {

struct CrossEntropyResult {
    double loss = 0.0;
    MatrixD grad_logits;
};

/// Row-wise softmax, stabilised by subtracting each row's maximum.
[[nodiscard]] MatrixD softmax_rows(const MatrixD& logits);

/// Mean over rows of -log softmax(row)[row index] (the target of row i is
/// column i), together with d loss / d logits. Logits must be square.
[[nodiscard]] CrossEntropyResult softmax_cross_entropy_rows(const MatrixD& logits);
[[nodiscard]] CrossEntropyResult softmax_cross_entropy_rows(const Matrix& logits);

}  // namespace dcglab
