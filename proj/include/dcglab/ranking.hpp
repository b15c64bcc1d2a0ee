#pragma once

#include <span>
#include <vector>

#include "dcglab/matrix.hpp"

// Streaming per-query kernels over one retrieval population. Query i is
// queries.row(positions[i]); its candidates are candidates.row(positions[j])
// for every j, and the true match is j == i. Similarities are dot products
// of (already normalised) rows accumulated in double and stored as float,
// which is exactly what cosine_similarity_matrix produces for unit rows.
namespace dcglab {

/// 0-based rank of entry `target` within `row`: strictly greater entries
/// rank ahead, and ties are broken by lower index.
[[nodiscard]] std::size_t rank_of(std::span<const float> row, std::size_t target);

namespace ranking::serial {
[[nodiscard]] std::vector<std::size_t> diagonal_ranks(const Matrix& queries, const Matrix& candidates,
                                                      std::span<const std::size_t> positions);
/// S[i][i] - mean_{j != i} S[i][j] per query; needs at least 2 positions.
[[nodiscard]] std::vector<double> row_gaps(const Matrix& queries, const Matrix& candidates,
                                           std::span<const std::size_t> positions);
}  // namespace ranking::serial

namespace ranking::omp {
[[nodiscard]] std::vector<std::size_t> diagonal_ranks(const Matrix& queries, const Matrix& candidates,
                                                      std::span<const std::size_t> positions);
[[nodiscard]] std::vector<double> row_gaps(const Matrix& queries, const Matrix& candidates,
                                           std::span<const std::size_t> positions);
}  // namespace ranking::omp

}  // namespace dcglab
