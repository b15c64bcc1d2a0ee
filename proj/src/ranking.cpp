#include "dcglab/ranking.hpp"

#include <cstdint>

#include "kernel_checks.hpp"

namespace dcglab {

std::size_t rank_of(std::span<const float> row, std::size_t target) {
    const float t = row[target];
    std::size_t rank = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j] > t || (row[j] == t && j < target)) ++rank;
    }
    return rank;
}

namespace {

void check_inputs(const Matrix& queries, const Matrix& candidates, std::span<const std::size_t> positions) {
    if (queries.cols() != candidates.cols()) {
        throw ShapeError("ranking: query " + queries.shape_string() + " and candidate " + candidates.shape_string() +
                         " widths differ");
    }
    for (const std::size_t p : positions) {
        if (p >= queries.rows() || p >= candidates.rows()) {
            throw ArgumentError("ranking: position " + std::to_string(p) + " out of range");
        }
    }
}

void similarity_row(const Matrix& queries, const Matrix& candidates, std::span<const std::size_t> positions,
                    std::size_t i, std::vector<float>& out) {
    const auto q = queries.row(positions[i]);
    for (std::size_t j = 0; j < positions.size(); ++j) {
        out[j] = static_cast<float>(kernels::detail::dot(q, candidates.row(positions[j])));
    }
}

double gap_of(std::span<const float> row, std::size_t i) {
    double others = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (j != i) others += static_cast<double>(row[j]);
    }
    return static_cast<double>(row[i]) - others / static_cast<double>(row.size() - 1);
}

void require_gap_population(std::span<const std::size_t> positions) {
    if (positions.size() < 2) {
        throw ArgumentError("similarity gap needs a population of at least 2, got " + std::to_string(positions.size()));
    }
}

}  // namespace

namespace ranking::serial {

std::vector<std::size_t> diagonal_ranks(const Matrix& queries, const Matrix& candidates,
                                        std::span<const std::size_t> positions) {
    check_inputs(queries, candidates, positions);
    std::vector<std::size_t> ranks(positions.size());
    std::vector<float> row(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        similarity_row(queries, candidates, positions, i, row);
        ranks[i] = rank_of(row, i);
    }
    return ranks;
}

std::vector<double> row_gaps(const Matrix& queries, const Matrix& candidates, std::span<const std::size_t> positions) {
    check_inputs(queries, candidates, positions);
    require_gap_population(positions);
    std::vector<double> gaps(positions.size());
    std::vector<float> row(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        similarity_row(queries, candidates, positions, i, row);
        gaps[i] = gap_of(row, i);
    }
    return gaps;
}

}  // namespace ranking::serial

namespace ranking::omp {

using index_t = std::int64_t;

std::vector<std::size_t> diagonal_ranks(const Matrix& queries, const Matrix& candidates,
                                        std::span<const std::size_t> positions) {
    check_inputs(queries, candidates, positions);
    std::vector<std::size_t> ranks(positions.size());
    const auto n = static_cast<index_t>(positions.size());
#pragma omp parallel
    {
        std::vector<float> row(positions.size());
#pragma omp for schedule(dynamic, 16)
        for (index_t i = 0; i < n; ++i) {
            const auto qi = static_cast<std::size_t>(i);
            similarity_row(queries, candidates, positions, qi, row);
            ranks[qi] = rank_of(row, qi);
        }
    }
    return ranks;
}

std::vector<double> row_gaps(const Matrix& queries, const Matrix& candidates, std::span<const std::size_t> positions) {
    check_inputs(queries, candidates, positions);
    require_gap_population(positions);
    std::vector<double> gaps(positions.size());
    const auto n = static_cast<index_t>(positions.size());
#pragma omp parallel
    {
        std::vector<float> row(positions.size());
#pragma omp for schedule(dynamic, 16)
        for (index_t i = 0; i < n; ++i) {
            const auto qi = static_cast<std::size_t>(i);
            similarity_row(queries, candidates, positions, qi, row);
            gaps[qi] = gap_of(row, qi);
        }
    }
    return gaps;
}

}  // namespace ranking::omp

}  // namespace dcglab
