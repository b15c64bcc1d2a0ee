#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dcglab/matrix.hpp"

namespace dcglab {

struct Pca2d {
    Matrix coords;                    // N x 2
    MatrixD components;               // d x 2, unit columns
    std::array<double, 2> variances;  // eigenvalues of the sample covariance
};

/// Mean-centres the rows and projects them onto the top two principal
/// directions (64-bit eigendecomposition of the sample covariance). Each
/// direction is signed so that its largest-magnitude loading is positive.
[[nodiscard]] Pca2d pca_fit_2d(const Matrix& m);
[[nodiscard]] Matrix pca_2d(const Matrix& m);

struct ScatterGroup {
    std::string label;
    Matrix points;
    /// Optional; defaults to "<label>-<row>".
    std::vector<std::string> ids;
};

struct ScatterRow {
    float x = 0.0F;
    float y = 0.0F;
    std::string group;
    std::string id;
};

/// PCA over the union of all groups, written as CSV with header x,y,group,id.
std::vector<ScatterRow> export_scatter(std::span<const ScatterGroup> groups, const std::filesystem::path& path);

}  // namespace dcglab
