#include "dcglab/viz.hpp"

#include <Eigen/Dense>

#include <charconv>
#include <cmath>

#include "dcglab/binary_io.hpp"

namespace dcglab {

Pca2d pca_fit_2d(const Matrix& m) {
    const std::size_t n = m.rows();
    const std::size_t d = m.cols();
    if (n < 2) throw ArgumentError("pca_2d needs at least 2 rows, got " + std::to_string(n));
    if (d < 1) throw ArgumentError("pca_2d needs at least 1 column");

    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;
    const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw ArgumentError("pca_2d: eigendecomposition failed");

    Pca2d out;
    out.components = MatrixD(d, 2);
    out.variances = {0.0, 0.0};
    const Eigen::Index top = static_cast<Eigen::Index>(d) - 1;
    for (Eigen::Index c = 0; c < 2 && c <= top; ++c) {
        Eigen::VectorXd v = solver.eigenvectors().col(top - c);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0) v = -v;
        out.variances[static_cast<std::size_t>(c)] = std::max(0.0, solver.eigenvalues()(top - c));
        for (std::size_t r = 0; r < d; ++r) out.components(r, static_cast<std::size_t>(c)) = v(static_cast<Eigen::Index>(r));
    }

    out.coords = Matrix(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < 2; ++c) {
            double acc = 0.0;
            for (std::size_t r = 0; r < d; ++r) {
                acc += x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) * out.components(r, c);
            }
            out.coords(i, c) = static_cast<float>(acc);
        }
    }
    return out;
}

Matrix pca_2d(const Matrix& m) { return pca_fit_2d(m).coords; }

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string format_float(float v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

}  // namespace

std::vector<ScatterRow> export_scatter(std::span<const ScatterGroup> groups, const std::filesystem::path& path) {
    if (groups.empty()) throw ArgumentError("export_scatter: no groups given");
    const std::size_t d = groups.front().points.cols();
    std::size_t n = 0;
    for (const auto& g : groups) {
        if (g.points.cols() != d) {
            throw ShapeError("export_scatter: group '" + g.label + "' has " + std::to_string(g.points.cols()) +
                             " columns, expected " + std::to_string(d));
        }
        if (!g.ids.empty() && g.ids.size() != g.points.rows()) {
            throw ArgumentError("export_scatter: group '" + g.label + "' has " + std::to_string(g.ids.size()) +
                                " ids for " + std::to_string(g.points.rows()) + " rows");
        }
        n += g.points.rows();
    }
    Matrix all(n, d);
    std::size_t cursor = 0;
    for (const auto& g : groups) {
        std::copy(g.points.data().begin(), g.points.data().end(), all.data().begin() + static_cast<std::ptrdiff_t>(cursor * d));
        cursor += g.points.rows();
    }
    const Matrix coords = pca_2d(all);

    std::vector<ScatterRow> rows;
    rows.reserve(n);
    std::string csv = "x,y,group,id\n";
    cursor = 0;
    for (const auto& g : groups) {
        for (std::size_t i = 0; i < g.points.rows(); ++i, ++cursor) {
            ScatterRow row{coords(cursor, 0), coords(cursor, 1), g.label,
                           g.ids.empty() ? g.label + "-" + std::to_string(i) : g.ids[i]};
            csv += format_float(row.x) + "," + format_float(row.y) + "," + csv_field(row.group) + "," +
                   csv_field(row.id) + "\n";
            rows.push_back(std::move(row));
        }
    }
    io::write_text_file(path, csv);
    return rows;
}

}  // namespace dcglab
