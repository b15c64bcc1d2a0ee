#include "dcglab/synthgen.hpp"

#include <cmath>
#include <fmt/format.h>

#include "dcglab/rng.hpp"

namespace dcglab {

void SynthSpec::validate() const {
    if (latent_dim < 1) throw ArgumentError("latent_dim must be >= 1");
    if (latent_dim > backbone_dim) {
        throw ArgumentError("latent_dim " + std::to_string(latent_dim) + " exceeds backbone_dim " +
                            std::to_string(backbone_dim));
    }
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw ArgumentError("noise_sigma must be >= 0");
}

Matrix orthonormal_columns(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    if (cols > rows) throw ArgumentError("orthonormal_columns: more columns than rows");
    Rng rng(seed);
    MatrixD basis(rows, cols);
    for (double& v : basis.data()) v = rng.normal();
    // Modified Gram-Schmidt, two passes.
    for (std::size_t j = 0; j < cols; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t prev = 0; prev < j; ++prev) {
                double proj = 0.0;
                for (std::size_t r = 0; r < rows; ++r) proj += basis(r, prev) * basis(r, j);
                for (std::size_t r = 0; r < rows; ++r) basis(r, j) -= proj * basis(r, prev);
            }
        }
        double norm = 0.0;
        for (std::size_t r = 0; r < rows; ++r) norm += basis(r, j) * basis(r, j);
        norm = std::sqrt(norm);
        for (std::size_t r = 0; r < rows; ++r) basis(r, j) /= norm;
    }
    return basis.cast<float>();
}

SynthData generate(const SynthSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n_pairs;
    const std::size_t d = spec.backbone_dim;
    const std::size_t l = spec.latent_dim;

    SynthData out;
    out.image_map = orthonormal_columns(d, l, spec.map_seed * 2 + 1);
    out.text_map = orthonormal_columns(d, l, spec.map_seed * 2 + 2);

    Rng sample_rng({spec.seed, 1});
    Rng words_rng({spec.seed, 2});
    Matrix images(n, d);
    Matrix texts(n, d);
    std::vector<double> z(l);
    std::vector<PairRecord> records;
    records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (double& v : z) v = sample_rng.normal();
        for (std::size_t r = 0; r < d; ++r) {
            double img = 0.0;
            double txt = 0.0;
            for (std::size_t c = 0; c < l; ++c) {
                img += static_cast<double>(out.image_map(r, c)) * z[c];
                txt += static_cast<double>(out.text_map(r, c)) * z[c];
            }
            images(i, r) = static_cast<float>(img + spec.noise_sigma * sample_rng.normal());
            texts(i, r) = static_cast<float>(txt + spec.noise_sigma * sample_rng.normal());
        }
        PairRecord rec;
        rec.id = fmt::format("{}-{:07d}", spec.dataset, i);
        rec.dataset = spec.dataset;
        rec.lang = spec.lang;
        rec.style = spec.style;
        rec.image_row = i;
        rec.text_row = i;
        rec.n_words = 1 + static_cast<std::size_t>(words_rng.below(30));
        records.push_back(std::move(rec));
    }
    out.pairs = PairSet(std::move(records), std::make_shared<const Matrix>(std::move(images)),
                        std::make_shared<const Matrix>(std::move(texts)));
    return out;
}

DualProjector analytic_projector(const SynthData& data) {
    DualProjector p;
    p.image_head.weight = data.image_map;
    p.text_head.weight = data.text_map;
    return p;
}

DualProjector identity_projector(std::size_t dim) {
    DualProjector p;
    p.image_head.weight = Matrix::identity(dim);
    p.text_head.weight = Matrix::identity(dim);
    return p;
}

}  // namespace dcglab
