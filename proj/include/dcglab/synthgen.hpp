#pragma once

#include <cstdint>
#include <string>

#include "dcglab/contrastive.hpp"
#include "dcglab/dataset.hpp"

namespace dcglab {

/// Paired embeddings with a known linear alignment: latents z ~ N(0, I),
/// image = P z + noise, text = Q z + noise, where P and Q are seeded maps
/// with orthonormal columns. Raw cross-modal cosine is uninformative, but
/// the heads (P, Q) recover z exactly in the noise-free case.
struct SynthSpec {
    std::size_t n_pairs = 1000;
    std::size_t latent_dim = 16;
    std::size_t backbone_dim = 768;
    double noise_sigma = 0.1;
    std::string dataset = "synth";
    Style style = Style::unknown;
    Lang lang = Lang::other;
    /// Draws latents, noise and word counts.
    std::uint64_t seed = 42;
    /// Draws P and Q. Sets generated with the same map_seed share an alignment.
    std::uint64_t map_seed = 1234;

    void validate() const;
};

struct SynthData {
    PairSet pairs;
    Matrix image_map;  // P, backbone_dim x latent_dim
    Matrix text_map;   // Q
};

[[nodiscard]] Matrix orthonormal_columns(std::size_t rows, std::size_t cols, std::uint64_t seed);

[[nodiscard]] SynthData generate(const SynthSpec& spec);

/// Heads set to the generating maps; the reference upper bound for recovery.
[[nodiscard]] DualProjector analytic_projector(const SynthData& data);

/// Square identity heads (no learned alignment).
[[nodiscard]] DualProjector identity_projector(std::size_t dim);

}  // namespace dcglab
