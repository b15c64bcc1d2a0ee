#pragma once

#include <cstdint>

#include "dcglab/matrix.hpp"

namespace dcglab {

/// Upper clamp on exp(log_logit_scale).
inline constexpr double kMaxLogitScale = 100.0;
/// ln(1/0.07): the customary initial temperature of 0.07.
inline constexpr double kInitialLogLogitScale = 2.659260036932778;

/// Bias-free linear map from backbone space (d_in) to the shared space (d_out).
struct ProjectionHead {
    Matrix weight;  // d_in x d_out

    [[nodiscard]] std::size_t d_in() const noexcept { return weight.rows(); }
    [[nodiscard]] std::size_t d_out() const noexcept { return weight.cols(); }

    friend bool operator==(const ProjectionHead&, const ProjectionHead&) = default;
};

struct DualProjector {
    ProjectionHead image_head;
    ProjectionHead text_head;
    float log_logit_scale = static_cast<float>(kInitialLogLogitScale);

    /// exp(log_logit_scale) clamped to (0, kMaxLogitScale].
    [[nodiscard]] double logit_scale() const noexcept;
    /// True when the clamp is active, in which case the scale has zero gradient.
    [[nodiscard]] bool logit_scale_clamped() const noexcept;

    friend bool operator==(const DualProjector&, const DualProjector&) = default;
};

/// Rows of x projected through the head and L2-normalised.
[[nodiscard]] Matrix project(const ProjectionHead& head, const Matrix& x);

/// Intermediates of the symmetric contrastive loss, kept for the backward pass.
struct ClipForward {
    double loss = 0.0;
    double logit_scale = 0.0;
    MatrixD image_raw;   // X · W_img, before normalisation
    MatrixD text_raw;    // Y · W_txt
    MatrixD image_proj;  // U
    MatrixD text_proj;   // V
    MatrixD logits;      // s · U · Vᵀ
};

struct ClipGradients {
    double loss = 0.0;
    Matrix grad_image_weight;
    Matrix grad_text_weight;
    double grad_log_logit_scale = 0.0;
};

/// Symmetric InfoNCE: ½ [CE_rows(L) + CE_rows(Lᵀ)] with L = s·U·Vᵀ and the
/// matching pair of row i on the diagonal. Requires a batch of at least two.
[[nodiscard]] ClipForward clip_loss(const DualProjector& p, const Matrix& x_img, const Matrix& y_txt);

/// Loss plus exact gradients w.r.t. both head weights and log_logit_scale,
/// including the Jacobian of the row normalisation.
[[nodiscard]] ClipGradients clip_loss_grad(const DualProjector& p, const Matrix& x_img, const Matrix& y_txt);

/// Glorot-uniform weights from a seeded generator; log_logit_scale = ln(1/0.07).
[[nodiscard]] DualProjector init_projector(std::size_t d_in, std::size_t d_out, std::uint64_t seed);

}  // namespace dcglab
