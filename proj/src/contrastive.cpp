#include "dcglab/contrastive.hpp"

#include <cmath>

#include "dcglab/kernels.hpp"
#include "dcglab/rng.hpp"
#include "dcglab/softmax.hpp"

namespace dcglab {

double DualProjector::logit_scale() const noexcept {
    return std::min(std::exp(static_cast<double>(log_logit_scale)), kMaxLogitScale);
}

bool DualProjector::logit_scale_clamped() const noexcept {
    return std::exp(static_cast<double>(log_logit_scale)) >= kMaxLogitScale;
}

Matrix project(const ProjectionHead& head, const Matrix& x) {
    if (x.cols() != head.d_in()) {
        throw ShapeError("project: input " + x.shape_string() + " does not match head " +
                         head.weight.shape_string());
    }
    return l2_normalize_rows(matmul(x, head.weight));
}

namespace {

void check_batch(const DualProjector& p, const Matrix& x_img, const Matrix& y_txt) {
    if (x_img.rows() != y_txt.rows()) {
        throw ShapeError("clip_loss: image batch " + x_img.shape_string() + " and text batch " +
                         y_txt.shape_string() + " differ in rows");
    }
    if (x_img.cols() != p.image_head.d_in() || y_txt.cols() != p.text_head.d_in()) {
        throw ShapeError("clip_loss: batch widths " + x_img.shape_string() + "/" + y_txt.shape_string() +
                         " do not match heads " + p.image_head.weight.shape_string() + "/" +
                         p.text_head.weight.shape_string());
    }
    if (p.image_head.d_out() != p.text_head.d_out()) {
        throw ShapeError("clip_loss: heads disagree on output width");
    }
    if (x_img.rows() < 2) {
        throw SizeError("clip_loss: degenerate batch of size " + std::to_string(x_img.rows()) +
                        " (contrastive loss needs at least 2 pairs)");
    }
}

// d/dA of row-normalisation u = a / max(|a|, eps).
MatrixD normalization_backward(const MatrixD& raw, const MatrixD& normed, const MatrixD& grad_normed) {
    MatrixD out(raw.rows(), raw.cols());
    for (std::size_t i = 0; i < raw.rows(); ++i) {
        const auto a = raw.row(i);
        const auto u = normed.row(i);
        const auto du = grad_normed.row(i);
        auto da = out.row(i);
        double sq = 0.0;
        for (const double v : a) sq += v * v;
        const double norm = std::sqrt(sq);
        if (norm > kNormEpsilon) {
            double proj = 0.0;
            for (std::size_t k = 0; k < u.size(); ++k) proj += u[k] * du[k];
            for (std::size_t k = 0; k < u.size(); ++k) da[k] = (du[k] - u[k] * proj) / norm;
        } else {
            for (std::size_t k = 0; k < u.size(); ++k) da[k] = du[k] / kNormEpsilon;
        }
    }
    return out;
}

}  // namespace

ClipForward clip_loss(const DualProjector& p, const Matrix& x_img, const Matrix& y_txt) {
    check_batch(p, x_img, y_txt);
    ClipForward f;
    f.logit_scale = p.logit_scale();
    f.image_raw = matmul(x_img.cast<double>(), p.image_head.weight.cast<double>());
    f.text_raw = matmul(y_txt.cast<double>(), p.text_head.weight.cast<double>());
    f.image_proj = l2_normalize_rows(f.image_raw);
    f.text_proj = l2_normalize_rows(f.text_raw);
    f.logits = matmul_transposed(f.image_proj, f.text_proj);
    for (double& v : f.logits.data()) v *= f.logit_scale;

    const double forward = softmax_cross_entropy_rows(f.logits).loss;
    const double backward = softmax_cross_entropy_rows(f.logits.transposed()).loss;
    f.loss = 0.5 * (forward + backward);
    return f;
}

ClipGradients clip_loss_grad(const DualProjector& p, const Matrix& x_img, const Matrix& y_txt) {
    const ClipForward f = clip_loss(p, x_img, y_txt);
    const std::size_t b = f.logits.rows();
    const double s = f.logit_scale;

    const auto image_ce = softmax_cross_entropy_rows(f.logits);
    const auto text_ce = softmax_cross_entropy_rows(f.logits.transposed());

    // dloss/dL = ½ (G_rows + G_colsᵀ)
    MatrixD grad_logits(b, b);
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < b; ++j)
            grad_logits(i, j) = 0.5 * (image_ce.grad_logits(i, j) + text_ce.grad_logits(j, i));

    ClipGradients g;
    g.loss = f.loss;

    if (!p.logit_scale_clamped()) {
        // L = s · C with C = U Vᵀ, so dloss/ds = Σ G ∘ L / s and d s / d log s = s.
        double acc = 0.0;
        for (std::size_t k = 0; k < grad_logits.size(); ++k) acc += grad_logits.data()[k] * f.logits.data()[k];
        g.grad_log_logit_scale = acc;
    }

    MatrixD grad_u = matmul(grad_logits, f.text_proj);
    MatrixD grad_v = transposed_matmul(grad_logits, f.image_proj);
    for (double& v : grad_u.data()) v *= s;
    for (double& v : grad_v.data()) v *= s;

    const MatrixD grad_a = normalization_backward(f.image_raw, f.image_proj, grad_u);
    const MatrixD grad_c = normalization_backward(f.text_raw, f.text_proj, grad_v);
    g.grad_image_weight = transposed_matmul(x_img.cast<double>(), grad_a).cast<float>();
    g.grad_text_weight = transposed_matmul(y_txt.cast<double>(), grad_c).cast<float>();
    return g;
}

DualProjector init_projector(std::size_t d_in, std::size_t d_out, std::uint64_t seed) {
    if (d_in == 0 || d_out == 0) {
        throw ArgumentError("init_projector: dimensions must be >= 1, got " + std::to_string(d_in) + "x" +
                            std::to_string(d_out));
    }
    const double bound = std::sqrt(6.0 / static_cast<double>(d_in + d_out));
    Rng rng(seed);
    auto draw = [&] {
        Matrix w(d_in, d_out);
        for (float& v : w.data()) v = static_cast<float>(rng.uniform(-bound, bound));
        return w;
    };
    DualProjector p;
    p.image_head.weight = draw();
    p.text_head.weight = draw();
    p.log_logit_scale = static_cast<float>(kInitialLogLogitScale);
    return p;
}

}  // namespace dcglab
