#include <cmath>

#include "dcglab/trainer.hpp"

namespace dcglab {

template <typename T>
void adam_step(AdamState& state, std::span<T> params, std::span<const T> grads, double lr, const AdamConfig& cfg) {
    if (params.size() != grads.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
        throw ShapeError("adam_step: params " + std::to_string(params.size()) + ", grads " +
                         std::to_string(grads.size()) + ", state " + std::to_string(state.m.size()) +
                         " must agree");
    }
    state.t += 1;
    const double t = static_cast<double>(state.t);
    const double correction1 = 1.0 - std::pow(cfg.beta1, t);
    const double correction2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = static_cast<double>(grads[i]);
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        const double m_hat = state.m[i] / correction1;
        const double v_hat = state.v[i] / correction2;
        params[i] = static_cast<T>(static_cast<double>(params[i]) - lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon));
    }
}

template void adam_step<float>(AdamState&, std::span<float>, std::span<const float>, double, const AdamConfig&);
template void adam_step<double>(AdamState&, std::span<double>, std::span<const double>, double, const AdamConfig&);

}  // namespace dcglab
