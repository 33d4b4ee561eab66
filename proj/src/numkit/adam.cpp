#include "seriesforge/numkit/adam.hpp"

#include <cmath>

#include "seriesforge/error.hpp"

namespace seriesforge::numkit {

AdamState make_adam_state(std::span<const Tensor> params, AdamConfig config) {
    AdamState state;
    state.config = config;
    for (const auto& p : params) {
        state.first_moment.emplace_back(p.size(), 0.0);
        state.second_moment.emplace_back(p.size(), 0.0);
    }
    return state;
}

void adam_step(std::span<Tensor> params, std::span<const Tensor> grads, AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
        throw ShapeError("adam_step: " + std::to_string(params.size()) + " parameters, " +
                         std::to_string(grads.size()) + " gradients, " + std::to_string(state.first_moment.size()) +
                         " moment slots");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].shape() != grads[i].shape() || state.first_moment[i].size() != params[i].size()) {
            throw ShapeError("adam_step: parameter " + std::to_string(i) + " shape " + shape_str(params[i].shape()) +
                             " vs gradient " + shape_str(grads[i].shape()));
        }
    }
    const auto& c = state.config;
    ++state.t;
    const double t = static_cast<double>(state.t);
    const double correction1 = 1.0 - std::pow(c.beta1, t);
    const double correction2 = 1.0 - std::pow(c.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto p = params[i].mutable_data();
        const auto g = grads[i].data();
        auto& m = state.first_moment[i];
        auto& v = state.second_moment[i];
        for (std::size_t j = 0; j < p.size(); ++j) {
            m[j] = c.beta1 * m[j] + (1.0 - c.beta1) * g[j];
            v[j] = c.beta2 * v[j] + (1.0 - c.beta2) * g[j] * g[j];
            const double mhat = m[j] / correction1;
            const double vhat = v[j] / correction2;
            p[j] -= c.lr * mhat / (std::sqrt(vhat) + c.epsilon);
        }
    }
}

Adam::Adam(std::vector<Tensor> params, AdamConfig config)
    : params_(std::move(params)), state_(make_adam_state(params_, config)) {}

void Adam::step(const Gradients& grads) {
    std::vector<Tensor> g;
    g.reserve(params_.size());
    for (const auto& p : params_) g.push_back(grads.of(p));
    adam_step(params_, g, state_);
}

}  // namespace seriesforge::numkit
