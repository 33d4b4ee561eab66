#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "seriesforge/numkit/graph.hpp"
#include "seriesforge/numkit/tensor.hpp"

namespace seriesforge::numkit {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamConfig config;
    std::vector<std::vector<double>> first_moment;
    std::vector<std::vector<double>> second_moment;
    std::size_t t = 0;
};

AdamState make_adam_state(std::span<const Tensor> params, AdamConfig config);

// Bias-corrected Adam update applied in place to each parameter leaf.
// grads[i] must match params[i] in shape.
void adam_step(std::span<Tensor> params, std::span<const Tensor> grads, AdamState& state);

// Owns the state for a fixed parameter list.
class Adam {
public:
    Adam() = default;
    Adam(std::vector<Tensor> params, AdamConfig config);

    void step(const Gradients& grads);
    const AdamState& state() const noexcept { return state_; }
    const std::vector<Tensor>& params() const noexcept { return params_; }

private:
    std::vector<Tensor> params_;
    AdamState state_;
};

}  // namespace seriesforge::numkit
