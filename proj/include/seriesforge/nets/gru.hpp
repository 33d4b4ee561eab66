#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "seriesforge/numkit/rng.hpp"
#include "seriesforge/numkit/tensor.hpp"

namespace seriesforge::nets {

using numkit::Tensor;

// One GRU layer. Gate convention:
//   z_t = sigmoid(x_t W_z + h_{t-1} U_z + b_z)
//   r_t = sigmoid(x_t W_r + h_{t-1} U_r + b_r)
//   c_t = tanh(x_t W_h + (r_t * h_{t-1}) U_h + b_h)
//   h_t = (1 - z_t) * h_{t-1} + z_t * c_t
// Input weights are (input_dim, hidden_dim), recurrent weights
// (hidden_dim, hidden_dim), biases (hidden_dim).
struct GruParams {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    Tensor w_z, w_r, w_h;
    Tensor u_z, u_r, u_h;
    Tensor b_z, b_r, b_h;

    std::vector<std::pair<std::string, Tensor>> named() const;
};

// Weights uniform in [-1/sqrt(hidden_dim), 1/sqrt(hidden_dim)], biases zero.
GruParams init_gru(std::size_t input_dim, std::size_t hidden_dim, numkit::Rng& rng);

// seq (N, T, input_dim) -> hidden states (N, T, hidden_dim). h0 is (N, hidden_dim)
// and defaults to zeros.
Tensor gru_forward(const GruParams& params, const Tensor& seq, const Tensor& h0 = {});

// Same map built from per-timestep primitives; slower, used to cross-check
// the fused layer.
Tensor gru_forward_reference(const GruParams& params, const Tensor& seq, const Tensor& h0 = {});

}  // namespace seriesforge::nets
