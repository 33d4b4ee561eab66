#include "seriesforge/nets/gru.hpp"

#include <cmath>

#include "seriesforge/error.hpp"
#include "seriesforge/numkit/ops.hpp"

namespace seriesforge::nets {

using namespace numkit;

std::vector<std::pair<std::string, Tensor>> GruParams::named() const {
    return {{"w_z", w_z}, {"w_r", w_r}, {"w_h", w_h}, {"u_z", u_z}, {"u_r", u_r},
            {"u_h", u_h}, {"b_z", b_z}, {"b_r", b_r}, {"b_h", b_h}};
}

namespace {

Tensor uniform_param(Shape shape, double bound, Rng& rng) {
    std::vector<double> values(shape_size(shape));
    for (double& v : values) v = rng.uniform(-bound, bound);
    return Tensor::parameter(std::move(shape), std::move(values));
}

}  // namespace

GruParams init_gru(std::size_t input_dim, std::size_t hidden_dim, Rng& rng) {
    if (input_dim == 0 || hidden_dim == 0) throw ContractError("init_gru: dimensions must be positive");
    const double k = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    GruParams p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    p.w_z = uniform_param({input_dim, hidden_dim}, k, rng);
    p.w_r = uniform_param({input_dim, hidden_dim}, k, rng);
    p.w_h = uniform_param({input_dim, hidden_dim}, k, rng);
    p.u_z = uniform_param({hidden_dim, hidden_dim}, k, rng);
    p.u_r = uniform_param({hidden_dim, hidden_dim}, k, rng);
    p.u_h = uniform_param({hidden_dim, hidden_dim}, k, rng);
    p.b_z = Tensor::parameter({hidden_dim}, std::vector<double>(hidden_dim, 0.0));
    p.b_r = Tensor::parameter({hidden_dim}, std::vector<double>(hidden_dim, 0.0));
    p.b_h = Tensor::parameter({hidden_dim}, std::vector<double>(hidden_dim, 0.0));
    return p;
}

Tensor gru_forward_reference(const GruParams& params, const Tensor& seq, const Tensor& h0) {
    const Shape& s = seq.shape();
    if (s.size() != 3 || s[2] != params.input_dim) {
        throw ShapeError("gru_forward: expected (N, T, " + std::to_string(params.input_dim) + "), got " +
                         shape_str(s));
    }
    const std::size_t n = s[0];
    const std::size_t steps = s[1];
    const std::size_t hidden = params.hidden_dim;
    const Shape proj_shape{n, steps, hidden};

    // Input projections for every timestep at once.
    const Tensor xz = matmul(seq, params.w_z) + broadcast_to(params.b_z, proj_shape);
    const Tensor xr = matmul(seq, params.w_r) + broadcast_to(params.b_r, proj_shape);
    const Tensor xh = matmul(seq, params.w_h) + broadcast_to(params.b_h, proj_shape);

    Tensor h = h0.defined() ? h0 : Tensor::zeros({n, hidden});
    if (h.shape() != Shape{n, hidden}) {
        throw ShapeError("gru_forward: h0 shape " + shape_str(h.shape()) + " vs expected " + shape_str({n, hidden}));
    }

    std::vector<Tensor> outputs;
    outputs.reserve(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        const Tensor z = sigmoid(slice_time(xz, t) + matmul(h, params.u_z));
        const Tensor r = sigmoid(slice_time(xr, t) + matmul(h, params.u_r));
        const Tensor c = tanh(slice_time(xh, t) + matmul(r * h, params.u_h));
        h = h + z * (c - h);
        outputs.push_back(h);
    }
    return stack_time(outputs);
}

Tensor gru_forward(const GruParams& params, const Tensor& seq, const Tensor& h0) {
    const Shape& s = seq.shape();
    if (s.size() != 3 || s[2] != params.input_dim) {
        throw ShapeError("gru_forward: expected (N, T, " + std::to_string(params.input_dim) + "), got " +
                         shape_str(s));
    }
    const Tensor h = h0.defined() ? h0 : Tensor::zeros({s[0], params.hidden_dim});
    const GruWeights w{params.w_z, params.w_r, params.w_h, params.u_z, params.u_r,
                       params.u_h, params.b_z, params.b_r, params.b_h};
    return gru_sequence(seq, w, h);
}

}  // namespace seriesforge::nets
