#include "seriesforge/nets/network.hpp"

#include <cmath>

#include "seriesforge/error.hpp"
#include "seriesforge/numkit/ops.hpp"

namespace seriesforge::nets {

using namespace numkit;

std::string_view role_name(Role role) {
    switch (role) {
        case Role::LatentEncoder: return "latent_encoder";
        case Role::LatentDecoder: return "latent_decoder";
        case Role::LossEncoder: return "lossfn_encoder";
        case Role::LossDecoder: return "lossfn_decoder";
        case Role::Generator: return "generator";
        case Role::Supervisor: return "supervisor";
        case Role::LatentDiscriminator: return "latent_discriminator";
        case Role::FeatureDiscriminator: return "feature_discriminator";
        case Role::Scorer: return "scorer";
    }
    return "unknown";
}

void NetworkSpec::validate() const {
    if (input_dim == 0 || hidden_dim == 0 || num_layers == 0 || output_dim == 0 || time_stride == 0) {
        throw ContractError(std::string(role_name(role)) + ": network dimensions must be positive");
    }
}

Network Network::init(const NetworkSpec& spec, Rng& rng) {
    spec.validate();
    Network net;
    net.spec_ = spec;
    for (std::size_t l = 0; l < spec.num_layers; ++l) {
        net.layers_.push_back(init_gru(l == 0 ? spec.input_dim : spec.hidden_dim, spec.hidden_dim, rng));
    }
    const double k = 1.0 / std::sqrt(static_cast<double>(spec.hidden_dim));
    std::vector<double> w(spec.hidden_dim * spec.output_dim);
    for (double& v : w) v = rng.uniform(-k, k);
    net.head_.weight = Tensor::parameter({spec.hidden_dim, spec.output_dim}, std::move(w));
    net.head_.bias = Tensor::parameter({spec.output_dim}, std::vector<double>(spec.output_dim, 0.0));
    return net;
}

Tensor Network::forward_logits(const Tensor& x) const {
    const Shape& s = x.shape();
    if (s.size() != 3 || s[2] != spec_.input_dim) {
        throw ShapeError(std::string(role_name(spec_.role)) + ": expected input (N, T, " +
                         std::to_string(spec_.input_dim) + "), got " + shape_str(s));
    }
    const std::size_t stride = spec_.time_stride;
    Tensor h = x;
    if (spec_.role == Role::LossDecoder && stride > 1) {
        std::vector<Tensor> steps;
        steps.reserve(s[1] * stride);
        for (std::size_t t = 0; t < s[1]; ++t) {
            const Tensor code = slice_time(x, t);
            for (std::size_t r = 0; r < stride; ++r) steps.push_back(code);
        }
        h = stack_time(steps);
    }
    for (const auto& layer : layers_) h = gru_forward(layer, h);
    if (spec_.role == Role::LossEncoder && stride > 1) {
        if (s[1] % stride != 0) {
            throw ShapeError(std::string(role_name(spec_.role)) + ": time_stride " + std::to_string(stride) +
                             " does not divide window length " + std::to_string(s[1]));
        }
        std::vector<Tensor> picked;
        for (std::size_t t = stride - 1; t < s[1]; t += stride) picked.push_back(slice_time(h, t));
        h = stack_time(picked);
    }
    Shape out_shape = h.shape();
    out_shape.back() = spec_.output_dim;
    return matmul(h, head_.weight) + broadcast_to(head_.bias, out_shape);
}

Tensor Network::forward(const Tensor& x) const {
    Tensor logits = forward_logits(x);
    return spec_.output_activation == Activation::Sigmoid ? sigmoid(logits) : logits;
}

std::vector<Tensor> Network::parameters() const {
    std::vector<Tensor> out;
    for (auto& [name, t] : named_parameters()) out.push_back(t);
    return out;
}

std::vector<std::pair<std::string, Tensor>> Network::named_parameters() const {
    std::vector<std::pair<std::string, Tensor>> out;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        for (auto& [name, t] : layers_[l].named()) out.emplace_back("gru" + std::to_string(l) + "." + name, t);
    }
    out.emplace_back("head.weight", head_.weight);
    out.emplace_back("head.bias", head_.bias);
    return out;
}

Network Network::clone() const {
    Network copy;
    copy.spec_ = spec_;
    for (const auto& layer : layers_) {
        GruParams p = layer;
        p.w_z = layer.w_z.clone();
        p.w_r = layer.w_r.clone();
        p.w_h = layer.w_h.clone();
        p.u_z = layer.u_z.clone();
        p.u_r = layer.u_r.clone();
        p.u_h = layer.u_h.clone();
        p.b_z = layer.b_z.clone();
        p.b_r = layer.b_r.clone();
        p.b_h = layer.b_h.clone();
        copy.layers_.push_back(std::move(p));
    }
    copy.head_.weight = head_.weight.clone();
    copy.head_.bias = head_.bias.clone();
    return copy;
}

}  // namespace seriesforge::nets
