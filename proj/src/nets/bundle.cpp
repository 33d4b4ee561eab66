#include "seriesforge/nets/bundle.hpp"

#include <algorithm>
#include <unordered_map>

#include "seriesforge/error.hpp"

namespace seriesforge::nets {

using numkit::Rng;
using numkit::shape_str;

BundleDims BundleDims::defaults(std::size_t features) {
    BundleDims d;
    d.features = features;
    d.latent_dim = std::max<std::size_t>(1, features / 2);
    d.noise_dim = d.latent_dim;
    d.code_dim = features;
    return d;
}

void BundleDims::validate(std::size_t window) const {
    if (features == 0 || latent_dim == 0 || hidden_dim == 0 || num_layers == 0 || noise_dim == 0 ||
        time_stride == 0 || code_dim == 0) {
        throw ContractError("bundle: all dimensions must be positive");
    }
    if (window % time_stride != 0) {
        throw ContractError("bundle: time_stride " + std::to_string(time_stride) + " does not divide window length " +
                            std::to_string(window));
    }
}

NetworkBundle NetworkBundle::init(const BundleDims& d, Rng& rng) {
    auto spec = [&](Role role, std::size_t in, std::size_t out, Activation act, std::size_t stride = 1) {
        return NetworkSpec{role, in, d.hidden_dim, d.num_layers, out, act, stride};
    };
    NetworkBundle b;
    b.dims = d;
    b.latent_encoder = Network::init(spec(Role::LatentEncoder, d.features, d.latent_dim, Activation::Sigmoid), rng);
    b.latent_decoder = Network::init(spec(Role::LatentDecoder, d.latent_dim, d.features, Activation::Sigmoid), rng);
    b.lossfn_encoder =
        Network::init(spec(Role::LossEncoder, d.features, d.code_dim, Activation::Sigmoid, d.time_stride), rng);
    b.lossfn_decoder =
        Network::init(spec(Role::LossDecoder, d.code_dim, d.features, Activation::Sigmoid, d.time_stride), rng);
    b.generator = Network::init(spec(Role::Generator, d.noise_dim, d.latent_dim, Activation::Sigmoid), rng);
    b.supervisor = Network::init(spec(Role::Supervisor, d.latent_dim, d.latent_dim, Activation::Sigmoid), rng);
    b.latent_discriminator =
        Network::init(spec(Role::LatentDiscriminator, d.latent_dim, 1, Activation::Linear), rng);
    b.feature_discriminator =
        Network::init(spec(Role::FeatureDiscriminator, d.features, 1, Activation::Linear), rng);
    return b;
}

std::vector<std::pair<std::string, Tensor>> NetworkBundle::named_parameters() const {
    std::vector<std::pair<std::string, Tensor>> out;
    for (const Network* net : {&latent_encoder, &latent_decoder, &lossfn_encoder, &lossfn_decoder, &generator,
                               &supervisor, &latent_discriminator, &feature_discriminator}) {
        const std::string prefix(role_name(net->spec().role));
        for (auto& [name, t] : net->named_parameters()) out.emplace_back(prefix + "." + name, t);
    }
    return out;
}

NamedArrays snapshot_of(const std::vector<std::pair<std::string, Tensor>>& params) {
    NamedArrays arrays;
    arrays.reserve(params.size());
    for (const auto& [name, t] : params) {
        arrays.push_back({name, t.shape(), {t.data().begin(), t.data().end()}});
    }
    return arrays;
}

NamedArrays NetworkBundle::snapshot() const { return snapshot_of(named_parameters()); }

void NetworkBundle::restore(const NamedArrays& arrays) {
    std::unordered_map<std::string, const NamedArray*> by_name;
    for (const auto& a : arrays) by_name[a.name] = &a;
    auto params = named_parameters();
    for (auto& [name, t] : params) {
        auto it = by_name.find(name);
        if (it == by_name.end()) throw ContractError("bundle restore: missing array " + name);
        if (it->second->shape != t.shape()) {
            throw ShapeError("bundle restore: " + name + " has shape " + shape_str(it->second->shape) +
                             ", expected " + shape_str(t.shape()));
        }
        auto dst = t.mutable_data();
        std::copy(it->second->values.begin(), it->second->values.end(), dst.begin());
    }
    if (arrays.size() != params.size()) {
        throw ContractError("bundle restore: " + std::to_string(arrays.size()) + " arrays for " +
                            std::to_string(params.size()) + " parameters");
    }
}

NetworkBundle NetworkBundle::clone() const {
    NetworkBundle b;
    b.dims = dims;
    b.latent_encoder = latent_encoder.clone();
    b.latent_decoder = latent_decoder.clone();
    b.lossfn_encoder = lossfn_encoder.clone();
    b.lossfn_decoder = lossfn_decoder.clone();
    b.generator = generator.clone();
    b.supervisor = supervisor.clone();
    b.latent_discriminator = latent_discriminator.clone();
    b.feature_discriminator = feature_discriminator.clone();
    return b;
}

Tensor NetworkBundle::synthesize(const Tensor& noise) const {
    return latent_decoder.forward(supervisor.forward(generator.forward(noise)));
}

}  // namespace seriesforge::nets
