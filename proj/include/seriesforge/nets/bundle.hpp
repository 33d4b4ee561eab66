#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "seriesforge/nets/network.hpp"

namespace seriesforge::nets {

struct BundleDims {
    std::size_t features = 1;
    std::size_t latent_dim = 1;
    std::size_t hidden_dim = 24;
    std::size_t num_layers = 3;
    std::size_t noise_dim = 1;
    std::size_t time_stride = 2;
    std::size_t code_dim = 1;

    // latent_dim = noise_dim = max(1, features / 2), code_dim = features.
    static BundleDims defaults(std::size_t features);
    // Also checks that time_stride divides the window length.
    void validate(std::size_t window) const;
};

struct NamedArray {
    std::string name;
    numkit::Shape shape;
    std::vector<double> values;

    friend bool operator==(const NamedArray&, const NamedArray&) = default;
};
using NamedArrays = std::vector<NamedArray>;

// The eight networks of the model:
//   latent_encoder  e : x   -> h^AE        latent_decoder  r : h -> x
//   lossfn_encoder  ê : x   -> h^L (time-compressed codes)
//   lossfn_decoder  r̂ : h^L -> x
//   generator       g : z   -> h^G         supervisor      s : h -> h^S
//   latent_discriminator  d_h : h -> score per timestep
//   feature_discriminator d   : x -> score per timestep
struct NetworkBundle {
    BundleDims dims;
    Network latent_encoder;
    Network latent_decoder;
    Network lossfn_encoder;
    Network lossfn_decoder;
    Network generator;
    Network supervisor;
    Network latent_discriminator;
    Network feature_discriminator;

    static NetworkBundle init(const BundleDims& dims, numkit::Rng& rng);

    // Names are "<role>.<layer>.<tensor>", in a fixed order.
    std::vector<std::pair<std::string, Tensor>> named_parameters() const;
    NamedArrays snapshot() const;
    // Copies values into the existing parameters; names and shapes must match.
    void restore(const NamedArrays& arrays);
    NetworkBundle clone() const;

    // z -> r(s(g(z))).
    Tensor synthesize(const Tensor& noise) const;
};

NamedArrays snapshot_of(const std::vector<std::pair<std::string, Tensor>>& params);

}  // namespace seriesforge::nets
