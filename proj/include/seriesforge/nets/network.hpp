#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seriesforge/nets/gru.hpp"

namespace seriesforge::nets {

enum class Activation { Sigmoid, Linear };

enum class Role {
    LatentEncoder,
    LatentDecoder,
    LossEncoder,
    LossDecoder,
    Generator,
    Supervisor,
    LatentDiscriminator,
    FeatureDiscriminator,
    Scorer,
};

std::string_view role_name(Role role);

struct NetworkSpec {
    Role role = Role::Scorer;
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    std::size_t num_layers = 1;
    std::size_t output_dim = 0;
    Activation output_activation = Activation::Sigmoid;
    // LossEncoder emits one code per time_stride inputs; LossDecoder repeats
    // each code time_stride times before its recurrent layers.
    std::size_t time_stride = 1;

    void validate() const;
};

struct DenseParams {
    Tensor weight;  // (in, out)
    Tensor bias;    // (out)
};

// Stacked GRU layers followed by a per-timestep dense map and the output
// activation.
class Network {
public:
    Network() = default;

    static Network init(const NetworkSpec& spec, numkit::Rng& rng);

    // (N, T, input_dim) -> (N, T', output_dim); T' = T / stride for a
    // LossEncoder, T * stride for a LossDecoder, T otherwise.
    Tensor forward(const Tensor& x) const;
    // Same as forward but without the output activation.
    Tensor forward_logits(const Tensor& x) const;

    const NetworkSpec& spec() const noexcept { return spec_; }
    const std::vector<GruParams>& layers() const noexcept { return layers_; }
    const DenseParams& head() const noexcept { return head_; }
    DenseParams& head() noexcept { return head_; }

    std::vector<Tensor> parameters() const;
    std::vector<std::pair<std::string, Tensor>> named_parameters() const;

    // Deep copy with independent storage.
    Network clone() const;

private:
    NetworkSpec spec_;
    std::vector<GruParams> layers_;
    DenseParams head_;
};

}  // namespace seriesforge::nets
