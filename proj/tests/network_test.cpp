#include <gtest/gtest.h>

#include <cmath>

#include "seriesforge/data/series.hpp"
#include "seriesforge/error.hpp"
#include "seriesforge/losses/losses.hpp"
#include "seriesforge/nets/bundle.hpp"
#include "seriesforge/numkit/adam.hpp"
#include "seriesforge/numkit/graph.hpp"
#include "support/suites.hpp"

using namespace seriesforge;
using namespace seriesforge::nets;
using numkit::Rng;
using numkit::Shape;
using seriesforge::testing::random_const;

namespace {

BundleDims small_dims() {
    BundleDims d = BundleDims::defaults(5);
    d.hidden_dim = 16;
    d.num_layers = 2;
    return d;
}

}  // namespace

TEST(Network, InitWeightsBoundedBiasesZero) {
    Rng rng(1);
    const auto net = Network::init({Role::Generator, 3, 16, 2, 4, Activation::Sigmoid, 1}, rng);
    for (const auto& [name, t] : net.named_parameters()) {
        const bool bias = name.find("b_") != std::string::npos || name.find("bias") != std::string::npos;
        for (double v : t.data()) {
            if (bias) {
                EXPECT_EQ(v, 0.0) << name;
            } else {
                EXPECT_LE(std::fabs(v), 0.25) << name;
            }
        }
    }
    EXPECT_EQ(net.layers().size(), 2u);
    EXPECT_EQ(net.head().weight.shape(), (Shape{16, 4}));
}

TEST(Network, SameSeedSameParameters) {
    Rng a(9), b(9);
    const auto x = NetworkBundle::init(small_dims(), a).snapshot();
    const auto y = NetworkBundle::init(small_dims(), b).snapshot();
    EXPECT_EQ(x, y);
}

TEST(Network, InvalidSpecIsContractError) {
    Rng rng(1);
    EXPECT_THROW(Network::init({Role::Generator, 0, 4, 1, 2, Activation::Sigmoid, 1}, rng), ContractError);
    EXPECT_THROW(Network::init({Role::Generator, 2, 4, 0, 2, Activation::Sigmoid, 1}, rng), ContractError);
    EXPECT_THROW(small_dims().validate(25), ContractError);
}

TEST(Network, WrongInputWidthIsShapeError) {
    Rng rng(2);
    const auto net = Network::init({Role::Generator, 3, 4, 1, 2, Activation::Sigmoid, 1}, rng);
    EXPECT_THROW(net.forward(random_const({2, 5, 4}, rng)), ShapeError);
}

TEST(Network, GeneratorOutputsLatentValuesInUnitInterval) {
    Rng rng(3);
    const auto b = NetworkBundle::init(small_dims(), rng);
    const Tensor z = data::sample_noise(7, 24, b.dims.noise_dim, rng);
    const Tensor h = b.generator.forward(z);
    EXPECT_EQ(h.shape(), (Shape{7, 24, b.dims.latent_dim}));
    for (double v : h.data()) {
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
}

TEST(Network, LossEncoderCompressesTime) {
    Rng rng(4);
    const auto b = NetworkBundle::init(small_dims(), rng);
    const Tensor x = random_const({3, 24, 5}, rng, 0, 1);
    const Tensor code = b.lossfn_encoder.forward(x);
    EXPECT_EQ(code.shape(), (Shape{3, 12, b.dims.code_dim}));
    EXPECT_EQ(b.lossfn_decoder.forward(code).shape(), x.shape());
}

TEST(Network, LossEncoderKeepsEveryStrideThStep) {
    Rng rng(5);
    const auto net = Network::init({Role::LossEncoder, 2, 3, 1, 2, Activation::Linear, 3}, rng);
    const Tensor x = random_const({2, 9, 2}, rng);
    // Same weights, stride 1: the strided output must be a subsequence.
    Network copy = net.clone();
    const Tensor strided = net.forward(x);
    NetworkSpec flat = net.spec();
    flat.role = Role::Scorer;
    flat.time_stride = 1;
    Rng unused(0);
    Network full = Network::init(flat, unused);
    auto src = copy.named_parameters();
    auto dst = full.named_parameters();
    ASSERT_EQ(src.size(), dst.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
        auto out = dst[i].second.mutable_data();
        std::copy(src[i].second.data().begin(), src[i].second.data().end(), out.begin());
    }
    const Tensor every = full.forward(x);
    ASSERT_EQ(strided.shape(), (Shape{2, 3, 2}));
    for (std::size_t n = 0; n < 2; ++n) {
        for (std::size_t k = 0; k < 3; ++k) {
            for (std::size_t d = 0; d < 2; ++d) {
                EXPECT_EQ(strided.at((n * 3 + k) * 2 + d), every.at((n * 9 + 3 * k + 2) * 2 + d));
            }
        }
    }
}

TEST(Network, CompositionShapes) {
    Rng rng(6);
    const auto b = NetworkBundle::init(small_dims(), rng);
    const Tensor x = random_const({4, 24, 5}, rng, 0, 1);
    const Tensor z = data::sample_noise(4, 24, b.dims.noise_dim, rng);
    EXPECT_EQ(b.latent_decoder.forward(b.latent_encoder.forward(x)).shape(), x.shape());
    EXPECT_EQ(b.latent_decoder.forward(b.generator.forward(z)).shape(), x.shape());
    const Tensor x_syn = b.synthesize(z);
    EXPECT_EQ(x_syn.shape(), x.shape());
    EXPECT_EQ(b.lossfn_encoder.forward(x).shape(), b.lossfn_encoder.forward(x_syn).shape());
    EXPECT_EQ(b.latent_discriminator.forward(b.latent_encoder.forward(x)).shape(), (Shape{4, 24, 1}));
    EXPECT_EQ(b.feature_discriminator.forward(x).shape(), (Shape{4, 24, 1}));
}

TEST(Network, SigmoidOutputsOpenUnitDiscriminatorsUnbounded) {
    Rng rng(7);
    auto b = NetworkBundle::init(small_dims(), rng);
    const Tensor x = random_const({4, 24, 5}, rng, 0, 1);
    const Tensor decoded = b.latent_decoder.forward(b.latent_encoder.forward(x));
    for (double v : decoded.data()) {
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
    // Forcing a large head bias shows there is no squashing on the scores.
    b.feature_discriminator.head().bias.mutable_data()[0] = 5.0;
    const Tensor scores = b.feature_discriminator.forward(x);
    for (double v : scores.data()) EXPECT_GT(v, 4.0);
    const Tensor logits = b.latent_decoder.forward_logits(b.latent_encoder.forward(x));
    const Tensor probs = b.latent_decoder.forward(b.latent_encoder.forward(x));
    for (std::size_t i = 0; i < probs.size(); ++i) {
        EXPECT_NEAR(probs.at(i), 1.0 / (1.0 + std::exp(-logits.at(i))), 1e-15);
    }
}

TEST(Network, BundleDimensionsAgree) {
    Rng rng(8);
    const auto b = NetworkBundle::init(small_dims(), rng);
    const auto& d = b.dims;
    EXPECT_EQ(b.latent_encoder.spec().output_dim, d.latent_dim);
    EXPECT_EQ(b.latent_decoder.spec().input_dim, d.latent_dim);
    EXPECT_EQ(b.generator.spec().output_dim, d.latent_dim);
    EXPECT_EQ(b.supervisor.spec().input_dim, d.latent_dim);
    EXPECT_EQ(b.supervisor.spec().output_dim, d.latent_dim);
    EXPECT_EQ(b.latent_discriminator.spec().input_dim, d.latent_dim);
    EXPECT_EQ(b.latent_decoder.spec().output_dim, d.features);
    EXPECT_EQ(b.lossfn_encoder.spec().input_dim, d.features);
    EXPECT_EQ(b.feature_discriminator.spec().input_dim, d.features);
    EXPECT_EQ(b.latent_discriminator.spec().output_activation, Activation::Linear);
    EXPECT_EQ(b.feature_discriminator.spec().output_activation, Activation::Linear);
    EXPECT_EQ(d.latent_dim, 2u);
    EXPECT_EQ(d.code_dim, 5u);
}

TEST(Network, SnapshotRestoreAndCloneAreIndependent) {
    Rng rng(10);
    auto b = NetworkBundle::init(small_dims(), rng);
    const auto snap = b.snapshot();
    auto c = b.clone();
    c.generator.head().bias.mutable_data()[0] = 3.0;
    EXPECT_EQ(b.snapshot(), snap);
    b.generator.head().bias.mutable_data()[0] = 7.0;
    b.restore(snap);
    EXPECT_EQ(b.snapshot(), snap);

    auto bad = snap;
    bad.front().shape = {1};
    EXPECT_THROW(b.restore(bad), ShapeError);
    bad = snap;
    bad.pop_back();
    EXPECT_THROW(b.restore(bad), ContractError);
}

TEST(Network, SupervisorOverfitsConstantSequence) {
    Rng rng(11);
    auto net = Network::init({Role::Supervisor, 2, 8, 1, 2, Activation::Sigmoid, 1}, rng);
    std::vector<double> vals;
    for (int t = 0; t < 6; ++t) {
        vals.push_back(0.3);
        vals.push_back(0.7);
    }
    const Tensor x({1, 6, 2}, vals);
    numkit::Adam opt(net.parameters(), {.lr = 1e-2});
    double loss = 0.0;
    for (int step = 0; step < 1000; ++step) {
        numkit::Graph graph;
        const Tensor l = losses::reconstruction_loss(x, net.forward(x));
        loss = l.item();
        opt.step(numkit::backward(graph, l));
    }
    EXPECT_LT(loss, 1e-2);
}
