#pragma once

#include <json.hpp>

#include <array>
#include <cstddef>
#include <cstdint>

#include "seriesforge/eval/scores.hpp"
#include "seriesforge/losses/losses.hpp"
#include "seriesforge/nets/bundle.hpp"

namespace seriesforge::training {

struct LearningRates {
    double lossfn_autoencoder = 1e-3;
    double autoencoder = 1e-3;
    double supervisor = 1e-3;
    double generator = 1e-3;  // joint generator + supervisor step
    double discriminator = 1e-3;
};

struct EarlyStopConfig {
    std::size_t check_interval = 500;
    double start_fraction = 0.5;
    // Quick classifier; steps must stay <= 200.
    eval::ScorerBudget quick_budget{.steps = 200, .batch_size = 64, .hidden_dim = 0, .num_layers = 1,
                                    .learning_rate = 1e-2};
    std::uint64_t quick_seed = 7;
    // Real samples compared per evaluation (0 = the whole training set).
    std::size_t eval_samples = 0;
};

struct TrainConfig {
    std::uint64_t seed = 0;
    std::size_t window = 24;
    std::size_t batch_size = 64;

    std::size_t hidden_dim = 24;
    std::size_t num_layers = 3;
    std::size_t latent_dim = 0;  // 0: max(1, F / 2)
    std::size_t noise_dim = 0;   // 0: latent_dim
    std::size_t time_stride = 2;
    std::size_t code_dim = 0;  // 0: F

    // Iterations of phases 1..4.
    std::array<std::size_t, 4> epochs{2000, 2000, 2000, 2000};
    LearningRates learning_rates;
    losses::GeneratorWeights generator_weights;
    losses::AutoencoderWeights autoencoder_weights;

    bool use_supervised_loss = true;
    bool use_feature_discriminator = true;
    bool use_ts_loss = true;
    bool use_early_stopping = true;
    EarlyStopConfig early_stop;

    std::size_t discriminator_steps = 1;

    // Throws ConfigError.
    void validate() const;
    nets::BundleDims bundle_dims(std::size_t features) const;
};

nlohmann::json to_json(const TrainConfig& cfg);
// Missing keys keep their defaults; unknown keys and wrong types throw ConfigError.
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

}  // namespace seriesforge::training
