#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "seriesforge/data/series.hpp"
#include "seriesforge/nets/bundle.hpp"
#include "seriesforge/numkit/adam.hpp"
#include "seriesforge/numkit/rng.hpp"
#include "seriesforge/training/config.hpp"
#include "seriesforge/training/early_stop.hpp"

namespace seriesforge::training {

struct Phase2Trace {
    std::vector<double> reconstruction;
    std::vector<double> adversarial;  // autoencoder-side adversarial term
    std::vector<double> discriminator;
};

struct Phase4Trace {
    std::vector<double> feature_discriminator;
    std::vector<double> latent_discriminator;
    std::vector<double> generator;
    std::vector<double> autoencoder;
};

struct TrainResult {
    std::vector<double> phase1;
    Phase2Trace phase2;
    std::vector<double> phase3;
    Phase4Trace phase4;
    // Best saved set under early stopping, otherwise drawn from the final model.
    data::SeriesBatch synthetic;
};

// Runs the four training phases in order on a scaled (N, T, F) batch.
// Every phase counts "epochs" as minibatch iterations.
class Trainer {
public:
    Trainer(TrainConfig cfg, data::SeriesBatch train);

    // Reconstruction training of the loss-function autoencoder.
    std::vector<double> phase1();
    // Latent autoencoder with the feature discriminator.
    Phase2Trace phase2();
    // Supervisor on real embeddings.
    std::vector<double> phase3();
    // Joint adversarial training, with early stopping when enabled. On return
    // the bundle holds the selected model.
    Phase4Trace phase4();

    TrainResult run();

    const TrainConfig& config() const noexcept { return cfg_; }
    const data::SeriesBatch& train_data() const noexcept { return train_; }
    const nets::NetworkBundle& bundle() const noexcept { return bundle_; }
    nets::NetworkBundle& bundle() noexcept { return bundle_; }
    const EarlyStopState& early_stop() const noexcept { return es_; }
    const numkit::Rng& rng() const noexcept { return rng_; }
    int completed_phase() const noexcept { return completed_; }
    std::size_t epoch() const noexcept { return epoch_; }
    const data::SeriesBatch& final_synthetic() const noexcept { return synthetic_; }

    // Called after each phase-4 iteration with the 1-based iteration count.
    std::function<void(std::size_t)> on_phase4_iteration;

private:
    void require_phase(int phase) const;
    std::vector<std::size_t> draw_batch();
    numkit::Tensor noise(std::size_t n);
    data::SeriesBatch eval_real() const;

    TrainConfig cfg_;
    data::SeriesBatch train_;
    nets::NetworkBundle bundle_;
    numkit::Rng rng_;
    numkit::Rng eval_rng_;
    EarlyStopState es_;
    data::SeriesBatch synthetic_;
    std::vector<std::size_t> pool_;
    int completed_ = 0;
    std::size_t epoch_ = 0;

    numkit::Adam opt_lossfn_;
    numkit::Adam opt_autoencoder_;
    numkit::Adam opt_feature_disc_;
    numkit::Adam opt_supervisor_;
    numkit::Adam opt_generator_;
    numkit::Adam opt_latent_disc_;
};

// Scaled synthetic samples r(s(g(z))) for z ~ U[0, 1)^(count x T x Z).
data::SeriesBatch generate(const nets::NetworkBundle& bundle, std::size_t count, std::size_t window,
                           numkit::Rng& rng);

}  // namespace seriesforge::training
