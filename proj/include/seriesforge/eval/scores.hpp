#pragma once

#include <cstddef>

#include "seriesforge/data/series.hpp"
#include "seriesforge/numkit/rng.hpp"

namespace seriesforge::eval {

// Training budget for the post-hoc scorers. hidden_dim 0 means
// clamp(floor(T * F / 4), 8, 64).
struct ScorerBudget {
    std::size_t steps = 500;
    std::size_t batch_size = 64;
    std::size_t hidden_dim = 0;
    std::size_t num_layers = 1;
    double learning_rate = 1e-2;

    void validate() const;
};

std::size_t scorer_hidden_dim(const ScorerBudget& budget, std::size_t steps, std::size_t features);

// Post-hoc GRU classifier separating real (label 1) from synthetic (label 0)
// on a stratified 80/20 split; returns |test accuracy - 0.5|. Both batches
// need the same (T, F) and at least 10 samples.
double discriminative_score(const data::SeriesBatch& real, const data::SeriesBatch& synthetic,
                            const ScorerBudget& budget, numkit::Rng& rng);

// Train-on-synthetic, test-on-real next-step forecaster. Returns the MAE over
// every (sample, t, feature) prediction of x_{t+1} from x_{1:t} on real.
double predictive_score(const data::SeriesBatch& real, const data::SeriesBatch& synthetic,
                        const ScorerBudget& budget, numkit::Rng& rng);

}  // namespace seriesforge::eval
