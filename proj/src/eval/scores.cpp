#include "seriesforge/eval/scores.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "seriesforge/error.hpp"
#include "seriesforge/nets/network.hpp"
#include "seriesforge/numkit/adam.hpp"
#include "seriesforge/numkit/graph.hpp"
#include "seriesforge/numkit/ops.hpp"

namespace seriesforge::eval {

using numkit::Tensor;

void ScorerBudget::validate() const {
    if (batch_size == 0) throw ConfigError("scorer budget: batch_size must be positive");
    if (num_layers == 0) throw ConfigError("scorer budget: num_layers must be positive");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("scorer budget: learning_rate must be finite and non-negative");
    }
}

std::size_t scorer_hidden_dim(const ScorerBudget& budget, std::size_t steps, std::size_t features) {
    if (budget.hidden_dim > 0) return budget.hidden_dim;
    return std::clamp<std::size_t>(steps * features / 4, 8, 64);
}

namespace {

nets::Network make_scorer(std::size_t input_dim, std::size_t output_dim, nets::Activation act,
                          const ScorerBudget& budget, std::size_t hidden, numkit::Rng& rng) {
    nets::NetworkSpec spec;
    spec.role = nets::Role::Scorer;
    spec.input_dim = input_dim;
    spec.hidden_dim = hidden;
    spec.num_layers = budget.num_layers;
    spec.output_dim = output_dim;
    spec.output_activation = act;
    nets::Network net = nets::Network::init(spec, rng);
    // Zero head: an untrained scorer outputs logit 0 / sigmoid 0.5 everywhere.
    std::ranges::fill(net.head().weight.mutable_data(), 0.0);
    return net;
}

std::vector<std::size_t> draw_batch(std::vector<std::size_t>& pool, std::size_t batch, numkit::Rng& rng) {
    rng.shuffle(std::span<std::size_t>(pool));
    const std::size_t b = std::min(batch, pool.size());
    return {pool.begin(), pool.begin() + static_cast<long>(b)};
}

void check_pair(std::string_view what, const data::SeriesBatch& real, const data::SeriesBatch& synthetic) {
    real.validate();
    synthetic.validate();
    if (real.steps != synthetic.steps || real.features != synthetic.features) {
        throw ShapeError(std::string(what) + ": (T, F) mismatch (" + std::to_string(real.steps) + ", " +
                         std::to_string(real.features) + ") vs (" + std::to_string(synthetic.steps) + ", " +
                         std::to_string(synthetic.features) + ")");
    }
}

// Samples of `src` restricted to timesteps [begin, end).
Tensor time_window(const data::SeriesBatch& src, std::span<const std::size_t> rows, std::size_t begin,
                   std::size_t end) {
    const std::size_t len = end - begin;
    std::vector<double> v;
    v.reserve(rows.size() * len * src.features);
    for (std::size_t r : rows) {
        const auto first = src.values.begin() + static_cast<long>((r * src.steps + begin) * src.features);
        v.insert(v.end(), first, first + static_cast<long>(len * src.features));
    }
    return Tensor({rows.size(), len, src.features}, std::move(v));
}

std::vector<std::size_t> iota(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

}  // namespace

double discriminative_score(const data::SeriesBatch& real, const data::SeriesBatch& synthetic,
                            const ScorerBudget& budget, numkit::Rng& rng) {
    check_pair("discriminative_score", real, synthetic);
    budget.validate();
    if (real.samples < 10 || synthetic.samples < 10) {
        throw ContractError("discriminative_score: need at least 10 samples per set, got " +
                            std::to_string(real.samples) + " real and " + std::to_string(synthetic.samples) +
                            " synthetic");
    }
    const std::size_t steps = real.steps;
    const std::size_t features = real.features;

    // Pooled set: real rows first, label 1.
    data::SeriesBatch pooled(real.samples + synthetic.samples, steps, features);
    std::copy(real.values.begin(), real.values.end(), pooled.values.begin());
    std::copy(synthetic.values.begin(), synthetic.values.end(),
              pooled.values.begin() + static_cast<long>(real.values.size()));
    auto label_of = [&](std::size_t i) { return i < real.samples ? 1.0 : 0.0; };

    std::vector<std::size_t> real_idx = iota(real.samples);
    std::vector<std::size_t> syn_idx(synthetic.samples);
    std::iota(syn_idx.begin(), syn_idx.end(), real.samples);
    rng.shuffle(std::span<std::size_t>(real_idx));
    rng.shuffle(std::span<std::size_t>(syn_idx));
    const std::size_t real_train = real.samples * 4 / 5;
    const std::size_t syn_train = synthetic.samples * 4 / 5;
    std::vector<std::size_t> train(real_idx.begin(), real_idx.begin() + static_cast<long>(real_train));
    train.insert(train.end(), syn_idx.begin(), syn_idx.begin() + static_cast<long>(syn_train));
    std::vector<std::size_t> test(real_idx.begin() + static_cast<long>(real_train), real_idx.end());
    test.insert(test.end(), syn_idx.begin() + static_cast<long>(syn_train), syn_idx.end());

    const std::size_t hidden = scorer_hidden_dim(budget, steps, features);
    nets::Network net = make_scorer(features, 1, nets::Activation::Linear, budget, hidden, rng);
    numkit::Adam opt(net.parameters(), {.lr = budget.learning_rate});

    for (std::size_t step = 0; step < budget.steps; ++step) {
        const auto rows = draw_batch(train, budget.batch_size, rng);
        std::vector<double> labels(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) labels[i] = label_of(rows[i]);
        numkit::Graph graph;
        const Tensor logit = numkit::slice_time(net.forward_logits(time_window(pooled, rows, 0, steps)), steps - 1);
        const Tensor y({rows.size(), 1}, std::move(labels));
        // Binary cross-entropy on logits: softplus(l) - y * l.
        const Tensor loss = numkit::mean_all(numkit::softplus(logit) - y * logit);
        if (!std::isfinite(loss.item())) throw TrainingError("eval", "discriminative loss", "");
        opt.step(numkit::backward(graph, loss));
    }

    numkit::NoGradGuard no_grad;
    const Tensor logit = numkit::slice_time(net.forward_logits(time_window(pooled, test, 0, steps)), steps - 1);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const double predicted = logit.at(i) > 0.0 ? 1.0 : 0.0;
        if (predicted == label_of(test[i])) ++correct;
    }
    const double accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
    return std::abs(accuracy - 0.5);
}

double predictive_score(const data::SeriesBatch& real, const data::SeriesBatch& synthetic,
                        const ScorerBudget& budget, numkit::Rng& rng) {
    check_pair("predictive_score", real, synthetic);
    budget.validate();
    const std::size_t steps = real.steps;
    const std::size_t features = real.features;
    if (steps < 2) throw ContractError("predictive_score: need T >= 2, got " + std::to_string(steps));

    const std::size_t hidden = scorer_hidden_dim(budget, steps, features);
    nets::Network net = make_scorer(features, features, nets::Activation::Sigmoid, budget, hidden, rng);
    numkit::Adam opt(net.parameters(), {.lr = budget.learning_rate});

    std::vector<std::size_t> pool = iota(synthetic.samples);
    for (std::size_t step = 0; step < budget.steps; ++step) {
        const auto rows = draw_batch(pool, budget.batch_size, rng);
        numkit::Graph graph;
        const Tensor pred = net.forward(time_window(synthetic, rows, 0, steps - 1));
        const Tensor loss = numkit::mean_all(numkit::abs(pred - time_window(synthetic, rows, 1, steps)));
        if (!std::isfinite(loss.item())) throw TrainingError("eval", "predictive loss", "");
        opt.step(numkit::backward(graph, loss));
    }

    numkit::NoGradGuard no_grad;
    const auto all = iota(real.samples);
    const Tensor pred = net.forward(time_window(real, all, 0, steps - 1));
    const Tensor target = time_window(real, all, 1, steps);
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) total += std::abs(pred.at(i) - target.at(i));
    return total / static_cast<double>(pred.size());
}

}  // namespace seriesforge::eval
