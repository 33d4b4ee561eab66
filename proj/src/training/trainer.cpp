#include "seriesforge/training/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "seriesforge/error.hpp"
#include "seriesforge/losses/losses.hpp"
#include "seriesforge/numkit/graph.hpp"
#include "seriesforge/numkit/ops.hpp"

namespace seriesforge::training {

using numkit::Tensor;

namespace {

constexpr std::uint64_t kEvalStream = 0x9e3779b97f4a7c15ULL;

std::vector<Tensor> params_of(std::initializer_list<const nets::Network*> nets) {
    std::vector<Tensor> out;
    for (const auto* n : nets) {
        auto p = n->parameters();
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

double checked(const char* phase, const char* term, const Tensor& t) {
    const double v = t.item();
    if (!std::isfinite(v)) throw TrainingError(phase, term, "value " + std::to_string(v));
    return v;
}

Tensor no_grad(const std::function<Tensor()>& fn) {
    numkit::NoGradGuard guard;
    return fn();
}

}  // namespace

Trainer::Trainer(TrainConfig cfg, data::SeriesBatch train)
    : cfg_(std::move(cfg)), train_(std::move(train)), rng_(cfg_.seed), eval_rng_(cfg_.seed ^ kEvalStream) {
    cfg_.validate();
    train_.validate();
    if (!train_.scaled) throw ContractError("trainer: training data must be scaled to [0, 1]");
    if (train_.steps != cfg_.window) {
        throw ShapeError("trainer: data window " + std::to_string(train_.steps) + " differs from configured window " +
                         std::to_string(cfg_.window));
    }
    const auto dims = cfg_.bundle_dims(train_.features);
    dims.validate(cfg_.window);
    bundle_ = nets::NetworkBundle::init(dims, rng_);
    pool_.resize(train_.samples);
    std::iota(pool_.begin(), pool_.end(), std::size_t{0});
}

void Trainer::require_phase(int phase) const {
    if (completed_ != phase - 1) {
        throw ContractError("trainer: phase " + std::to_string(phase) + " requires phase " +
                            std::to_string(phase - 1) + " to be complete (last completed: " +
                            std::to_string(completed_) + ")");
    }
}

std::vector<std::size_t> Trainer::draw_batch() {
    rng_.shuffle(std::span<std::size_t>(pool_));
    const std::size_t b = std::min(cfg_.batch_size, pool_.size());
    return {pool_.begin(), pool_.begin() + static_cast<long>(b)};
}

Tensor Trainer::noise(std::size_t n) { return data::sample_noise(n, cfg_.window, bundle_.dims.noise_dim, rng_); }

data::SeriesBatch Trainer::eval_real() const {
    const std::size_t n = cfg_.early_stop.eval_samples;
    if (n == 0 || n >= train_.samples) return train_;
    return train_.slice(0, n);
}

std::vector<double> Trainer::phase1() {
    require_phase(1);
    auto& enc = bundle_.lossfn_encoder;
    auto& dec = bundle_.lossfn_decoder;
    opt_lossfn_ = numkit::Adam(params_of({&enc, &dec}), {.lr = cfg_.learning_rates.lossfn_autoencoder});
    std::vector<double> trace;
    for (std::size_t it = 0; it < cfg_.epochs[0]; ++it) {
        const Tensor x = train_.select(draw_batch()).tensor();
        numkit::Graph graph;
        const Tensor loss = losses::reconstruction_loss(x, dec.forward(enc.forward(x)));
        trace.push_back(checked("phase1", "reconstruction", loss));
        opt_lossfn_.step(numkit::backward(graph, loss));
    }
    // The loss-function autoencoder is never updated again.
    for (auto& p : params_of({&enc, &dec})) p.set_requires_grad(false);
    completed_ = 1;
    return trace;
}

Phase2Trace Trainer::phase2() {
    require_phase(2);
    auto& e = bundle_.latent_encoder;
    auto& r = bundle_.latent_decoder;
    auto& d = bundle_.feature_discriminator;
    opt_autoencoder_ = numkit::Adam(params_of({&e, &r}), {.lr = cfg_.learning_rates.autoencoder});
    opt_feature_disc_ = numkit::Adam(d.parameters(), {.lr = cfg_.learning_rates.discriminator});
    losses::AutoencoderWeights weights = cfg_.autoencoder_weights;
    if (!cfg_.use_feature_discriminator) weights.adversarial = 0.0;

    Phase2Trace trace;
    for (std::size_t it = 0; it < cfg_.epochs[1]; ++it) {
        const Tensor x = train_.select(draw_batch()).tensor();
        {
            numkit::FreezeGuard freeze(d.parameters());
            numkit::Graph graph;
            const Tensor x_ae = r.forward(e.forward(x));
            const Tensor rec = losses::reconstruction_loss(x, x_ae);
            Tensor adv;
            if (weights.adversarial != 0.0) adv = losses::lsgan_generator_loss(d.forward(x_ae));
            const Tensor total = losses::autoencoder_total_loss(rec, adv, weights);
            trace.reconstruction.push_back(checked("phase2", "reconstruction", rec));
            trace.adversarial.push_back(adv.defined() ? checked("phase2", "adversarial", adv) : 0.0);
            opt_autoencoder_.step(numkit::backward(graph, total));
        }
        if (cfg_.use_feature_discriminator) {
            const Tensor x_ae = no_grad([&] { return r.forward(e.forward(x)); });
            numkit::Graph graph;
            const Tensor loss = losses::lsgan_discriminator_loss(d.forward(x), d.forward(x_ae));
            trace.discriminator.push_back(checked("phase2", "feature discriminator", loss));
            opt_feature_disc_.step(numkit::backward(graph, loss));
        }
    }
    completed_ = 2;
    return trace;
}

std::vector<double> Trainer::phase3() {
    require_phase(3);
    auto& e = bundle_.latent_encoder;
    auto& s = bundle_.supervisor;
    std::vector<double> trace;
    if (cfg_.use_supervised_loss) {
        opt_supervisor_ = numkit::Adam(s.parameters(), {.lr = cfg_.learning_rates.supervisor});
        for (std::size_t it = 0; it < cfg_.epochs[2]; ++it) {
            const Tensor x = train_.select(draw_batch()).tensor();
            const Tensor h = no_grad([&] { return e.forward(x); });
            numkit::Graph graph;
            const Tensor loss = losses::supervised_loss(h, s.forward(h));
            trace.push_back(checked("phase3", "supervised", loss));
            opt_supervisor_.step(numkit::backward(graph, loss));
        }
    }
    completed_ = 3;
    return trace;
}

Phase4Trace Trainer::phase4() {
    require_phase(4);
    auto& e = bundle_.latent_encoder;
    auto& r = bundle_.latent_decoder;
    auto& le = bundle_.lossfn_encoder;
    auto& g = bundle_.generator;
    auto& s = bundle_.supervisor;
    auto& d = bundle_.feature_discriminator;
    auto& dh = bundle_.latent_discriminator;
    const bool use_fd = cfg_.use_feature_discriminator;

    opt_generator_ = numkit::Adam(params_of({&g, &s}), {.lr = cfg_.learning_rates.generator});
    opt_latent_disc_ = numkit::Adam(dh.parameters(), {.lr = cfg_.learning_rates.discriminator});
    if (opt_autoencoder_.params().empty()) {
        opt_autoencoder_ = numkit::Adam(params_of({&e, &r}), {.lr = cfg_.learning_rates.autoencoder});
    }
    if (opt_feature_disc_.params().empty()) {
        opt_feature_disc_ = numkit::Adam(d.parameters(), {.lr = cfg_.learning_rates.discriminator});
    }

    losses::GeneratorWeights gw = cfg_.generator_weights;
    if (!cfg_.use_supervised_loss) gw.supervised = 0.0;
    if (!use_fd) gw.feature_adversarial = 0.0;
    if (!cfg_.use_ts_loss) gw.ts_feature = 0.0;
    losses::AutoencoderWeights aw = cfg_.autoencoder_weights;
    if (!use_fd) aw.adversarial = 0.0;

    const std::size_t total_iters = cfg_.epochs[3];
    const data::SeriesBatch real_eval = cfg_.use_early_stopping ? eval_real() : data::SeriesBatch{};
    Phase4Trace trace;
    es_ = EarlyStopState{};

    for (std::size_t it = 1; it <= total_iters; ++it) {
        Tensor x;
        Tensor z;
        for (std::size_t k = 0; k < cfg_.discriminator_steps; ++k) {
            x = train_.select(draw_batch()).tensor();
            z = noise(x.dim(0));

            if (use_fd) {
                Tensor x_ae, x_g, x_tilde;
                {
                    numkit::NoGradGuard guard;
                    x_ae = r.forward(e.forward(x));
                    const Tensor h_g = g.forward(z);
                    x_g = r.forward(h_g);
                    x_tilde = r.forward(s.forward(h_g));
                }
                numkit::Graph graph;
                const std::array<Tensor, 2> real_scores{d.forward(x), d.forward(x_ae)};
                const std::array<Tensor, 2> fake_scores{d.forward(x_g), d.forward(x_tilde)};
                const Tensor loss = losses::lsgan_discriminator_loss(real_scores, fake_scores);
                trace.feature_discriminator.push_back(checked("phase4", "feature discriminator", loss));
                opt_feature_disc_.step(numkit::backward(graph, loss));
            }

            Tensor h_ae, h_g, h_s;
            {
                numkit::NoGradGuard guard;
                h_ae = e.forward(x);
                h_g = g.forward(z);
                h_s = s.forward(h_g);
            }
            numkit::Graph graph;
            const std::array<Tensor, 1> real_scores{dh.forward(h_ae)};
            const std::array<Tensor, 2> fake_scores{dh.forward(h_g), dh.forward(h_s)};
            const Tensor loss = losses::lsgan_discriminator_loss(real_scores, fake_scores);
            trace.latent_discriminator.push_back(checked("phase4", "latent discriminator", loss));
            opt_latent_disc_.step(numkit::backward(graph, loss));
        }

        {
            numkit::FreezeGuard freeze(params_of({&e, &r, &d, &dh}));
            numkit::Graph graph;
            const Tensor h_g = g.forward(z);
            const Tensor h_s = s.forward(h_g);
            const Tensor x_tilde = r.forward(h_s);
            losses::GeneratorTerms terms;
            {
                const std::array<Tensor, 2> fake{dh.forward(h_g), dh.forward(h_s)};
                terms.latent_adversarial = losses::lsgan_generator_loss(fake);
            }
            if (gw.feature_adversarial != 0.0) {
                const std::array<Tensor, 2> fake{d.forward(r.forward(h_g)), d.forward(x_tilde)};
                terms.feature_adversarial = losses::lsgan_generator_loss(fake);
            }
            if (gw.supervised != 0.0) {
                const Tensor h_real = no_grad([&] { return e.forward(x); });
                terms.supervised = losses::supervised_loss(h_real, s.forward(h_real));
            }
            if (gw.moment != 0.0) terms.moment = losses::moment_loss(x, x_tilde);
            if (gw.ts_feature != 0.0) {
                const Tensor codes_real = no_grad([&] { return le.forward(x); });
                terms.ts_feature = losses::ts_feature_loss(codes_real, le.forward(x_tilde));
            }
            const std::array<std::pair<const char*, const Tensor*>, 5> named{{
                {"latent adversarial", &terms.latent_adversarial},
                {"feature adversarial", &terms.feature_adversarial},
                {"supervised", &terms.supervised},
                {"moment", &terms.moment},
                {"ts feature", &terms.ts_feature},
            }};
            for (const auto& [name, t] : named) {
                if (t->defined()) checked("phase4", name, *t);
            }
            const Tensor total = losses::generator_total_loss(terms, gw);
            trace.generator.push_back(checked("phase4", "generator total", total));
            opt_generator_.step(numkit::backward(graph, total));
        }

        {
            numkit::FreezeGuard freeze(d.parameters());
            numkit::Graph graph;
            const Tensor x_ae = r.forward(e.forward(x));
            const Tensor rec = losses::reconstruction_loss(x, x_ae);
            checked("phase4", "reconstruction", rec);
            Tensor adv;
            if (aw.adversarial != 0.0) {
                adv = losses::lsgan_generator_loss(d.forward(x_ae));
                checked("phase4", "autoencoder adversarial", adv);
            }
            const Tensor total = losses::autoencoder_total_loss(rec, adv, aw);
            trace.autoencoder.push_back(checked("phase4", "autoencoder total", total));
            opt_autoencoder_.step(numkit::backward(graph, total));
        }

        epoch_ = it;
        if (cfg_.use_early_stopping && early_stop_due(it, total_iters, cfg_.early_stop)) {
            const auto synthetic = generate(bundle_, real_eval.samples, cfg_.window, eval_rng_);
            early_stop_evaluate(it, real_eval, synthetic, bundle_, es_, cfg_.early_stop);
        }
        if (on_phase4_iteration) on_phase4_iteration(it);
    }

    if (cfg_.use_early_stopping && es_.best_snapshot) {
        bundle_.restore(*es_.best_snapshot);
        synthetic_ = *es_.best_synthetic;
    } else {
        synthetic_ = generate(bundle_, train_.samples, cfg_.window, eval_rng_);
    }
    completed_ = 4;
    return trace;
}

TrainResult Trainer::run() {
    TrainResult result;
    result.phase1 = phase1();
    result.phase2 = phase2();
    result.phase3 = phase3();
    result.phase4 = phase4();
    result.synthetic = synthetic_;
    return result;
}

data::SeriesBatch generate(const nets::NetworkBundle& bundle, std::size_t count, std::size_t window,
                           numkit::Rng& rng) {
    if (count == 0) throw ContractError("generate: count must be positive");
    constexpr std::size_t kChunk = 256;
    data::SeriesBatch out(count, window, bundle.dims.features, true);
    numkit::NoGradGuard guard;
    for (std::size_t begin = 0; begin < count; begin += kChunk) {
        const std::size_t n = std::min(kChunk, count - begin);
        const Tensor z = data::sample_noise(n, window, bundle.dims.noise_dim, rng);
        const Tensor x = bundle.synthesize(z);
        std::copy(x.data().begin(), x.data().end(),
                  out.values.begin() + static_cast<long>(begin * window * bundle.dims.features));
    }
    return out;
}

}  // namespace seriesforge::training
