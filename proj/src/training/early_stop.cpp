#include "seriesforge/training/early_stop.hpp"

#include <cmath>

#include "seriesforge/eval/scores.hpp"
#include "seriesforge/numkit/graph.hpp"

namespace seriesforge::training {

bool early_stop_due(std::size_t epoch, std::size_t total, const EarlyStopConfig& cfg) {
    const auto start = static_cast<std::size_t>(std::floor(cfg.start_fraction * static_cast<double>(total)));
    return epoch >= start && epoch % cfg.check_interval == 0;
}

double early_stop_score(double p1, const EarlyStopMetrics& m) { return m.dis_score + p1 * (m.mse_mean + m.mse_std); }

EarlyStopRecord early_stop_record(EarlyStopState& state, std::size_t epoch, const EarlyStopMetrics& m) {
    if (!state.p1) {
        const double denom = m.mse_mean + m.mse_std;
        if (denom == 0.0) {
            state.p1 = 0.0;
            state.warnings.push_back("epoch " + std::to_string(epoch) +
                                     ": mseMean + mseSTD is 0 at the first evaluation; p1 set to 0");
        } else {
            state.p1 = m.dis_score / denom;
        }
    }
    EarlyStopRecord rec;
    rec.epoch = epoch;
    rec.dis_score = m.dis_score;
    rec.mse_mean = m.mse_mean;
    rec.mse_std = m.mse_std;
    rec.p1 = *state.p1;
    rec.score = early_stop_score(*state.p1, m);
    rec.saved = !state.total_error || rec.score <= *state.total_error;
    if (rec.saved) {
        state.total_error = rec.score;
        state.best_epoch = epoch;
    }
    state.log.push_back(rec);
    return rec;
}

namespace {

void code_moments(const numkit::Tensor& codes, std::vector<double>& mean, std::vector<double>& var) {
    const std::size_t n = codes.dim(0);
    const std::size_t width = codes.size() / n;
    const auto v = codes.data();
    mean.assign(width, 0.0);
    var.assign(width, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < width; ++k) mean[k] += v[i * width + k];
    }
    for (double& m : mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < width; ++k) {
            const double d = v[i * width + k] - mean[k];
            var[k] += d * d;
        }
    }
    for (double& s : var) s /= static_cast<double>(n);
}

}  // namespace

EarlyStopMetrics early_stop_metrics(const data::SeriesBatch& real, const data::SeriesBatch& synthetic,
                                    const nets::Network& lossfn_encoder, const EarlyStopConfig& cfg) {
    EarlyStopMetrics m;
    numkit::Rng quick(cfg.quick_seed);
    m.dis_score = eval::discriminative_score(real, synthetic, cfg.quick_budget, quick);

    numkit::NoGradGuard no_grad;
    std::vector<double> mr, vr, ms, vs;
    code_moments(lossfn_encoder.forward(real.tensor()), mr, vr);
    code_moments(lossfn_encoder.forward(synthetic.tensor()), ms, vs);
    double se_mean = 0.0;
    double se_var = 0.0;
    for (std::size_t k = 0; k < mr.size(); ++k) {
        se_mean += (mr[k] - ms[k]) * (mr[k] - ms[k]);
        se_var += (vr[k] - vs[k]) * (vr[k] - vs[k]);
    }
    m.mse_mean = se_mean / static_cast<double>(mr.size());
    m.mse_std = std::sqrt(se_var / static_cast<double>(mr.size()));
    return m;
}

EarlyStopRecord early_stop_evaluate(std::size_t epoch, const data::SeriesBatch& real,
                                    const data::SeriesBatch& synthetic, const nets::NetworkBundle& current,
                                    EarlyStopState& state, const EarlyStopConfig& cfg) {
    const auto metrics = early_stop_metrics(real, synthetic, current.lossfn_encoder, cfg);
    const auto rec = early_stop_record(state, epoch, metrics);
    if (rec.saved) {
        state.best_synthetic = synthetic;
        state.best_snapshot = current.snapshot();
    }
    return rec;
}

std::string early_stop_log_jsonl(const std::vector<EarlyStopRecord>& log) {
    std::string out;
    for (const auto& r : log) {
        nlohmann::json j = {{"epoch", r.epoch}, {"disScore", r.dis_score}, {"mseMean", r.mse_mean},
                            {"mseSTD", r.mse_std}, {"p1", r.p1},           {"score", r.score},
                            {"saved", r.saved}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

}  // namespace seriesforge::training
