// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "seriesforge/cli/commands.hpp"
#include "seriesforge/data/series.hpp"
#include "seriesforge/eval/embedding.hpp"
#include "seriesforge/eval/scores.hpp"
#include "seriesforge/training/early_stop.hpp"
#include "seriesforge/training/trainer.hpp"
#include "support/suites.hpp"

using namespace seriesforge;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int n, const char* title, const std::function<Outcome()>& check) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %d %s: %s (%s; %.1f s)\n", n, title, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

data::SeriesBatch sines(std::size_t samples, std::uint64_t seed) {
    data::SineConfig sc;
    sc.samples = samples;
    sc.seed = seed;
    return data::generate_sines(sc);
}

data::SeriesBatch scaled_sines(std::size_t samples, std::uint64_t seed) {
    const auto raw = sines(samples, seed);
    return data::scaler_apply(raw, data::scaler_fit(raw));
}

// The desk-scale configuration used for the quality criteria.
training::TrainConfig desk_config(std::uint64_t seed) {
    training::TrainConfig cfg;
    cfg.seed = seed;
    cfg.hidden_dim = 16;
    cfg.num_layers = 2;
    cfg.latent_dim = 8;
    cfg.code_dim = 10;
    cfg.epochs = {2000, 2000, 2000, 4000};
    cfg.learning_rates = {1e-2, 1e-2, 1e-2, 3e-3, 3e-3};
    cfg.early_stop.check_interval = 500;
    return cfg;
}

// Scorer results averaged over a few classifier seeds.
double disc(const data::SeriesBatch& real, const data::SeriesBatch& synthetic, std::uint64_t seed) {
    std::vector<double> v;
    for (std::uint64_t k = 0; k < 3; ++k) {
        numkit::Rng rng(seed * 100 + k);
        v.push_back(eval::discriminative_score(real, synthetic, eval::ScorerBudget{}, rng));
    }
    return mean(v);
}

double pred(const data::SeriesBatch& real, const data::SeriesBatch& synthetic, std::uint64_t seed) {
    std::vector<double> v;
    for (std::uint64_t k = 0; k < 3; ++k) {
        numkit::Rng rng(seed * 100 + 50 + k);
        v.push_back(eval::predictive_score(real, synthetic, eval::ScorerBudget{}, rng));
    }
    return mean(v);
}

Outcome gradients() {
    std::vector<testing::GradCase> cases = testing::primitive_cases();
    for (auto& c : testing::gru_cases()) cases.push_back(c);
    for (auto& c : testing::loss_cases()) cases.push_back(c);
    double worst = 0.0;
    std::string worst_name;
    for (const auto& c : cases) {
        const auto r = testing::run_grad_case(c, 10, 2024);
        if (r.max_error >= worst) {
            worst = r.max_error;
            worst_name = c.name;
        }
    }
    return {worst <= 1e-4, std::to_string(cases.size()) + " cases x 10 instances, worst " + fmt("%.2e", worst) +
                               " in " + worst_name};
}

Outcome identities() {
    double worst = 0.0;
    std::size_t count = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        for (const auto& r : testing::loss_identities(seed)) {
            worst = std::max(worst, std::fabs(r.value));
            ++count;
        }
    }
    return {worst <= 1e-12, std::to_string(count) + " identity evaluations, worst " + fmt("%.2e", worst)};
}

Outcome algorithm1() {
    training::EarlyStopState state;
    const auto r1 = training::early_stop_record(state, 1, {0.2, 0.06, 0.04});
    const auto r2 = training::early_stop_record(state, 2, {0.3, 0.05, 0.05});
    const auto r3 = training::early_stop_record(state, 3, {0.1, 0.05, 0.05});
    const bool ok = std::fabs(r1.p1 - 2.0) <= 1e-12 && r2.p1 == r1.p1 && r3.p1 == r1.p1 &&
                    std::fabs(r1.score - 0.4) <= 1e-12 && std::fabs(r2.score - 0.5) <= 1e-12 &&
                    std::fabs(r3.score - 0.3) <= 1e-12 && r1.saved && !r2.saved && r3.saved;
    std::ostringstream d;
    d << "p1 " << r1.p1 << ", scores " << r1.score << " " << r2.score << " " << r3.score << ", saved " << r1.saved
      << r2.saved << r3.saved;
    return {ok, d.str()};
}

Outcome autoencoders() {
    const auto t0 = Clock::now();
    auto cfg = desk_config(0);
    training::Trainer t(cfg, scaled_sines(500, 1));
    const auto p1 = t.phase1();
    const auto p2 = t.phase2();
    const double r1 = p1.back() / p1.front();
    const double r2 = p2.reconstruction.back() / p2.reconstruction.front();
    const double secs = seconds_since(t0);
    return {r1 < 0.2 && r2 < 0.2 && p1.size() <= 2000 && p2.reconstruction.size() <= 2000 && secs <= 300,
            "phase 1 final/initial " + fmt("%.4f", r1) + ", phase 2 " + fmt("%.4f", r2) + ", " + fmt("%.0f", secs) +
                " s"};
}

// Runs shared by criteria 5 to 7.
struct SeedRuns {
    double disc_trained = 0.0;
    double disc_untrained = 0.0;
    double pred_trained = 0.0;
    double pred_real = 0.0;
    double saved_score = 0.0;
    double disabled_final_score = 0.0;
    double disc_no_supervised = 0.0;
    double seconds_main = 0.0;
    double seconds_ablations = 0.0;
};

std::vector<SeedRuns> quality_runs() {
    const auto real = scaled_sines(500, 1);
    const auto raw_holdout = sines(500, 2);
    const auto holdout = data::scaler_apply(raw_holdout, data::scaler_fit(sines(500, 1)));
    std::vector<SeedRuns> out;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        SeedRuns s;
        auto t0 = Clock::now();
        const auto cfg = desk_config(seed);
        training::Trainer full(cfg, real);
        const auto result = full.run();
        s.disc_trained = disc(real, result.synthetic, seed);
        s.pred_trained = pred(real, result.synthetic, seed);
        const double p1 = full.early_stop().p1.value_or(0.0);
        s.saved_score = full.early_stop().total_error.value_or(std::nan(""));
        {
            training::Trainer untrained(cfg, real);
            numkit::Rng rng(seed + 77);
            s.disc_untrained = disc(real, training::generate(untrained.bundle(), real.samples, cfg.window, rng), seed);
        }
        s.pred_real = pred(real, holdout, seed);
        s.seconds_main = seconds_since(t0);

        t0 = Clock::now();
        auto no_stop = cfg;
        no_stop.use_early_stopping = false;
        training::Trainer disabled(no_stop, real);
        disabled.run();
        const auto m = training::early_stop_metrics(real, disabled.final_synthetic(), disabled.bundle().lossfn_encoder,
                                                    cfg.early_stop);
        s.disabled_final_score = training::early_stop_score(p1, m);

        auto no_sup = cfg;
        no_sup.use_supervised_loss = false;
        training::Trainer ablated(no_sup, real);
        s.disc_no_supervised = disc(real, ablated.run().synthetic, seed);
        s.seconds_ablations = seconds_since(t0);

        std::printf("  seed %llu: disc %.4f (untrained %.4f), pred %.4f (real baseline %.4f), saved score %.4f, "
                    "disabled final %.4f, disc without supervised loss %.4f, %.0f s + %.0f s\n",
                    static_cast<unsigned long long>(seed), s.disc_trained, s.disc_untrained, s.pred_trained,
                    s.pred_real, s.saved_score, s.disabled_final_score, s.disc_no_supervised, s.seconds_main,
                    s.seconds_ablations);
        std::fflush(stdout);
        out.push_back(s);
    }
    return out;
}

template <class F>
std::vector<double> field(const std::vector<SeedRuns>& runs, F f) {
    std::vector<double> v;
    for (const auto& r : runs) v.push_back(f(r));
    return v;
}

Outcome quality(const std::vector<SeedRuns>& runs) {
    const double d = mean(field(runs, [](const SeedRuns& r) { return r.disc_trained; }));
    const double u = mean(field(runs, [](const SeedRuns& r) { return r.disc_untrained; }));
    double slowest = 0.0;
    for (const auto& r : runs) slowest = std::max(slowest, r.seconds_main);
    return {d <= 0.35 && d < u && slowest <= 1800,
            "mean disc " + fmt("%.4f", d) + " (need <= 0.35), untrained " + fmt("%.4f", u) + ", slowest seed " +
                fmt("%.0f", slowest) + " s"};
}

Outcome utility(const std::vector<SeedRuns>& runs) {
    const double p = mean(field(runs, [](const SeedRuns& r) { return r.pred_trained; }));
    const double b = mean(field(runs, [](const SeedRuns& r) { return r.pred_real; }));
    return {p <= 0.30 && std::fabs(p - b) <= 0.10,
            "mean pred " + fmt("%.4f", p) + " (need <= 0.30), train-on-real " + fmt("%.4f", b)};
}

Outcome ablations(const std::vector<SeedRuns>& runs) {
    const double saved = mean(field(runs, [](const SeedRuns& r) { return r.saved_score; }));
    const double final_score = mean(field(runs, [](const SeedRuns& r) { return r.disabled_final_score; }));
    const double with_sup = mean(field(runs, [](const SeedRuns& r) { return r.disc_trained; }));
    const double without_sup = mean(field(runs, [](const SeedRuns& r) { return r.disc_no_supervised; }));
    double main_time = 0.0, ablation_time = 0.0;
    for (const auto& r : runs) {
        main_time += r.seconds_main;
        ablation_time += r.seconds_ablations;
    }
    return {saved <= final_score && without_sup >= with_sup && ablation_time <= 3.0 * main_time,
            "saved score " + fmt("%.4f", saved) + " vs disabled final " + fmt("%.4f", final_score) +
                ", disc with/without supervised loss " + fmt("%.4f", with_sup) + "/" + fmt("%.4f", without_sup)};
}

Outcome metric_sanity() {
    const auto both = scaled_sines(1000, 3);
    const double halves = disc(both.slice(0, 500), both.slice(500, 1000), 1);

    data::SeriesBatch zeros(200, 24, 5, true), ones(200, 24, 5, true);
    std::fill(ones.values.begin(), ones.values.end(), 1.0);
    const double constants = disc(zeros, ones, 2);

    const std::size_t n = 50, dim = 8;
    numkit::Rng rng(4);
    std::vector<double> basis(2 * dim), offset(dim), rows(n * dim);
    for (auto& v : basis) v = rng.uniform(-1, 1);
    for (auto& v : offset) v = rng.uniform(-3, 3);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
        for (std::size_t d = 0; d < dim; ++d) rows[i * dim + d] = offset[d] + a * basis[d] + b * basis[dim + d];
    }
    const auto model = eval::pca_fit(rows, n, dim);
    const auto back = model.reconstruct(model.project(rows));
    double pca_err = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) pca_err = std::max(pca_err, std::fabs(back[i] - rows[i]));

    const auto pooled = scaled_sines(120, 5);
    numkit::Rng trng(6);
    const auto ts = eval::tsne(pooled.values, pooled.samples, pooled.steps * pooled.features, {}, trng);
    const double kl30 = ts.kl_trace.at(29), kl300 = ts.kl_trace.at(299);

    return {halves <= 0.15 && constants >= 0.45 && pca_err <= 1e-8 && kl300 <= kl30,
            "halves " + fmt("%.4f", halves) + ", zeros vs ones " + fmt("%.4f", constants) + ", PCA error " +
                fmt("%.2e", pca_err) + ", KL " + fmt("%.4f", kl30) + " -> " + fmt("%.4f", kl300)};
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    std::string logs[2], metrics[2];
    for (int k = 0; k < 2; ++k) {
        cli::RunConfig cfg;
        data::SineConfig sc;
        sc.samples = 100;
        cfg.sines = sc;
        cfg.train.seed = 21;
        cfg.train.hidden_dim = 8;
        cfg.train.num_layers = 1;
        cfg.train.epochs = {100, 100, 100, 200};
        cfg.train.early_stop.check_interval = 25;
        cfg.out = fs::temp_directory_path() / ("seriesforge_acceptance_det" + std::to_string(k));
        fs::remove_all(cfg.out);
        std::ostringstream sink;
        cli::cmd_train(cfg, sink);
        logs[k] = read_file(cfg.out / cli::kEarlyStopLogFile);
        metrics[k] = read_file(cfg.out / cli::kMetricsFile);
    }
    const auto lines = std::count(logs[0].begin(), logs[0].end(), '\n');
    return {!logs[0].empty() && logs[0] == logs[1] && metrics[0] == metrics[1],
            std::to_string(lines) + " log records, logs " + (logs[0] == logs[1] ? "identical" : "differ") +
                ", metrics " + (metrics[0] == metrics[1] ? "identical" : "differ")};
}

}  // namespace

int main() {
    report(1, "gradient correctness", gradients);
    report(2, "loss identities", identities);
    report(3, "early-stopping rule", algorithm1);
    report(4, "autoencoder learning", autoencoders);

    std::vector<SeedRuns> runs;
    std::string run_error;
    try {
        runs = quality_runs();
    } catch (const std::exception& e) {
        run_error = e.what();
    }
    auto guarded = [&](const std::function<Outcome(const std::vector<SeedRuns>&)>& f) {
        return [&, f]() -> Outcome {
            if (runs.empty()) return {false, "desk runs failed: " + run_error};
            return f(runs);
        };
    };
    report(5, "end-to-end quality", guarded(quality));
    report(6, "predictive utility", guarded(utility));
    report(7, "ablation direction", guarded(ablations));
    report(8, "metric sanity", metric_sanity);
    report(9, "determinism", determinism);

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
