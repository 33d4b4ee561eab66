#include "seriesforge/eval/report.hpp"

#include <json.hpp>

#include <atomic>
#include <charconv>
#include <cstring>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include "seriesforge/error.hpp"

namespace seriesforge::eval {

Summary summarize(std::vector<double> raw) {
    if (raw.empty()) throw ContractError("summarize: no values");
    Summary s;
    const double n = static_cast<double>(raw.size());
    s.mean = std::accumulate(raw.begin(), raw.end(), 0.0) / n;
    if (raw.size() > 1) {
        double ss = 0.0;
        for (double v : raw) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / (n - 1.0));
    }
    s.raw = std::move(raw);
    return s;
}

std::size_t thread_cap() {
    if (const char* env = std::getenv("SERIESFORGE_THREADS")) {
        std::size_t v = 0;
        const char* end = env + std::strlen(env);
        auto [ptr, ec] = std::from_chars(env, end, v);
        if (ec == std::errc{} && ptr == end && v > 0) return v;
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

EvalReport run_replications(const ReplicationSettings& settings,
                            const std::function<ReplicationScores(std::uint64_t seed)>& run) {
    if (settings.replications == 0) throw ContractError("run_replications: need at least one replication");
    const std::size_t r = settings.replications;
    std::vector<ReplicationScores> results(r);
    std::vector<std::exception_ptr> errors(r);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < r; i = next++) {
            const std::uint64_t seed = settings.fixed_seed ? *settings.fixed_seed : settings.base_seed + i;
            try {
                results[i] = run(seed);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::min(thread_cap(), r);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    EvalReport report;
    report.settings = settings;
    std::vector<double> dis(r);
    std::vector<double> pred(r);
    for (std::size_t i = 0; i < r; ++i) {
        dis[i] = results[i].discriminative;
        pred[i] = results[i].predictive;
    }
    report.discriminative = summarize(std::move(dis));
    report.predictive = summarize(std::move(pred));
    return report;
}

EvalReport run_replications(const data::SeriesBatch& real, const data::SeriesBatch& synthetic,
                            const ReplicationSettings& settings) {
    return run_replications(settings, [&](std::uint64_t seed) {
        numkit::Rng rng(seed);
        ReplicationScores s;
        s.discriminative = discriminative_score(real, synthetic, settings.discriminative_budget, rng);
        s.predictive = predictive_score(real, synthetic, settings.predictive_budget, rng);
        return s;
    });
}

namespace {

nlohmann::json budget_json(const ScorerBudget& b) {
    return {{"steps", b.steps},
            {"batch_size", b.batch_size},
            {"hidden_dim", b.hidden_dim},
            {"num_layers", b.num_layers},
            {"learning_rate", b.learning_rate}};
}

nlohmann::json summary_json(const Summary& s) { return {{"mean", s.mean}, {"std", s.std}, {"raw", s.raw}}; }

const char* label_name(Source s) { return s == Source::Real ? "real" : "synthetic"; }

}  // namespace

std::string report_json(const EvalReport& report) {
    nlohmann::json j;
    j["replications"] = report.settings.replications;
    j["base_seed"] = report.settings.base_seed;
    if (report.settings.fixed_seed) j["fixed_seed"] = *report.settings.fixed_seed;
    j["discriminative_budget"] = budget_json(report.settings.discriminative_budget);
    j["predictive_budget"] = budget_json(report.settings.predictive_budget);
    j["discriminative"] = summary_json(report.discriminative);
    j["predictive"] = summary_json(report.predictive);
    j["embeddings"] = nlohmann::json::array();
    for (const auto& e : report.embeddings) {
        nlohmann::json points = nlohmann::json::array();
        nlohmann::json labels = nlohmann::json::array();
        for (std::size_t i = 0; i < e.rows(); ++i) {
            points.push_back({e.x(i), e.y(i)});
            labels.push_back(label_name(e.labels[i]));
        }
        j["embeddings"].push_back({{"method", e.method}, {"points", points}, {"labels", labels}});
    }
    return j.dump(2) + "\n";
}

void write_report(const EvalReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << report_json(report);
    if (!out) throw IoError("write failed: " + path.string());
}

void write_embedding_csv(const Embedding& embedding, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "method,label,c1,c2\n";
    char buf[64];
    for (std::size_t i = 0; i < embedding.rows(); ++i) {
        out << embedding.method << ',' << label_name(embedding.labels[i]);
        for (double v : {embedding.x(i), embedding.y(i)}) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
            out << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace seriesforge::eval
