#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "seriesforge/eval/embedding.hpp"
#include "seriesforge/eval/scores.hpp"

namespace seriesforge::eval {

struct Summary {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, 0 for a single value
    std::vector<double> raw;
};

Summary summarize(std::vector<double> raw);

struct ReplicationScores {
    double discriminative = 0.0;
    double predictive = 0.0;
};

struct ReplicationSettings {
    std::size_t replications = 8;
    std::uint64_t base_seed = 0;
    // When set every replication uses this seed instead of base_seed + i.
    std::optional<std::uint64_t> fixed_seed;
    ScorerBudget discriminative_budget;
    ScorerBudget predictive_budget;
};

struct EvalReport {
    ReplicationSettings settings;
    Summary discriminative;
    Summary predictive;
    std::vector<Embedding> embeddings;
};

// Worker count for internal parallelism: SERIESFORGE_THREADS if set, else
// the hardware concurrency, never below 1.
std::size_t thread_cap();

// Calls run(seed) for each replication seed, possibly concurrently, and
// summarizes the results in replication order.
EvalReport run_replications(const ReplicationSettings& settings,
                            const std::function<ReplicationScores(std::uint64_t seed)>& run);

// Scores a fixed real/synthetic pair R times.
EvalReport run_replications(const data::SeriesBatch& real, const data::SeriesBatch& synthetic,
                            const ReplicationSettings& settings);

std::string report_json(const EvalReport& report);
void write_report(const EvalReport& report, const std::filesystem::path& path);
// Columns: method,label,c1,c2.
void write_embedding_csv(const Embedding& embedding, const std::filesystem::path& path);

}  // namespace seriesforge::eval
