#pragma once

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seriesforge/data/series.hpp"
#include "seriesforge/eval/embedding.hpp"
#include "seriesforge/eval/scores.hpp"
#include "seriesforge/training/config.hpp"

namespace seriesforge::cli {

// A dataset on disk. "samples" is the long sample_id,t,... layout; "series"
// is one long sequence cut into train.window-long windows every `stride` rows.
struct CsvSource {
    std::filesystem::path path;
    std::string layout = "samples";
    std::size_t stride = 1;
};

struct EvalSettings {
    std::size_t replications = 8;
    eval::ScorerBudget discriminative;
    eval::ScorerBudget predictive;
    // Samples per source fed to PCA and t-SNE (the first ones of each file).
    std::size_t embedding_samples = 500;
    double tsne_perplexity = 30.0;
    std::size_t tsne_iterations = 300;
};

// Schema (every section and key optional, unknown keys rejected):
//   {
//     "data": {"sines": {samples, steps, dims, freq_min, freq_max,
//                        phase_min, phase_max, seed}}
//           | {"csv": {path, layout: "samples"|"series", stride}},
//     "train": { ...TrainConfig keys... },
//     "evaluation": {replications, embedding_samples, tsne_perplexity,
//                    tsne_iterations,
//                    discriminative: {steps, batch_size, hidden_dim,
//                                     num_layers, learning_rate},
//                    predictive: {...same keys...}},
//     "generate": {count},
//     "out": "directory"
//   }
// Without a data section the source is the default Sines generator.
struct RunConfig {
    std::optional<data::SineConfig> sines;
    std::optional<CsvSource> csv;
    training::TrainConfig train;
    EvalSettings evaluation;
    std::size_t count = 1000;  // samples drawn by generate
    std::filesystem::path out = "out";

    // ConfigError unless exactly one data source is set and all parts are valid.
    void validate() const;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);
// Missing file: IoError. Malformed JSON or schema violations: ConfigError.
RunConfig load_run_config(const std::filesystem::path& path);

// Turns off the component named by an --ablate value. Accepts
// supervised, dual-disc, ts-loss, early-stop and their "no-" spellings.
void apply_ablation(training::TrainConfig& cfg, std::string_view name);

// The configured dataset, unscaled.
data::SeriesBatch load_dataset(const RunConfig& cfg);

}  // namespace seriesforge::cli
