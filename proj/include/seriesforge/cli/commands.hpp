#pragma once

#include <exception>
#include <filesystem>
#include <ostream>

#include "seriesforge/cli/run_config.hpp"
#include "seriesforge/eval/report.hpp"
#include "seriesforge/training/trainer.hpp"

namespace seriesforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitTraining = 3;
inline constexpr int kExitCorruption = 4;

// File names written into RunConfig::out.
inline constexpr const char* kSinesFile = "sines.csv";
inline constexpr const char* kCheckpointFile = "checkpoint.bin";
inline constexpr const char* kEarlyStopLogFile = "early_stop_log.jsonl";
inline constexpr const char* kSyntheticFile = "synthetic.csv";
inline constexpr const char* kMetricsFile = "metrics.json";
inline constexpr const char* kGeneratedFile = "generated.csv";
inline constexpr const char* kReportFile = "report.json";
inline constexpr const char* kPcaFile = "pca.csv";
inline constexpr const char* kTsneFile = "tsne.csv";

// Writes the configured Sines set as CSV and prints N, T, F.
std::filesystem::path cmd_sines(const RunConfig& cfg, std::ostream& log);

// Trains on the configured dataset and writes the checkpoint, the early-stop
// log, the selected synthetic set (original scale) and a metrics file.
training::TrainResult cmd_train(const RunConfig& cfg, std::ostream& log);

// Draws cfg.count samples from a checkpoint using cfg.train.seed, in the
// training data's scale.
data::SeriesBatch cmd_generate(const RunConfig& cfg, const std::filesystem::path& checkpoint, std::ostream& log);

// Scores a synthetic CSV against a real one and writes the report and the
// PCA and t-SNE coordinates. Replication seeds start at cfg.train.seed.
eval::EvalReport cmd_evaluate(const RunConfig& cfg, const std::filesystem::path& real,
                              const std::filesystem::path& synthetic, std::ostream& log);

// Maps a failure to the process exit code.
int exit_code_for(const std::exception& e) noexcept;

// Full command-line entry point.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace seriesforge::cli
