#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "seriesforge/data/series.hpp"
#include "seriesforge/nets/bundle.hpp"
#include "seriesforge/training/config.hpp"

namespace seriesforge::training {

struct EarlyStopRecord {
    std::size_t epoch = 0;
    double dis_score = 0.0;
    double mse_mean = 0.0;
    double mse_std = 0.0;
    double p1 = 0.0;
    double score = 0.0;
    bool saved = false;

    friend bool operator==(const EarlyStopRecord&, const EarlyStopRecord&) = default;
};

struct EarlyStopState {
    std::optional<double> p1;
    std::optional<double> total_error;
    std::optional<data::SeriesBatch> best_synthetic;
    std::optional<nets::NamedArrays> best_snapshot;
    std::size_t best_epoch = 0;
    std::vector<EarlyStopRecord> log;
    std::vector<std::string> warnings;
};

struct EarlyStopMetrics {
    double dis_score = 0.0;
    double mse_mean = 0.0;
    double mse_std = 0.0;
};

// Whether completed iteration `epoch` (1-based) of a phase-4 run of
// `total` iterations is an evaluation point.
bool early_stop_due(std::size_t epoch, std::size_t total, const EarlyStopConfig& cfg);

// The scoring rule alone: fixes p1 on the first call, computes the score and
// decides whether it is a new best. Appends and returns the log record.
EarlyStopRecord early_stop_record(EarlyStopState& state, std::size_t epoch, const EarlyStopMetrics& metrics);

// score = dis + p1 * (mse_mean + mse_std)
double early_stop_score(double p1, const EarlyStopMetrics& metrics);

// Quick discriminative score of real vs synthetic plus the moment MSEs of
// their loss-function encoder codes.
EarlyStopMetrics early_stop_metrics(const data::SeriesBatch& real, const data::SeriesBatch& synthetic,
                                    const nets::Network& lossfn_encoder, const EarlyStopConfig& cfg);

// Computes the metrics, records them, and on a save keeps `synthetic` and a
// snapshot of `current`.
EarlyStopRecord early_stop_evaluate(std::size_t epoch, const data::SeriesBatch& real,
                                    const data::SeriesBatch& synthetic, const nets::NetworkBundle& current,
                                    EarlyStopState& state, const EarlyStopConfig& cfg);

std::string early_stop_log_jsonl(const std::vector<EarlyStopRecord>& log);

}  // namespace seriesforge::training
