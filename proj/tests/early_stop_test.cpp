#include <gtest/gtest.h>

#include "seriesforge/training/early_stop.hpp"

using namespace seriesforge;
using namespace seriesforge::training;

TEST(EarlyStop, ScriptedSequence) {
    EarlyStopState state;
    const auto r1 = early_stop_record(state, 1000, {0.2, 0.06, 0.04});
    const auto r2 = early_stop_record(state, 1500, {0.3, 0.05, 0.05});
    const auto r3 = early_stop_record(state, 2000, {0.1, 0.05, 0.05});
    EXPECT_NEAR(r1.p1, 2.0, 1e-12);
    EXPECT_NEAR(r1.score, 0.4, 1e-12);
    EXPECT_NEAR(r2.score, 0.5, 1e-12);
    EXPECT_NEAR(r3.score, 0.3, 1e-12);
    EXPECT_TRUE(r1.saved);
    EXPECT_FALSE(r2.saved);
    EXPECT_TRUE(r3.saved);
    EXPECT_EQ(r2.p1, r1.p1);
    EXPECT_EQ(r3.p1, r1.p1);
    EXPECT_NEAR(*state.total_error, 0.3, 1e-12);
    EXPECT_EQ(state.log.size(), 3u);
    EXPECT_TRUE(state.warnings.empty());
}

TEST(EarlyStop, EqualScoreSaves) {
    EarlyStopState state;
    early_stop_record(state, 1, {0.2, 0.06, 0.04});
    const auto again = early_stop_record(state, 2, {0.2, 0.06, 0.04});
    EXPECT_TRUE(again.saved);
    EXPECT_EQ(state.best_epoch, 2u);
}

TEST(EarlyStop, WorseScoreLeavesTotalErrorAlone) {
    EarlyStopState state;
    early_stop_record(state, 1, {0.2, 0.06, 0.04});
    const auto worse = early_stop_record(state, 2, {0.3, 0.05, 0.05});
    EXPECT_FALSE(worse.saved);
    EXPECT_NEAR(*state.total_error, 0.4, 1e-12);
    EXPECT_EQ(state.best_epoch, 1u);
}

TEST(EarlyStop, ZeroDenominatorGivesZeroP1AndWarning) {
    EarlyStopState state;
    const auto r = early_stop_record(state, 5, {0.25, 0.0, 0.0});
    EXPECT_EQ(r.p1, 0.0);
    EXPECT_EQ(r.score, 0.25);
    EXPECT_TRUE(r.saved);
    ASSERT_EQ(state.warnings.size(), 1u);
    // Later nonzero moments do not reset p1.
    EXPECT_EQ(early_stop_record(state, 6, {0.1, 0.3, 0.3}).p1, 0.0);
}

TEST(EarlyStop, DueSchedule) {
    EarlyStopConfig cfg;  // interval 500, start half
    std::vector<std::size_t> due;
    for (std::size_t e = 1; e <= 2000; ++e) {
        if (early_stop_due(e, 2000, cfg)) due.push_back(e);
    }
    EXPECT_EQ(due, (std::vector<std::size_t>{1000, 1500, 2000}));
    cfg.check_interval = 250;
    cfg.start_fraction = 0.25;
    due.clear();
    for (std::size_t e = 1; e <= 1000; ++e) {
        if (early_stop_due(e, 1000, cfg)) due.push_back(e);
    }
    EXPECT_EQ(due, (std::vector<std::size_t>{250, 500, 750, 1000}));
}

TEST(EarlyStop, TotalErrorNonIncreasingOverSaves) {
    EarlyStopState state;
    numkit::Rng rng(3);
    double last = 1e300;
    for (std::size_t e = 1; e <= 40; ++e) {
        const auto r = early_stop_record(state, e, {rng.uniform(0, 0.5), rng.uniform(0, 0.1), rng.uniform(0, 0.1)});
        if (r.saved) {
            EXPECT_LE(r.score, last);
            last = r.score;
        }
        EXPECT_LE(*state.total_error, r.score);
    }
}

TEST(EarlyStop, LogIsOneJsonRecordPerLine) {
    EarlyStopState state;
    early_stop_record(state, 1000, {0.2, 0.06, 0.04});
    early_stop_record(state, 1500, {0.3, 0.05, 0.05});
    const auto text = early_stop_log_jsonl(state.log);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
    for (const char* key : {"\"epoch\"", "\"disScore\"", "\"mseMean\"", "\"mseSTD\"", "\"p1\"", "\"score\"", "\"saved\""}) {
        EXPECT_NE(text.find(key), std::string::npos) << key;
    }
    EXPECT_EQ(early_stop_log_jsonl({}), "");
}

TEST(EarlyStop, EvaluateKeepsSnapshotOnSave) {
    data::SineConfig sc;
    sc.samples = 40;
    const auto raw = data::generate_sines(sc);
    const auto real = data::scaler_apply(raw, data::scaler_fit(raw));
    nets::BundleDims dims = nets::BundleDims::defaults(5);
    dims.hidden_dim = 4;
    dims.num_layers = 1;
    numkit::Rng rng(1);
    const auto bundle = nets::NetworkBundle::init(dims, rng);
    numkit::Rng noise(2);
    const auto synthetic = data::SeriesBatch::from_tensor(bundle.synthesize(data::sample_noise(40, 24, 2, noise)), true);
    EarlyStopConfig cfg;
    cfg.quick_budget.steps = 20;
    EarlyStopState state;
    const auto rec = early_stop_evaluate(7, real, synthetic, bundle, state, cfg);
    EXPECT_TRUE(rec.saved);
    ASSERT_TRUE(state.best_snapshot.has_value());
    EXPECT_EQ(*state.best_snapshot, bundle.snapshot());
    EXPECT_EQ(*state.best_synthetic, synthetic);
    EXPECT_GE(rec.dis_score, 0.0);
    EXPECT_LE(rec.dis_score, 0.5);

    EarlyStopState again;
    EXPECT_EQ(early_stop_evaluate(7, real, synthetic, bundle, again, cfg), rec);
}
