#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "seriesforge/data/series.hpp"
#include "seriesforge/error.hpp"
#include "seriesforge/eval/embedding.hpp"
#include "seriesforge/eval/report.hpp"
#include "seriesforge/eval/scores.hpp"

using namespace seriesforge;
using namespace seriesforge::eval;
using data::SeriesBatch;
using numkit::Rng;

namespace {

SeriesBatch scaled_sines(std::size_t n, std::uint64_t seed) {
    data::SineConfig cfg;
    cfg.samples = n;
    cfg.seed = seed;
    const auto raw = data::generate_sines(cfg);
    return data::scaler_apply(raw, data::scaler_fit(raw));
}

SeriesBatch constant(std::size_t n, std::size_t t, std::size_t f, double v) {
    SeriesBatch b(n, t, f, true);
    std::fill(b.values.begin(), b.values.end(), v);
    return b;
}

}  // namespace

TEST(Discriminative, HalvesOfOneDatasetAreIndistinguishable) {
    const auto all = scaled_sines(1000, 3);
    Rng rng(1);
    const double s = discriminative_score(all.slice(0, 500), all.slice(500, 1000), {}, rng);
    EXPECT_LE(s, 0.15);
    EXPECT_GE(s, 0.0);
}

TEST(Discriminative, ConstantZerosVersusOnesAreSeparable) {
    Rng rng(2);
    EXPECT_GE(discriminative_score(constant(200, 24, 5, 0.0), constant(200, 24, 5, 1.0), {}, rng), 0.45);
}

TEST(Discriminative, ZeroBudgetIsChance) {
    Rng rng(3);
    ScorerBudget none;
    none.steps = 0;
    EXPECT_EQ(discriminative_score(constant(50, 6, 2, 0.0), constant(50, 6, 2, 1.0), none, rng), 0.0);
}

TEST(Discriminative, DeterministicAndValidated) {
    const auto a = scaled_sines(60, 4);
    const auto b = scaled_sines(60, 5);
    ScorerBudget small;
    small.steps = 50;
    Rng r1(9), r2(9);
    EXPECT_EQ(discriminative_score(a, b, small, r1), discriminative_score(a, b, small, r2));
    Rng r3(9);
    EXPECT_THROW(discriminative_score(a.slice(0, 9), b, small, r3), ContractError);
}

// Swapping which side is called real only relabels the classes; over a few
// seeds the two orderings give the same separability within noise.
TEST(Discriminative, LabelSwapIsStatisticallySymmetric) {
    const auto a = scaled_sines(200, 6);
    const auto zeros = constant(200, 24, 5, 0.2);
    const ScorerBudget small;
    double ab = 0.0, ba = 0.0;
    for (std::uint64_t s = 0; s < 3; ++s) {
        Rng r1(s), r2(s);
        ab += discriminative_score(a, zeros, small, r1) / 3.0;
        ba += discriminative_score(zeros, a, small, r2) / 3.0;
    }
    EXPECT_NEAR(ab, ba, 0.1);
}

TEST(Predictive, ConstantsAreLearnable) {
    Rng rng(4);
    const auto c = constant(100, 12, 3, 0.3);
    EXPECT_LT(predictive_score(c, c, {}, rng), 0.05);
}

TEST(Predictive, HalfDataWithUntrainedPredictorIsExact) {
    Rng rng(5);
    ScorerBudget none;
    none.steps = 0;
    const auto c = constant(20, 6, 2, 0.5);
    EXPECT_EQ(predictive_score(c, c, none, rng), 0.0);
}

TEST(Predictive, DistributionShiftGivesLargeError) {
    Rng rng(6);
    EXPECT_GE(predictive_score(constant(100, 12, 3, 1.0), constant(100, 12, 3, 0.0), {}, rng), 0.8);
    Rng r2(6);
    EXPECT_THROW(predictive_score(constant(20, 1, 3, 1.0), constant(20, 1, 3, 0.0), {}, r2), ContractError);
}

TEST(Pca, RankTwoDataReconstructsExactly) {
    const std::size_t n = 40, dim = 6;
    Rng rng(7);
    std::vector<double> basis(2 * dim), offset(dim), rows(n * dim);
    for (auto& v : basis) v = rng.uniform(-1, 1);
    for (auto& v : offset) v = rng.uniform(-3, 3);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
        for (std::size_t d = 0; d < dim; ++d) rows[i * dim + d] = offset[d] + a * basis[d] + b * basis[dim + d];
    }
    const auto model = pca_fit(rows, n, dim);
    const auto coords = model.project(rows);
    const auto back = model.reconstruct(coords);
    for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_NEAR(back[i], rows[i], 1e-8);

    double mx = 0.0, my = 0.0, vx = 0.0, vy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += coords[2 * i] / n;
        my += coords[2 * i + 1] / n;
    }
    for (std::size_t i = 0; i < n; ++i) {
        vx += coords[2 * i] * coords[2 * i];
        vy += coords[2 * i + 1] * coords[2 * i + 1];
    }
    EXPECT_NEAR(mx, 0.0, 1e-10);
    EXPECT_NEAR(my, 0.0, 1e-10);
    EXPECT_GE(vx, vy);
    EXPECT_TRUE(std::is_sorted(model.spectrum.rbegin(), model.spectrum.rend()));
}

TEST(Pca, SignConventionAndOrthonormality) {
    const auto real = scaled_sines(30, 8);
    const auto e = pca_project(real, scaled_sines(30, 9));
    EXPECT_EQ(e.rows(), 60u);
    EXPECT_EQ(e.labels.front(), Source::Real);
    EXPECT_EQ(e.labels.back(), Source::Synthetic);
    const auto rows = pooled_rows(real, scaled_sines(30, 9));
    const auto model = pca_fit(rows, 60, 120);
    for (int c = 0; c < 2; ++c) {
        double norm = 0.0, big = 0.0;
        for (std::size_t d = 0; d < 120; ++d) {
            const double v = model.components[c * 120 + d];
            norm += v * v;
            if (std::fabs(v) > std::fabs(big)) big = v;
        }
        EXPECT_NEAR(norm, 1.0, 1e-12);
        EXPECT_GT(big, 0.0);
    }
    double cross = 0.0;
    for (std::size_t d = 0; d < 120; ++d) cross += model.components[d] * model.components[120 + d];
    EXPECT_NEAR(cross, 0.0, 1e-12);
}

TEST(Pca, SpectrumInvariantUnderRotation) {
    const std::size_t n = 25, dim = 4;
    Rng rng(10);
    std::vector<double> rows(n * dim);
    for (auto& v : rows) v = rng.uniform(-1, 1);
    // Product of two plane rotations.
    const double a = 0.7, b = -1.3;
    std::vector<double> rotated(rows.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = &rows[i * dim];
        double* o = &rotated[i * dim];
        o[0] = std::cos(a) * r[0] - std::sin(a) * r[1];
        o[1] = std::sin(a) * r[0] + std::cos(a) * r[1];
        o[2] = std::cos(b) * r[2] - std::sin(b) * r[3];
        o[3] = std::sin(b) * r[2] + std::cos(b) * r[3];
    }
    const auto s1 = pca_fit(rows, n, dim).spectrum;
    const auto s2 = pca_fit(rotated, n, dim).spectrum;
    ASSERT_EQ(s1.size(), s2.size());
    for (std::size_t i = 0; i < s1.size(); ++i) EXPECT_NEAR(s1[i], s2[i], 1e-8);
}

TEST(Pca, IdenticalSamplesAreDegenerate) {
    std::vector<double> rows(5 * 3, 0.25);
    try {
        pca_fit(rows, 5, 3);
        FAIL() << "expected a degenerate-covariance error";
    } catch (const ContractError& e) {
        EXPECT_NE(std::string(e.what()).find("degenerate covariance"), std::string::npos);
    }
}

TEST(Tsne, ShapeFinitenessAndProgress) {
    const auto real = scaled_sines(60, 11);
    const auto syn = scaled_sines(60, 12);
    const auto rows = pooled_rows(real, syn);
    Rng rng(13);
    const auto r = tsne(rows, 120, 120, {}, rng);
    ASSERT_EQ(r.coords.size(), 240u);
    for (double v : r.coords) EXPECT_TRUE(std::isfinite(v));
    ASSERT_EQ(r.kl_trace.size(), 300u);
    EXPECT_LE(r.kl_trace[299], r.kl_trace[29]);

    Rng a(14), b(14);
    TsneConfig quick;
    quick.iterations = 60;
    EXPECT_EQ(tsne(rows, 120, 120, quick, a).coords, tsne(rows, 120, 120, quick, b).coords);
}

TEST(Tsne, SeparatedBlobsStaySeparated) {
    const std::size_t per = 60;
    Rng rng(15);
    SeriesBatch a(per, 2, 5), b(per, 2, 5);
    for (auto& v : a.values) v = rng.normal() * 0.1;
    for (auto& v : b.values) v = 5.0 + rng.normal() * 0.1;
    Rng r(16);
    const auto e = tsne_project(a, b, {}, r);
    ASSERT_EQ(e.rows(), 2 * per);
    // Nearest-centroid rule in 2-D is a linear classifier.
    double c[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t i = 0; i < e.rows(); ++i) {
        const int k = e.labels[i] == Source::Real ? 0 : 1;
        c[k][0] += e.x(i) / per;
        c[k][1] += e.y(i) / per;
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < e.rows(); ++i) {
        const double d0 = std::hypot(e.x(i) - c[0][0], e.y(i) - c[0][1]);
        const double d1 = std::hypot(e.x(i) - c[1][0], e.y(i) - c[1][1]);
        const Source guess = d0 <= d1 ? Source::Real : Source::Synthetic;
        if (guess == e.labels[i]) ++correct;
    }
    EXPECT_GE(static_cast<double>(correct) / e.rows(), 0.95);
}

TEST(Tsne, PerplexityTooLargeIsContractError) {
    std::vector<double> rows(20 * 3, 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<double>(i % 7);
    Rng rng(1);
    EXPECT_THROW(tsne(rows, 20, 3, {}, rng), ContractError);
}

TEST(Replications, SummaryRules) {
    const auto one = summarize({0.3});
    EXPECT_EQ(one.mean, 0.3);
    EXPECT_EQ(one.std, 0.0);
    const auto two = summarize({1.0, 3.0});
    EXPECT_EQ(two.mean, 2.0);
    EXPECT_NEAR(two.std, std::sqrt(2.0), 1e-15);
    EXPECT_THROW(summarize({}), ContractError);
}

TEST(Replications, FixedSeedGivesZeroSpreadAndMeanWithinRaws) {
    const auto real = scaled_sines(40, 17);
    const auto syn = scaled_sines(40, 18);
    ReplicationSettings s;
    s.replications = 3;
    s.discriminative_budget.steps = 30;
    s.predictive_budget.steps = 30;
    s.fixed_seed = 4;
    const auto fixed = run_replications(real, syn, s);
    EXPECT_EQ(fixed.discriminative.std, 0.0);
    EXPECT_EQ(fixed.predictive.std, 0.0);

    s.fixed_seed.reset();
    s.replications = 8;
    const auto varied = run_replications(real, syn, s);
    ASSERT_EQ(varied.discriminative.raw.size(), 8u);
    const auto [lo, hi] = std::minmax_element(varied.predictive.raw.begin(), varied.predictive.raw.end());
    EXPECT_GE(varied.predictive.mean, *lo);
    EXPECT_LE(varied.predictive.mean, *hi);

    std::vector<std::uint64_t> seen;
    ReplicationSettings t;
    t.replications = 4;
    t.base_seed = 10;
    run_replications(t, [&](std::uint64_t seed) {
        static std::mutex m;
        std::lock_guard lock(m);
        seen.push_back(seed);
        return ReplicationScores{0.1, 0.2};
    });
    std::sort(seen.begin(), seen.end());
    EXPECT_EQ(seen, (std::vector<std::uint64_t>{10, 11, 12, 13}));
}

TEST(Replications, ReportJsonHasMeanAndStd) {
    EvalReport r;
    r.settings.replications = 2;
    r.discriminative = summarize({0.1, 0.2});
    r.predictive = summarize({0.3, 0.3});
    const std::string j = report_json(r);
    EXPECT_NE(j.find("\"mean\""), std::string::npos);
    EXPECT_NE(j.find("\"std\""), std::string::npos);
    EXPECT_NE(j.find("\"raw\""), std::string::npos);
}
