#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "seriesforge/numkit/rng.hpp"
#include "seriesforge/numkit/tensor.hpp"

namespace seriesforge::data {

// N samples x T timestamps x F features, row-major.
struct SeriesBatch {
    std::size_t samples = 0;
    std::size_t steps = 0;
    std::size_t features = 0;
    std::vector<double> values;
    bool scaled = false;

    SeriesBatch() = default;
    SeriesBatch(std::size_t n, std::size_t t, std::size_t f, bool is_scaled = false)
        : samples(n), steps(t), features(f), values(n * t * f, 0.0), scaled(is_scaled) {}

    double& at(std::size_t n, std::size_t t, std::size_t f) { return values[(n * steps + t) * features + f]; }
    double at(std::size_t n, std::size_t t, std::size_t f) const { return values[(n * steps + t) * features + f]; }

    // Throws ContractError on zero extents, size mismatch, or a scaled batch
    // with values outside [0, 1].
    void validate() const;

    numkit::Tensor tensor() const;
    static SeriesBatch from_tensor(const numkit::Tensor& t, bool is_scaled);

    SeriesBatch select(std::span<const std::size_t> indices) const;
    // Samples [begin, end).
    SeriesBatch slice(std::size_t begin, std::size_t end) const;

    friend bool operator==(const SeriesBatch&, const SeriesBatch&) = default;
};

struct SineConfig {
    std::size_t samples = 500;
    std::size_t steps = 24;
    std::size_t dims = 5;
    double freq_min = 0.0;
    double freq_max = 1.0;
    double phase_min = -std::numbers::pi;
    double phase_max = std::numbers::pi;
    std::uint64_t seed = 0;

    void validate() const;
};

// x_i(t) = sin(2 pi eta t + theta) at integer t = 0..T-1. For each sample,
// for each dimension in order, eta then theta are drawn uniformly.
SeriesBatch generate_sines(const SineConfig& cfg);

// Long CSV: header "sample_id,t,<f1>,...,<fF>", rows sample-major with t
// ascending from 0. Samples keep their order of first appearance.
SeriesBatch load_csv(const std::filesystem::path& path);
void export_csv(const SeriesBatch& batch, const std::filesystem::path& path);
std::string to_csv(const SeriesBatch& batch);
SeriesBatch parse_csv(const std::string& text);

// One long multivariate sequence.
struct LongSeries {
    std::size_t length = 0;
    std::size_t features = 0;
    std::vector<double> values;  // length x features
};

// Header row of feature names, then one row per timestamp.
LongSeries load_series_csv(const std::filesystem::path& path);
LongSeries parse_series_csv(const std::string& text);

// N = floor((L - T) / stride) + 1 contiguous windows.
SeriesBatch window(const LongSeries& series, std::size_t steps, std::size_t stride);

struct ScalerParams {
    std::vector<double> min;
    std::vector<double> max;

    friend bool operator==(const ScalerParams&, const ScalerParams&) = default;
};

ScalerParams scaler_fit(const SeriesBatch& batch);
// Affine map of each feature onto [0, 1] (clamped); constant features map to 0.5.
SeriesBatch scaler_apply(const SeriesBatch& batch, const ScalerParams& params);
SeriesBatch scaler_invert(const SeriesBatch& batch, const ScalerParams& params);

// i.i.d. Uniform[0, 1) noise shaped (N, T, Z).
numkit::Tensor sample_noise(std::size_t n, std::size_t steps, std::size_t dim, numkit::Rng& rng);

}  // namespace seriesforge::data
