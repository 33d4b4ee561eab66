#include "seriesforge/data/series.hpp"

#include <algorithm>
#include <cmath>

#include "seriesforge/error.hpp"

namespace seriesforge::data {

void SeriesBatch::validate() const {
    if (samples == 0 || steps == 0 || features == 0) {
        throw ContractError("series batch: extents must be positive, got (" + std::to_string(samples) + "," +
                            std::to_string(steps) + "," + std::to_string(features) + ")");
    }
    if (values.size() != samples * steps * features) throw ContractError("series batch: value count mismatch");
    if (scaled) {
        for (double v : values) {
            if (!(v >= 0.0 && v <= 1.0)) throw ContractError("series batch: scaled value outside [0, 1]");
        }
    }
}

numkit::Tensor SeriesBatch::tensor() const { return numkit::Tensor({samples, steps, features}, values); }

SeriesBatch SeriesBatch::from_tensor(const numkit::Tensor& t, bool is_scaled) {
    if (t.rank() != 3) throw ShapeError("series batch: expected rank-3 tensor, got " + numkit::shape_str(t.shape()));
    SeriesBatch b;
    b.samples = t.dim(0);
    b.steps = t.dim(1);
    b.features = t.dim(2);
    b.values.assign(t.data().begin(), t.data().end());
    b.scaled = is_scaled;
    return b;
}

SeriesBatch SeriesBatch::select(std::span<const std::size_t> indices) const {
    SeriesBatch out(indices.size(), steps, features, scaled);
    const std::size_t stride = steps * features;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= samples) throw ContractError("series batch: sample index out of range");
        std::copy_n(values.begin() + static_cast<long>(indices[i] * stride), stride,
                    out.values.begin() + static_cast<long>(i * stride));
    }
    return out;
}

SeriesBatch SeriesBatch::slice(std::size_t begin, std::size_t end) const {
    if (begin >= end || end > samples) throw ContractError("series batch: invalid sample range");
    std::vector<std::size_t> idx(end - begin);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
    return select(idx);
}

void SineConfig::validate() const {
    if (samples == 0 || steps == 0 || dims == 0) throw ConfigError("sines: samples, steps and dims must be positive");
    if (!(freq_min <= freq_max)) throw ConfigError("sines: frequency range min > max");
    if (!(phase_min <= phase_max)) throw ConfigError("sines: phase range min > max");
}

SeriesBatch generate_sines(const SineConfig& cfg) {
    cfg.validate();
    numkit::Rng rng(cfg.seed);
    SeriesBatch out(cfg.samples, cfg.steps, cfg.dims);
    for (std::size_t n = 0; n < cfg.samples; ++n) {
        for (std::size_t d = 0; d < cfg.dims; ++d) {
            const double eta = rng.uniform(cfg.freq_min, cfg.freq_max);
            const double theta = rng.uniform(cfg.phase_min, cfg.phase_max);
            for (std::size_t t = 0; t < cfg.steps; ++t) {
                out.at(n, t, d) = std::sin(2.0 * std::numbers::pi * eta * static_cast<double>(t) + theta);
            }
        }
    }
    return out;
}

SeriesBatch window(const LongSeries& series, std::size_t steps, std::size_t stride) {
    if (steps == 0 || stride == 0) throw ContractError("window: length and stride must be positive");
    if (series.length < steps) {
        throw ContractError("window: series length " + std::to_string(series.length) + " shorter than window " +
                            std::to_string(steps));
    }
    const std::size_t count = (series.length - steps) / stride + 1;
    SeriesBatch out(count, steps, series.features);
    const std::size_t span = steps * series.features;
    for (std::size_t k = 0; k < count; ++k) {
        std::copy_n(series.values.begin() + static_cast<long>(k * stride * series.features), span,
                    out.values.begin() + static_cast<long>(k * span));
    }
    return out;
}

ScalerParams scaler_fit(const SeriesBatch& batch) {
    batch.validate();
    ScalerParams p;
    p.min.assign(batch.features, INFINITY);
    p.max.assign(batch.features, -INFINITY);
    for (std::size_t i = 0; i < batch.values.size(); ++i) {
        const std::size_t f = i % batch.features;
        p.min[f] = std::min(p.min[f], batch.values[i]);
        p.max[f] = std::max(p.max[f], batch.values[i]);
    }
    return p;
}

namespace {

void check_params(const SeriesBatch& batch, const ScalerParams& p) {
    if (p.min.size() != batch.features || p.max.size() != batch.features) {
        throw ShapeError("scaler: parameters cover " + std::to_string(p.min.size()) + " features, batch has " +
                         std::to_string(batch.features));
    }
}

}  // namespace

SeriesBatch scaler_apply(const SeriesBatch& batch, const ScalerParams& p) {
    check_params(batch, p);
    SeriesBatch out = batch;
    out.scaled = true;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const std::size_t f = i % batch.features;
        const double range = p.max[f] - p.min[f];
        if (range > 0.0) {
            out.values[i] = std::clamp((batch.values[i] - p.min[f]) / range, 0.0, 1.0);
        } else {
            out.values[i] = 0.5;
        }
    }
    return out;
}

SeriesBatch scaler_invert(const SeriesBatch& batch, const ScalerParams& p) {
    if (!batch.scaled) throw ContractError("scaler_invert: batch is not scaled");
    check_params(batch, p);
    SeriesBatch out = batch;
    out.scaled = false;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const std::size_t f = i % batch.features;
        out.values[i] = p.min[f] + batch.values[i] * (p.max[f] - p.min[f]);
    }
    return out;
}

numkit::Tensor sample_noise(std::size_t n, std::size_t steps, std::size_t dim, numkit::Rng& rng) {
    if (n == 0 || steps == 0 || dim == 0) throw ContractError("sample_noise: dimensions must be positive");
    std::vector<double> values(n * steps * dim);
    for (double& v : values) v = rng.uniform();
    return numkit::Tensor({n, steps, dim}, std::move(values));
}

}  // namespace seriesforge::data
