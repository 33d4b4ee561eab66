#include "seriesforge/eval/embedding.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "seriesforge/error.hpp"

namespace seriesforge::eval {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<Source> pooled_labels(const data::SeriesBatch& real, const data::SeriesBatch& synthetic) {
    std::vector<Source> labels(real.samples, Source::Real);
    labels.resize(real.samples + synthetic.samples, Source::Synthetic);
    return labels;
}

}  // namespace

std::vector<double> pooled_rows(const data::SeriesBatch& real, const data::SeriesBatch& synthetic) {
    real.validate();
    synthetic.validate();
    if (real.steps != synthetic.steps || real.features != synthetic.features) {
        throw ShapeError("embedding: real and synthetic (T, F) differ");
    }
    std::vector<double> rows = real.values;
    rows.insert(rows.end(), synthetic.values.begin(), synthetic.values.end());
    return rows;
}

std::vector<double> PcaModel::project(std::span<const double> rows) const {
    if (rows.size() % dim != 0) throw ShapeError("pca project: row length does not match model dimension");
    const std::size_t n = rows.size() / dim;
    std::vector<double> out(n * 2, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < 2; ++c) {
            double acc = 0.0;
            for (std::size_t j = 0; j < dim; ++j) acc += (rows[i * dim + j] - mean[j]) * components[c * dim + j];
            out[i * 2 + c] = acc;
        }
    }
    return out;
}

std::vector<double> PcaModel::reconstruct(std::span<const double> coords) const {
    if (coords.size() % 2 != 0) throw ShapeError("pca reconstruct: coordinates must come in pairs");
    const std::size_t n = coords.size() / 2;
    std::vector<double> out(n * dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            out[i * dim + j] = mean[j] + coords[2 * i] * components[j] + coords[2 * i + 1] * components[dim + j];
        }
    }
    return out;
}

PcaModel pca_fit(std::span<const double> rows, std::size_t n, std::size_t dim) {
    if (rows.size() != n * dim) throw ShapeError("pca: expected " + std::to_string(n * dim) + " values");
    if (n < 3) throw ContractError("pca: need at least 3 samples, got " + std::to_string(n));
    if (dim < 2) throw ContractError("pca: need at least 2 dimensions, got " + std::to_string(dim));

    Eigen::Map<const RowMatrix> x(rows.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    const Eigen::RowVectorXd mu = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mu;
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw ContractError("pca: eigendecomposition failed");

    PcaModel model;
    model.dim = dim;
    model.mean.assign(mu.data(), mu.data() + dim);
    const Eigen::VectorXd& evals = solver.eigenvalues();  // ascending
    for (Eigen::Index i = evals.size() - 1; i >= 0; --i) model.spectrum.push_back(evals(i));
    if (!(model.spectrum.front() > 0.0)) throw ContractError("pca: degenerate covariance (all samples identical)");

    model.components.resize(2 * dim);
    for (std::size_t c = 0; c < 2; ++c) {
        const Eigen::VectorXd v = solver.eigenvectors().col(static_cast<Eigen::Index>(dim - 1 - c));
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        const double sign = v(arg) < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < dim; ++j) model.components[c * dim + j] = sign * v(static_cast<Eigen::Index>(j));
    }
    return model;
}

Embedding pca_project(const data::SeriesBatch& real, const data::SeriesBatch& synthetic) {
    const auto rows = pooled_rows(real, synthetic);
    const std::size_t dim = real.steps * real.features;
    const PcaModel model = pca_fit(rows, real.samples + synthetic.samples, dim);
    return {"pca", model.project(rows), pooled_labels(real, synthetic)};
}

namespace {

// Row-stochastic conditional affinities with per-row precision found by
// bisection so that exp(entropy) matches the perplexity.
std::vector<double> conditional_affinities(const std::vector<double>& dist, std::size_t n, double perplexity) {
    const double target = std::log(perplexity);
    std::vector<double> p(n * n, 0.0);
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* d = dist.data() + i * n;
        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) dmin = std::min(dmin, d[j]);
        }
        double beta = 1.0;
        double lo = 0.0;
        double hi = std::numeric_limits<double>::infinity();
        for (int iter = 0; iter < 200; ++iter) {
            double sum = 0.0;
            double weighted = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                row[j] = j == i ? 0.0 : std::exp(-beta * (d[j] - dmin));
                sum += row[j];
                weighted += row[j] * (d[j] - dmin);
            }
            const double entropy = std::log(sum) + beta * weighted / sum;
            const double diff = entropy - target;
            if (std::abs(diff) < 1e-5) break;
            if (diff > 0.0) {
                lo = beta;
                beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
            } else {
                hi = beta;
                beta = 0.5 * (beta + lo);
            }
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row[j] = j == i ? 0.0 : std::exp(-beta * (d[j] - dmin));
            sum += row[j];
        }
        for (std::size_t j = 0; j < n; ++j) p[i * n + j] = row[j] / sum;
    }
    return p;
}

}  // namespace

TsneResult tsne(std::span<const double> rows, std::size_t n, std::size_t dim, const TsneConfig& cfg,
                numkit::Rng& rng) {
    if (rows.size() != n * dim || dim == 0) throw ShapeError("tsne: expected n x dim values");
    if (!(cfg.perplexity > 0.0)) throw ContractError("tsne: perplexity must be positive");
    if (static_cast<double>(n) < 3.0 * cfg.perplexity) {
        throw ContractError("tsne: perplexity " + std::to_string(cfg.perplexity) + " too large for " +
                            std::to_string(n) + " samples (need n >= 3 * perplexity)");
    }

    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double diff = rows[i * dim + k] - rows[j * dim + k];
                acc += diff * diff;
            }
            dist[i * n + j] = dist[j * n + i] = acc;
        }
    }
    const auto cond = conditional_affinities(dist, n, cfg.perplexity);
    std::vector<double> p(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            p[i * n + j] = i == j ? 0.0 : std::max((cond[i * n + j] + cond[j * n + i]) / (2.0 * n), 1e-12);
        }
    }

    TsneResult result;
    std::vector<double>& y = result.coords;
    y.resize(n * 2);
    for (double& v : y) v = 1e-2 * rng.normal();
    std::vector<double> update(n * 2, 0.0);
    std::vector<double> gains(n * 2, 1.0);
    std::vector<double> num(n * n);
    std::vector<double> grad(n * 2);

    // Student-t kernel of the current map; returns the normaliser.
    auto kernel = [&] {
        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num[i * n + i] = 0.0;
            for (std::size_t j = i + 1; j < n; ++j) {
                const double dx = y[2 * i] - y[2 * j];
                const double dy = y[2 * i + 1] - y[2 * j + 1];
                const double q = 1.0 / (1.0 + dx * dx + dy * dy);
                num[i * n + j] = num[j * n + i] = q;
                z += 2.0 * q;
            }
        }
        return z;
    };
    auto kl = [&](double z) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double q = std::max(num[i * n + j] / z, 1e-12);
                acc += p[i * n + j] * std::log(p[i * n + j] / q);
            }
        }
        return acc;
    };

    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        const double z = kernel();
        if (it > 0) result.kl_trace.push_back(kl(z));
        const double exag = it < cfg.exaggeration_iterations ? cfg.exaggeration : 1.0;
        const double momentum = it < cfg.momentum_switch ? cfg.initial_momentum : cfg.final_momentum;
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double q = std::max(num[i * n + j] / z, 1e-12);
                const double mult = (exag * p[i * n + j] - q) * num[i * n + j];
                grad[2 * i] += 4.0 * mult * (y[2 * i] - y[2 * j]);
                grad[2 * i + 1] += 4.0 * mult * (y[2 * i + 1] - y[2 * j + 1]);
            }
        }
        for (std::size_t k = 0; k < y.size(); ++k) {
            const bool same_sign = (grad[k] > 0.0) == (update[k] > 0.0);
            gains[k] = std::max(same_sign ? gains[k] * 0.8 : gains[k] + 0.2, 0.01);
            update[k] = momentum * update[k] - cfg.learning_rate * gains[k] * grad[k];
            y[k] += update[k];
        }
        double cx = 0.0;
        double cy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cx += y[2 * i];
            cy += y[2 * i + 1];
        }
        cx /= static_cast<double>(n);
        cy /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[2 * i] -= cx;
            y[2 * i + 1] -= cy;
        }
    }
    if (cfg.iterations > 0) result.kl_trace.push_back(kl(kernel()));
    return result;
}

Embedding tsne_project(const data::SeriesBatch& real, const data::SeriesBatch& synthetic, const TsneConfig& cfg,
                       numkit::Rng& rng) {
    const auto rows = pooled_rows(real, synthetic);
    auto result = tsne(rows, real.samples + synthetic.samples, real.steps * real.features, cfg, rng);
    return {"tsne", std::move(result.coords), pooled_labels(real, synthetic)};
}

}  // namespace seriesforge::eval
