#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "seriesforge/data/series.hpp"
#include "seriesforge/numkit/rng.hpp"

namespace seriesforge::eval {

enum class Source { Real, Synthetic };

// 2-D coordinates for pooled real + synthetic samples, real rows first.
struct Embedding {
    std::string method;
    std::vector<double> coords;  // rows x 2
    std::vector<Source> labels;

    std::size_t rows() const noexcept { return labels.size(); }
    double x(std::size_t i) const { return coords[2 * i]; }
    double y(std::size_t i) const { return coords[2 * i + 1]; }
};

// Flattens each sample to a T*F row and pools real then synthetic.
std::vector<double> pooled_rows(const data::SeriesBatch& real, const data::SeriesBatch& synthetic);

struct PcaModel {
    std::size_t dim = 0;
    std::vector<double> mean;        // dim
    std::vector<double> components;  // 2 x dim, orthonormal rows
    std::vector<double> spectrum;    // every eigenvalue of the covariance, descending

    std::vector<double> project(std::span<const double> rows) const;
    // Inverse map of project for the retained components.
    std::vector<double> reconstruct(std::span<const double> coords) const;
};

// rows is n x dim. Covariance divides by n. Each component's largest-magnitude
// loading is made positive. Needs n >= 3, dim >= 2 and nonzero variance.
PcaModel pca_fit(std::span<const double> rows, std::size_t n, std::size_t dim);

Embedding pca_project(const data::SeriesBatch& real, const data::SeriesBatch& synthetic);

struct TsneConfig {
    double perplexity = 30.0;
    std::size_t iterations = 300;
    double learning_rate = 200.0;
    double exaggeration = 4.0;
    std::size_t exaggeration_iterations = 50;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    std::size_t momentum_switch = 250;
};

struct TsneResult {
    std::vector<double> coords;    // n x 2
    std::vector<double> kl_trace;  // KL(P || Q) after each iteration, unexaggerated P
};

// Exact t-SNE. Needs n >= 3 * perplexity.
TsneResult tsne(std::span<const double> rows, std::size_t n, std::size_t dim, const TsneConfig& cfg,
                numkit::Rng& rng);

Embedding tsne_project(const data::SeriesBatch& real, const data::SeriesBatch& synthetic, const TsneConfig& cfg,
                       numkit::Rng& rng);

}  // namespace seriesforge::eval
