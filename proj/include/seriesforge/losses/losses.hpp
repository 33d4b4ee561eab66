#pragma once

#include <span>

#include "seriesforge/numkit/tensor.hpp"

// Differentiable scalar losses over batches shaped (N, T, D). "Mean over
// samples, sum over timestamps and features" is the aggregation used
// wherever a loss is written as an expectation of a per-sequence sum.
namespace seriesforge::losses {

using numkit::Tensor;

// mean_n sum_{t,f} (x - x_ae)^2
Tensor reconstruction_loss(const Tensor& x, const Tensor& x_ae);

// s_out[:, t] predicts h[:, t + 2]. Mean over samples and the T - 2 valid
// positions of the squared L2 error; s_out's last two steps are ignored.
// Requires T >= 3.
Tensor supervised_loss(const Tensor& h, const Tensor& s_out);

struct MomentLoss {
    Tensor mean;      // sum_{t,f} |mean_n x - mean_n x_syn|
    Tensor variance;  // sum_{t,f} |var_n x - var_n x_syn|, population variance
    Tensor total;
};

// Batch sizes may differ; (T, F) must agree.
MomentLoss moment_loss_parts(const Tensor& x, const Tensor& x_syn);
Tensor moment_loss(const Tensor& x, const Tensor& x_syn);

struct TsFeatureLoss {
    Tensor mean;  // sum over code positions of squared difference of batch means
    Tensor std;   // same for population standard deviations
    Tensor total;
};

TsFeatureLoss ts_feature_loss_parts(const Tensor& h_real, const Tensor& h_syn);
Tensor ts_feature_loss(const Tensor& h_real, const Tensor& h_syn);

// mean (y_real - 1)^2 + mean y_fake^2
Tensor lsgan_discriminator_loss(const Tensor& y_real, const Tensor& y_fake);
// mean (y_fake - 1)^2
Tensor lsgan_generator_loss(const Tensor& y_fake);

// Pooled form: each side is the equal-weight average over its sources.
Tensor lsgan_discriminator_loss(std::span<const Tensor> real_sources, std::span<const Tensor> fake_sources);
Tensor lsgan_generator_loss(std::span<const Tensor> fake_sources);

struct GeneratorTerms {
    Tensor latent_adversarial;
    Tensor feature_adversarial;
    Tensor supervised;
    Tensor moment;
    Tensor ts_feature;
};

struct GeneratorWeights {
    double latent_adversarial = 1.0;
    double feature_adversarial = 1.0;
    double supervised = 1.0;
    double moment = 1.0;
    double ts_feature = 1.0;
};

// Weighted sum; terms with weight 0 are skipped and may be left undefined.
Tensor generator_total_loss(const GeneratorTerms& terms, const GeneratorWeights& weights = {});

struct AutoencoderWeights {
    double reconstruction = 1.0;
    double adversarial = 1.0;
};

Tensor autoencoder_total_loss(const Tensor& reconstruction, const Tensor& adversarial,
                              const AutoencoderWeights& weights = {});

}  // namespace seriesforge::losses
