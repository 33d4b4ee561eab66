#include "seriesforge/losses/losses.hpp"

#include <array>
#include <string>

#include "seriesforge/error.hpp"
#include "seriesforge/numkit/ops.hpp"

namespace seriesforge::losses {

using namespace numkit;

namespace {

constexpr std::array<std::size_t, 1> kBatchAxis{0};

void require_rank3(std::string_view what, const Tensor& t) {
    if (t.rank() != 3) throw ShapeError(std::string(what) + ": expected (N, T, D), got " + shape_str(t.shape()));
}

void require_same_tail(std::string_view what, const Tensor& a, const Tensor& b) {
    require_rank3(what, a);
    require_rank3(what, b);
    if (a.dim(1) != b.dim(1) || a.dim(2) != b.dim(2)) {
        throw ShapeError(std::string(what) + ": (T, D) mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
    }
}

struct BatchMoments {
    Tensor mean;      // (T, D)
    Tensor variance;  // (T, D), population
};

BatchMoments batch_moments(const Tensor& x) {
    Tensor mean = reduce_mean(x, kBatchAxis);
    Tensor centered = x - broadcast_to(mean, x.shape());
    Tensor variance = reduce_mean(square(centered), kBatchAxis);
    return {mean, variance};
}

}  // namespace

Tensor reconstruction_loss(const Tensor& x, const Tensor& x_ae) {
    if (x.shape() != x_ae.shape()) {
        throw ShapeError("reconstruction_loss: shape mismatch " + shape_str(x.shape()) + " vs " +
                         shape_str(x_ae.shape()));
    }
    require_rank3("reconstruction_loss", x);
    return scale(sum_all(square(x - x_ae)), 1.0 / static_cast<double>(x.dim(0)));
}

Tensor supervised_loss(const Tensor& h, const Tensor& s_out) {
    if (h.shape() != s_out.shape()) {
        throw ShapeError("supervised_loss: shape mismatch " + shape_str(h.shape()) + " vs " +
                         shape_str(s_out.shape()));
    }
    require_rank3("supervised_loss", h);
    const std::size_t steps = h.dim(1);
    if (steps < 3) throw ContractError("supervised_loss: need T >= 3, got " + std::to_string(steps));
    const Tensor target = slice_time_range(h, 2, steps);
    const Tensor pred = slice_time_range(s_out, 0, steps - 2);
    const double count = static_cast<double>(h.dim(0) * (steps - 2));
    return scale(sum_all(square(target - pred)), 1.0 / count);
}

MomentLoss moment_loss_parts(const Tensor& x, const Tensor& x_syn) {
    require_same_tail("moment_loss", x, x_syn);
    const auto real = batch_moments(x);
    const auto syn = batch_moments(x_syn);
    MomentLoss out;
    out.mean = sum_all(abs(real.mean - syn.mean));
    out.variance = sum_all(abs(real.variance - syn.variance));
    out.total = out.mean + out.variance;
    return out;
}

Tensor moment_loss(const Tensor& x, const Tensor& x_syn) { return moment_loss_parts(x, x_syn).total; }

TsFeatureLoss ts_feature_loss_parts(const Tensor& h_real, const Tensor& h_syn) {
    require_same_tail("ts_feature_loss", h_real, h_syn);
    const auto real = batch_moments(h_real);
    const auto syn = batch_moments(h_syn);
    TsFeatureLoss out;
    out.mean = sum_all(square(real.mean - syn.mean));
    out.std = sum_all(square(sqrt(real.variance) - sqrt(syn.variance)));
    out.total = out.mean + out.std;
    return out;
}

Tensor ts_feature_loss(const Tensor& h_real, const Tensor& h_syn) { return ts_feature_loss_parts(h_real, h_syn).total; }

Tensor lsgan_discriminator_loss(const Tensor& y_real, const Tensor& y_fake) {
    return mean_all(square(shift(y_real, -1.0))) + mean_all(square(y_fake));
}

Tensor lsgan_generator_loss(const Tensor& y_fake) { return mean_all(square(shift(y_fake, -1.0))); }

Tensor lsgan_discriminator_loss(std::span<const Tensor> real_sources, std::span<const Tensor> fake_sources) {
    if (real_sources.empty() || fake_sources.empty()) {
        throw ContractError("lsgan_discriminator_loss: need at least one real and one fake source");
    }
    Tensor real_term = mean_all(square(shift(real_sources[0], -1.0)));
    for (std::size_t i = 1; i < real_sources.size(); ++i) real_term = real_term + mean_all(square(shift(real_sources[i], -1.0)));
    Tensor fake_term = mean_all(square(fake_sources[0]));
    for (std::size_t i = 1; i < fake_sources.size(); ++i) fake_term = fake_term + mean_all(square(fake_sources[i]));
    return scale(real_term, 1.0 / static_cast<double>(real_sources.size())) +
           scale(fake_term, 1.0 / static_cast<double>(fake_sources.size()));
}

Tensor lsgan_generator_loss(std::span<const Tensor> fake_sources) {
    if (fake_sources.empty()) throw ContractError("lsgan_generator_loss: need at least one fake source");
    Tensor total = lsgan_generator_loss(fake_sources[0]);
    for (std::size_t i = 1; i < fake_sources.size(); ++i) total = total + lsgan_generator_loss(fake_sources[i]);
    return scale(total, 1.0 / static_cast<double>(fake_sources.size()));
}

Tensor generator_total_loss(const GeneratorTerms& terms, const GeneratorWeights& weights) {
    const std::array<std::pair<const Tensor*, double>, 5> parts{{
        {&terms.latent_adversarial, weights.latent_adversarial},
        {&terms.feature_adversarial, weights.feature_adversarial},
        {&terms.supervised, weights.supervised},
        {&terms.moment, weights.moment},
        {&terms.ts_feature, weights.ts_feature},
    }};
    Tensor total;
    for (const auto& [term, w] : parts) {
        if (w == 0.0) continue;
        if (!term->defined()) throw ContractError("generator_total_loss: missing term with nonzero weight");
        Tensor weighted = w == 1.0 ? *term : scale(*term, w);
        total = total.defined() ? total + weighted : weighted;
    }
    return total.defined() ? total : Tensor::scalar(0.0);
}

Tensor autoencoder_total_loss(const Tensor& reconstruction, const Tensor& adversarial,
                              const AutoencoderWeights& weights) {
    Tensor total;
    for (const auto& [term, w] : {std::pair{&reconstruction, weights.reconstruction},
                                  std::pair{&adversarial, weights.adversarial}}) {
        if (w == 0.0) continue;
        if (!term->defined()) throw ContractError("autoencoder_total_loss: missing term with nonzero weight");
        Tensor weighted = w == 1.0 ? *term : scale(*term, w);
        total = total.defined() ? total + weighted : weighted;
    }
    return total.defined() ? total : Tensor::scalar(0.0);
}

}  // namespace seriesforge::losses
