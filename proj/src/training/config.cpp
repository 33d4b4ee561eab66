#include "seriesforge/training/config.hpp"

#include <cmath>
#include <initializer_list>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "seriesforge/error.hpp"
#include "../json_reader.hpp"

namespace seriesforge::training {

using nlohmann::json;

void TrainConfig::validate() const {
    auto positive = [](std::size_t v, std::string_view name) {
        if (v == 0) throw ConfigError(std::string(name) + " must be positive");
    };
    positive(window, "window");
    positive(batch_size, "batch_size");
    positive(hidden_dim, "hidden_dim");
    positive(num_layers, "num_layers");
    positive(time_stride, "time_stride");
    positive(discriminator_steps, "discriminator_steps");
    for (std::size_t i = 0; i < epochs.size(); ++i) positive(epochs[i], "epochs[" + std::to_string(i) + "]");
    if (window < 3) throw ConfigError("window must be at least 3 for the two-step supervised loss");
    if (window % time_stride != 0) {
        throw ConfigError("time_stride " + std::to_string(time_stride) + " does not divide window " +
                          std::to_string(window));
    }
    for (double lr : {learning_rates.lossfn_autoencoder, learning_rates.autoencoder, learning_rates.supervisor,
                      learning_rates.generator, learning_rates.discriminator}) {
        if (!std::isfinite(lr) || lr < 0.0) throw ConfigError("learning rates must be finite and non-negative");
    }
    for (double w : {generator_weights.latent_adversarial, generator_weights.feature_adversarial,
                     generator_weights.supervised, generator_weights.moment, generator_weights.ts_feature,
                     autoencoder_weights.reconstruction, autoencoder_weights.adversarial}) {
        if (!std::isfinite(w) || w < 0.0) throw ConfigError("loss weights must be finite and non-negative");
    }
    positive(early_stop.check_interval, "early_stop.check_interval");
    if (!(early_stop.start_fraction > 0.0 && early_stop.start_fraction <= 1.0)) {
        throw ConfigError("early_stop.start_fraction must lie in (0, 1]");
    }
    if (early_stop.quick_budget.steps > 200) throw ConfigError("early_stop quick classifier budget exceeds 200 steps");
    early_stop.quick_budget.validate();
}

nets::BundleDims TrainConfig::bundle_dims(std::size_t features) const {
    nets::BundleDims dims = nets::BundleDims::defaults(features);
    dims.hidden_dim = hidden_dim;
    dims.num_layers = num_layers;
    dims.time_stride = time_stride;
    if (latent_dim > 0) dims.latent_dim = latent_dim;
    dims.noise_dim = noise_dim > 0 ? noise_dim : dims.latent_dim;
    if (code_dim > 0) dims.code_dim = code_dim;
    return dims;
}

json to_json(const TrainConfig& c) {
    const auto& lr = c.learning_rates;
    const auto& gw = c.generator_weights;
    const auto& es = c.early_stop;
    return {
        {"seed", c.seed},
        {"window", c.window},
        {"batch_size", c.batch_size},
        {"hidden_dim", c.hidden_dim},
        {"num_layers", c.num_layers},
        {"latent_dim", c.latent_dim},
        {"noise_dim", c.noise_dim},
        {"time_stride", c.time_stride},
        {"code_dim", c.code_dim},
        {"epochs", c.epochs},
        {"learning_rates",
         {{"lossfn_autoencoder", lr.lossfn_autoencoder},
          {"autoencoder", lr.autoencoder},
          {"supervisor", lr.supervisor},
          {"generator", lr.generator},
          {"discriminator", lr.discriminator}}},
        {"generator_weights",
         {{"latent_adversarial", gw.latent_adversarial},
          {"feature_adversarial", gw.feature_adversarial},
          {"supervised", gw.supervised},
          {"moment", gw.moment},
          {"ts_feature", gw.ts_feature}}},
        {"autoencoder_weights",
         {{"reconstruction", c.autoencoder_weights.reconstruction},
          {"adversarial", c.autoencoder_weights.adversarial}}},
        {"ablation",
         {{"use_supervised_loss", c.use_supervised_loss},
          {"use_feature_discriminator", c.use_feature_discriminator},
          {"use_ts_loss", c.use_ts_loss},
          {"use_early_stopping", c.use_early_stopping}}},
        {"early_stopping",
         {{"check_interval", es.check_interval},
          {"start_fraction", es.start_fraction},
          {"quick_steps", es.quick_budget.steps},
          {"quick_batch_size", es.quick_budget.batch_size},
          {"quick_hidden_dim", es.quick_budget.hidden_dim},
          {"quick_learning_rate", es.quick_budget.learning_rate},
          {"quick_seed", es.quick_seed},
          {"eval_samples", es.eval_samples}}},
        {"discriminator_steps", c.discriminator_steps},
    };
}

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
    using detail::Reader;
    Reader r(j, "");
    r.get("seed", c.seed);
    r.get("window", c.window);
    r.get("batch_size", c.batch_size);
    r.get("hidden_dim", c.hidden_dim);
    r.get("num_layers", c.num_layers);
    r.get("latent_dim", c.latent_dim);
    r.get("noise_dim", c.noise_dim);
    r.get("time_stride", c.time_stride);
    r.get("code_dim", c.code_dim);
    if (r.has("epochs")) {
        const json& e = j.at("epochs");
        if (!e.is_array() || e.size() != 4) throw ConfigError("config: epochs must be an array of 4 counts");
        for (std::size_t i = 0; i < 4; ++i) {
            if (!e[i].is_number_unsigned()) throw ConfigError("config: epochs must be non-negative integers");
            c.epochs[i] = e[i].get<std::size_t>();
        }
    }
    r.mark("epochs");
    {
        Reader lr = r.child("learning_rates");
        lr.get("lossfn_autoencoder", c.learning_rates.lossfn_autoencoder);
        lr.get("autoencoder", c.learning_rates.autoencoder);
        lr.get("supervisor", c.learning_rates.supervisor);
        lr.get("generator", c.learning_rates.generator);
        lr.get("discriminator", c.learning_rates.discriminator);
        lr.finish();
    }
    {
        Reader gw = r.child("generator_weights");
        gw.get("latent_adversarial", c.generator_weights.latent_adversarial);
        gw.get("feature_adversarial", c.generator_weights.feature_adversarial);
        gw.get("supervised", c.generator_weights.supervised);
        gw.get("moment", c.generator_weights.moment);
        gw.get("ts_feature", c.generator_weights.ts_feature);
        gw.finish();
    }
    {
        Reader aw = r.child("autoencoder_weights");
        aw.get("reconstruction", c.autoencoder_weights.reconstruction);
        aw.get("adversarial", c.autoencoder_weights.adversarial);
        aw.finish();
    }
    {
        Reader ab = r.child("ablation");
        ab.get("use_supervised_loss", c.use_supervised_loss);
        ab.get("use_feature_discriminator", c.use_feature_discriminator);
        ab.get("use_ts_loss", c.use_ts_loss);
        ab.get("use_early_stopping", c.use_early_stopping);
        ab.finish();
    }
    {
        Reader es = r.child("early_stopping");
        es.get("check_interval", c.early_stop.check_interval);
        es.get("start_fraction", c.early_stop.start_fraction);
        es.get("quick_steps", c.early_stop.quick_budget.steps);
        es.get("quick_batch_size", c.early_stop.quick_budget.batch_size);
        es.get("quick_hidden_dim", c.early_stop.quick_budget.hidden_dim);
        es.get("quick_learning_rate", c.early_stop.quick_budget.learning_rate);
        es.get("quick_seed", c.early_stop.quick_seed);
        es.get("eval_samples", c.early_stop.eval_samples);
        es.finish();
    }
    r.get("discriminator_steps", c.discriminator_steps);
    r.finish();
    return c;
}

}  // namespace seriesforge::training
