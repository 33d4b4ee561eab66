#include "seriesforge/cli/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "../json_reader.hpp"
#include "seriesforge/error.hpp"

namespace seriesforge::cli {

using nlohmann::json;
using detail::Reader;

namespace {

void read_budget(Reader r, eval::ScorerBudget& b) {
    r.get("steps", b.steps);
    r.get("batch_size", b.batch_size);
    r.get("hidden_dim", b.hidden_dim);
    r.get("num_layers", b.num_layers);
    r.get("learning_rate", b.learning_rate);
    r.finish();
}

json budget_json(const eval::ScorerBudget& b) {
    return {{"steps", b.steps},
            {"batch_size", b.batch_size},
            {"hidden_dim", b.hidden_dim},
            {"num_layers", b.num_layers},
            {"learning_rate", b.learning_rate}};
}

}  // namespace

void RunConfig::validate() const {
    if (sines.has_value() == csv.has_value()) throw ConfigError("config: exactly one data source (sines or csv) is required");
    if (sines) sines->validate();
    if (csv) {
        if (csv->path.empty()) throw ConfigError("config data.csv: path is empty");
        if (csv->layout != "samples" && csv->layout != "series") {
            throw ConfigError("config data.csv: layout must be \"samples\" or \"series\", got \"" + csv->layout + "\"");
        }
        if (csv->stride == 0) throw ConfigError("config data.csv: stride must be positive");
    }
    train.validate();
    if (evaluation.replications == 0) throw ConfigError("config evaluation: replications must be positive");
    evaluation.discriminative.validate();
    evaluation.predictive.validate();
    if (!(evaluation.tsne_perplexity > 0.0) || !std::isfinite(evaluation.tsne_perplexity)) {
        throw ConfigError("config evaluation: tsne_perplexity must be positive");
    }
    if (evaluation.tsne_iterations == 0) throw ConfigError("config evaluation: tsne_iterations must be positive");
    if (count == 0) throw ConfigError("config generate: count must be positive");
    if (out.empty()) throw ConfigError("config: output directory is empty");
}

RunConfig run_config_from_json(const json& j) {
    RunConfig c;
    Reader r(j, "");
    if (r.has("data")) {
        Reader d = r.child("data");
        if (d.has("sines")) {
            data::SineConfig s;
            Reader sr = d.child("sines");
            sr.get("samples", s.samples);
            sr.get("steps", s.steps);
            sr.get("dims", s.dims);
            sr.get("freq_min", s.freq_min);
            sr.get("freq_max", s.freq_max);
            sr.get("phase_min", s.phase_min);
            sr.get("phase_max", s.phase_max);
            sr.get("seed", s.seed);
            sr.finish();
            c.sines = s;
        } else {
            d.mark("sines");
        }
        if (d.has("csv")) {
            CsvSource s;
            Reader cr = d.child("csv");
            std::string path;
            cr.get("path", path);
            s.path = path;
            cr.get("layout", s.layout);
            cr.get("stride", s.stride);
            cr.finish();
            c.csv = s;
        } else {
            d.mark("csv");
        }
        d.finish();
        if (c.sines && c.csv) throw ConfigError("config data: give either sines or csv, not both");
    } else {
        r.mark("data");
    }
    if (!c.csv && !c.sines) c.sines = data::SineConfig{};

    r.mark("train");
    if (r.has("train")) c.train = training::train_config_from_json(j.at("train"));

    {
        Reader e = r.child("evaluation");
        e.get("replications", c.evaluation.replications);
        e.get("embedding_samples", c.evaluation.embedding_samples);
        e.get("tsne_perplexity", c.evaluation.tsne_perplexity);
        e.get("tsne_iterations", c.evaluation.tsne_iterations);
        read_budget(e.child("discriminative"), c.evaluation.discriminative);
        read_budget(e.child("predictive"), c.evaluation.predictive);
        e.finish();
    }
    {
        Reader g = r.child("generate");
        g.get("count", c.count);
        g.finish();
    }
    std::string out = c.out.string();
    r.get("out", out);
    c.out = out;
    r.finish();
    c.validate();
    return c;
}

json to_json(const RunConfig& c) {
    json j;
    if (c.sines) {
        const auto& s = *c.sines;
        j["data"]["sines"] = {{"samples", s.samples},   {"steps", s.steps},         {"dims", s.dims},
                              {"freq_min", s.freq_min}, {"freq_max", s.freq_max},   {"phase_min", s.phase_min},
                              {"phase_max", s.phase_max}, {"seed", s.seed}};
    }
    if (c.csv) {
        j["data"]["csv"] = {{"path", c.csv->path.string()}, {"layout", c.csv->layout}, {"stride", c.csv->stride}};
    }
    j["train"] = training::to_json(c.train);
    j["evaluation"] = {{"replications", c.evaluation.replications},
                       {"embedding_samples", c.evaluation.embedding_samples},
                       {"tsne_perplexity", c.evaluation.tsne_perplexity},
                       {"tsne_iterations", c.evaluation.tsne_iterations},
                       {"discriminative", budget_json(c.evaluation.discriminative)},
                       {"predictive", budget_json(c.evaluation.predictive)}};
    j["generate"] = {{"count", c.count}};
    j["out"] = c.out.string();
    return j;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return run_config_from_json(j);
}

void apply_ablation(training::TrainConfig& cfg, std::string_view name) {
    std::string_view base = name;
    if (base.starts_with("no-")) base.remove_prefix(3);
    if (base == "supervised" || base == "supervised-loss") {
        cfg.use_supervised_loss = false;
    } else if (base == "dual-disc" || base == "feature-disc") {
        cfg.use_feature_discriminator = false;
    } else if (base == "ts-loss") {
        cfg.use_ts_loss = false;
    } else if (base == "early-stop" || base == "early-stopping") {
        cfg.use_early_stopping = false;
    } else {
        throw ConfigError("unknown --ablate value '" + std::string(name) +
                          "' (expected supervised, dual-disc, ts-loss or early-stop)");
    }
}

data::SeriesBatch load_dataset(const RunConfig& cfg) {
    if (cfg.sines) return data::generate_sines(*cfg.sines);
    if (!cfg.csv) throw ConfigError("config: no data source");
    if (!std::filesystem::exists(cfg.csv->path)) throw IoError("dataset not found: " + cfg.csv->path.string());
    if (cfg.csv->layout == "series") {
        return data::window(data::load_series_csv(cfg.csv->path), cfg.train.window, cfg.csv->stride);
    }
    return data::load_csv(cfg.csv->path);
}

}  // namespace seriesforge::cli
