#include "seriesforge/cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "seriesforge/error.hpp"
#include "seriesforge/training/checkpoint.hpp"

namespace seriesforge::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path prepare_out(const RunConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec || !fs::is_directory(cfg.out)) {
        throw IoError("output directory " + cfg.out.string() + " is not writable: " + ec.message());
    }
    return cfg.out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

std::string dims_str(const data::SeriesBatch& b) {
    return "N=" + std::to_string(b.samples) + " T=" + std::to_string(b.steps) + " F=" + std::to_string(b.features);
}

json trace_json(const std::vector<double>& trace) {
    return {{"iterations", trace.size()}, {"final", trace.empty() ? json(nullptr) : json(trace.back())}, {"trace", trace}};
}

json metrics_json(const training::Trainer& trainer, const training::TrainResult& result) {
    const auto& es = trainer.early_stop();
    json j;
    j["phase1"] = {{"reconstruction", trace_json(result.phase1)}};
    j["phase2"] = {{"reconstruction", trace_json(result.phase2.reconstruction)},
                   {"adversarial", trace_json(result.phase2.adversarial)},
                   {"discriminator", trace_json(result.phase2.discriminator)}};
    j["phase3"] = {{"supervised", trace_json(result.phase3)}};
    j["phase4"] = {{"feature_discriminator", trace_json(result.phase4.feature_discriminator)},
                   {"latent_discriminator", trace_json(result.phase4.latent_discriminator)},
                   {"generator", trace_json(result.phase4.generator)},
                   {"autoencoder", trace_json(result.phase4.autoencoder)}};
    json stop = {{"enabled", trainer.config().use_early_stopping}, {"evaluations", es.log.size()}};
    stop["p1"] = es.p1 ? json(*es.p1) : json(nullptr);
    stop["best_score"] = es.total_error ? json(*es.total_error) : json(nullptr);
    stop["best_epoch"] = es.best_snapshot ? json(es.best_epoch) : json(nullptr);
    stop["warnings"] = es.warnings;
    j["early_stopping"] = stop;
    j["synthetic_samples"] = result.synthetic.samples;
    return j;
}

}  // namespace

fs::path cmd_sines(const RunConfig& cfg, std::ostream& log) {
    if (!cfg.sines) throw ConfigError("sines: the config's data source is not a Sines generator");
    cfg.sines->validate();
    const auto batch = data::generate_sines(*cfg.sines);
    const fs::path path = prepare_out(cfg) / kSinesFile;
    data::export_csv(batch, path);
    log << "wrote " << path.string() << ": " << dims_str(batch) << "\n";
    return path;
}

training::TrainResult cmd_train(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto raw = load_dataset(cfg);
    raw.validate();
    if (raw.steps != cfg.train.window) {
        throw ConfigError("train: dataset has T=" + std::to_string(raw.steps) + " but train.window is " +
                          std::to_string(cfg.train.window));
    }
    const fs::path out = prepare_out(cfg);
    const auto scaler = data::scaler_fit(raw);
    log << "training on " << dims_str(raw) << "\n";

    training::Trainer trainer(cfg.train, data::scaler_apply(raw, scaler));
    const auto result = trainer.run();

    training::Checkpoint ckpt;
    ckpt.config = cfg.train;
    ckpt.features = raw.features;
    ckpt.scaler = scaler;
    ckpt.phase = trainer.completed_phase();
    ckpt.epoch = trainer.epoch();
    ckpt.rng_state = trainer.rng().state();
    ckpt.arrays = trainer.bundle().snapshot();
    training::save_checkpoint(ckpt, out / kCheckpointFile);

    write_text(out / kEarlyStopLogFile, training::early_stop_log_jsonl(trainer.early_stop().log));
    data::export_csv(data::scaler_invert(result.synthetic, scaler), out / kSyntheticFile);
    write_text(out / kMetricsFile, metrics_json(trainer, result).dump(2) + "\n");

    const auto& es = trainer.early_stop();
    for (const auto& w : es.warnings) log << "warning: " << w << "\n";
    if (cfg.train.use_early_stopping) {
        log << "early stopping: " << es.log.size() << " evaluations";
        if (es.best_snapshot) log << ", kept epoch " << es.best_epoch << " (score " << *es.total_error << ")";
        log << "\n";
    }
    log << "wrote " << (out / kCheckpointFile).string() << ", " << kEarlyStopLogFile << ", " << kSyntheticFile
        << ", " << kMetricsFile << "\n";
    return result;
}

data::SeriesBatch cmd_generate(const RunConfig& cfg, const fs::path& checkpoint, std::ostream& log) {
    if (cfg.count == 0) throw ConfigError("generate: count must be positive");
    if (!fs::exists(checkpoint)) throw IoError("checkpoint not found: " + checkpoint.string());
    const auto ckpt = training::load_checkpoint(checkpoint);
    const auto bundle = training::bundle_from_checkpoint(ckpt);
    numkit::Rng rng(cfg.train.seed);
    const auto scaled = training::generate(bundle, cfg.count, ckpt.config.window, rng);
    auto batch = data::scaler_invert(scaled, ckpt.scaler);
    const fs::path path = prepare_out(cfg) / kGeneratedFile;
    data::export_csv(batch, path);
    log << "wrote " << path.string() << ": " << dims_str(batch) << "\n";
    return batch;
}

eval::EvalReport cmd_evaluate(const RunConfig& cfg, const fs::path& real_path, const fs::path& synthetic_path,
                              std::ostream& log) {
    for (const auto& p : {real_path, synthetic_path}) {
        if (!fs::exists(p)) throw IoError("file not found: " + p.string());
    }
    const auto real_raw = data::load_csv(real_path);
    const auto synth_raw = data::load_csv(synthetic_path);
    if (real_raw.steps != synth_raw.steps || real_raw.features != synth_raw.features) {
        throw ShapeError("evaluate: real data is (T=" + std::to_string(real_raw.steps) +
                         ", F=" + std::to_string(real_raw.features) + ") but synthetic data is (T=" +
                         std::to_string(synth_raw.steps) + ", F=" + std::to_string(synth_raw.features) + ")");
    }
    const auto scaler = data::scaler_fit(real_raw);
    const auto real = data::scaler_apply(real_raw, scaler);
    const auto synth = data::scaler_apply(synth_raw, scaler);

    eval::ReplicationSettings settings;
    settings.replications = cfg.evaluation.replications;
    settings.base_seed = cfg.train.seed;
    settings.discriminative_budget = cfg.evaluation.discriminative;
    settings.predictive_budget = cfg.evaluation.predictive;
    auto report = eval::run_replications(real, synth, settings);

    const std::size_t k = cfg.evaluation.embedding_samples;
    const auto real_sub = real.slice(0, std::min(k, real.samples));
    const auto synth_sub = synth.slice(0, std::min(k, synth.samples));
    const fs::path out = prepare_out(cfg);
    report.embeddings.push_back(eval::pca_project(real_sub, synth_sub));
    const std::size_t pooled = real_sub.samples + synth_sub.samples;
    eval::TsneConfig tsne_cfg;
    tsne_cfg.iterations = cfg.evaluation.tsne_iterations;
    tsne_cfg.perplexity = std::min(cfg.evaluation.tsne_perplexity, static_cast<double>(pooled) / 3.0);
    numkit::Rng rng(cfg.train.seed);
    report.embeddings.push_back(eval::tsne_project(real_sub, synth_sub, tsne_cfg, rng));

    eval::write_report(report, out / kReportFile);
    eval::write_embedding_csv(report.embeddings[0], out / kPcaFile);
    eval::write_embedding_csv(report.embeddings[1], out / kTsneFile);
    log << "discriminative " << report.discriminative.mean << " +- " << report.discriminative.std << "\n";
    log << "predictive " << report.predictive.mean << " +- " << report.predictive.std << "\n";
    log << "wrote " << (out / kReportFile).string() << ", " << kPcaFile << ", " << kTsneFile << "\n";
    return report;
}

int exit_code_for(const std::exception& e) noexcept {
    if (dynamic_cast<const CorruptionError*>(&e)) return kExitCorruption;
    if (dynamic_cast<const TrainingError*>(&e)) return kExitTraining;
    if (dynamic_cast<const Error*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e) ||
        dynamic_cast<const json::exception*>(&e)) {
        return kExitConfig;
    }
    return 1;
}

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Synthetic time-series generation with dual autoencoders and adversarial training"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::vector<std::string> ablations;
    std::optional<std::size_t> count;
    std::string data_path;
    std::string checkpoint;
    std::string real_path;
    std::string synthetic_path;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run config")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Seed (overrides the config)");
        sub->add_option("--out", out_dir, "Output directory (overrides the config)");
    };
    CLI::App* sines = app.add_subcommand("sines", "Write a Sines dataset as CSV");
    common(sines);
    CLI::App* train = app.add_subcommand("train", "Run all four training phases");
    common(train);
    train->add_option("--ablate", ablations, "Disable a component: supervised, dual-disc, ts-loss, early-stop");
    train->add_option("--data", data_path, "Dataset CSV in sample_id,t,... layout (overrides the config)");
    CLI::App* generate = app.add_subcommand("generate", "Sample synthetic series from a checkpoint");
    common(generate);
    generate->add_option("--checkpoint", checkpoint, "Checkpoint written by train")->required();
    generate->add_option("--count", count, "Number of samples");
    CLI::App* evaluate = app.add_subcommand("evaluate", "Score a synthetic CSV against a real CSV");
    common(evaluate);
    evaluate->add_option("--real", real_path, "Real data CSV")->required();
    evaluate->add_option("--synthetic", synthetic_path, "Synthetic data CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
        if (config_path.empty()) cfg.sines = data::SineConfig{};
        if (seed) {
            cfg.train.seed = *seed;
            if (cfg.sines && sines->parsed()) cfg.sines->seed = *seed;
        }
        if (!out_dir.empty()) cfg.out = out_dir;
        for (const auto& a : ablations) apply_ablation(cfg.train, a);
        if (!data_path.empty()) {
            cfg.sines.reset();
            cfg.csv = CsvSource{data_path, "samples", 1};
        }
        if (count) cfg.count = *count;
        cfg.validate();

        if (sines->parsed()) {
            cmd_sines(cfg, out);
        } else if (train->parsed()) {
            cmd_train(cfg, out);
        } else if (generate->parsed()) {
            cmd_generate(cfg, checkpoint, out);
        } else {
            cmd_evaluate(cfg, real_path, synthetic_path, out);
        }
        return kExitOk;
    } catch (const TrainingError& e) {
        err << "training failed in phase " << e.phase() << ": " << e.what() << "\n";
        return kExitTraining;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

}  // namespace seriesforge::cli
