// Command-line surface: synth / extract / train / eval / experiment / figdata.
// Every verb takes an optional experiment-config document plus flag
// overrides. Exit codes: 0 ok, 1 validation error, 2 I/O error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <nlohmann/json.hpp>

#include "actrec/eval.hpp"
#include "actrec/model_io.hpp"
#include "actrec/rng.hpp"

namespace fs = std::filesystem;
using namespace actrec;

namespace {

ExperimentConfig load_config(const std::string& path) {
    if (path.empty()) return ExperimentConfig::defaults();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return experiment_config_from_json(text);
}

std::optional<NoiseConfig> profile_noise(const ExperimentConfig& config,
                                         const std::string& profile) {
    if (profile == "clean" || profile == "indoor") return std::nullopt;
    if (profile == "noisy") return config.noisy;
    if (profile == "outdoor") return config.outdoor;
    throw InvalidConfig("unknown noise profile: " + profile +
                        " (expected clean, indoor, noisy or outdoor)");
}

SplitPlan plan_for(const ExperimentConfig& config, const DatasetManifest& manifest) {
    return make_splits(manifest, config.n_sets, mix_seed(config.master_seed, 0x5B117ULL));
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

std::string metrics_report(const Metrics& metrics) {
    nlohmann::ordered_json doc;
    doc["overall_accuracy"] = metrics.overall_accuracy();
    doc["per_class_accuracy"] = nlohmann::ordered_json::object();
    for (ActivityClass c : all_classes())
        doc["per_class_accuracy"][class_name(c)] = metrics.per_class_accuracy(c);
    doc["confusion"] = nlohmann::ordered_json::array();
    for (const auto& row : metrics.confusion) doc["confusion"].push_back(row);
    doc["n_test"] = metrics.n_test;
    doc["tie_break_rate"] = metrics.tie_break_rate();
    return doc.dump(2) + "\n";
}

struct CommonOpts {
    std::string config_path;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic-scene human action recognition pipeline"};
    app.require_subcommand(1);

    CommonOpts common;

    // ---- synth
    auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
    std::string synth_out, synth_profile = "clean";
    int synth_per_class = -1;
    std::uint64_t synth_seed = 0;
    bool synth_seed_set = false, synth_paper_scale = false;
    synth->add_option("--config", common.config_path, "Experiment config document (json)");
    synth->add_option("--out", synth_out, "Output dataset directory")->required();
    synth->add_option("--profile", synth_profile, "Noise profile: clean|indoor|noisy|outdoor");
    synth->add_option("--per-class", synth_per_class, "Sequences per class");
    synth->add_option("--seed", synth_seed, "Master seed override")
        ->each([&](const std::string&) { synth_seed_set = true; });
    synth->add_flag("--paper-scale", synth_paper_scale, "Render at 640x480");

    // ---- extract
    auto* extract = app.add_subcommand("extract", "Export per-sequence feature CSVs");
    std::string extract_manifest, extract_out, extract_id;
    extract->add_option("--config", common.config_path, "Experiment config document (json)");
    extract->add_option("--dataset", extract_manifest, "Dataset manifest.json")->required();
    extract->add_option("--out", extract_out, "Output directory")->required();
    extract->add_option("--sequence", extract_id, "Only this sequence id");

    // ---- train
    auto* train = app.add_subcommand("train", "Train one model bank on a split");
    std::string train_manifest, train_out, train_kind = "dbn";
    int train_set = 0;
    train->add_option("--config", common.config_path, "Experiment config document (json)");
    train->add_option("--dataset", train_manifest, "Dataset manifest.json")->required();
    train->add_option("--kind", train_kind, "Model kind: dbn|hmm");
    train->add_option("--set", train_set, "Split set index");
    train->add_option("--out", train_out, "Output bank path (json)")->required();

    // ---- eval
    auto* eval = app.add_subcommand("eval", "Evaluate a bank on a held-out split");
    std::string eval_manifest, eval_bank, eval_out, eval_decisions, eval_trajectories;
    int eval_set = 0;
    eval->add_option("--config", common.config_path, "Experiment config document (json)");
    eval->add_option("--dataset", eval_manifest, "Dataset manifest.json")->required();
    eval->add_option("--bank", eval_bank, "Model bank path")->required();
    eval->add_option("--set", eval_set, "Split set index");
    eval->add_option("--out", eval_out, "Metrics report path (json)");
    eval->add_option("--decisions", eval_decisions, "Per-sequence decisions csv path");
    eval->add_option("--trajectories", eval_trajectories, "Posterior trajectory csv path");

    // ---- experiment
    auto* experiment =
        app.add_subcommand("experiment", "Run the clean/noisy/outdoor comparison end to end");
    std::string experiment_out;
    experiment->add_option("--config", common.config_path, "Experiment config document (json)");
    experiment->add_option("--out", experiment_out, "Output directory")->required();

    // ---- figdata
    auto* figdata = app.add_subcommand("figdata", "Emit figure CSVs from experiment results");
    std::string figdata_results, figdata_out;
    figdata->add_option("--results", figdata_results, "results.json from `experiment`")
        ->required();
    figdata->add_option("--out", figdata_out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig config = load_config(common.config_path);

        if (*synth) {
            if (synth_per_class > 0) config.per_class_count = synth_per_class;
            if (synth_seed_set) config.master_seed = synth_seed;
            if (synth_paper_scale) config.scene = paper_scale(config.scene);
            const auto noise = profile_noise(config, synth_profile);
            const DatasetManifest manifest =
                synth_dataset(synth_out, config.per_class_count, config.scene, noise,
                              config.master_seed, noise ? synth_profile : "");
            std::cout << "wrote " << manifest.entries.size() << " sequences to " << synth_out
                      << "\n";
        } else if (*extract) {
            const DatasetManifest manifest = load_manifest(extract_manifest);
            std::error_code ec;
            fs::create_directories(extract_out, ec);
            if (ec) throw IoError("cannot create output directory: " + extract_out);
            int written = 0;
            for (const auto& entry : manifest.entries) {
                if (!extract_id.empty() && entry.sequence_id != extract_id) continue;
                const FeatureSequence seq = extract_sequence_features(
                    load_entry_frames(extract_manifest, entry), config.features);
                write_file((fs::path(extract_out) / (entry.sequence_id + ".features.csv")).string(),
                           feature_sequence_csv(seq));
                ++written;
            }
            if (!extract_id.empty() && written == 0)
                throw ValidationError("sequence not in manifest: " + extract_id);
            std::cout << "wrote " << written << " feature csv files to " << extract_out << "\n";
        } else if (*train) {
            const DatasetManifest manifest = load_manifest(train_manifest);
            const FeatureStore store =
                extract_all_features(train_manifest, manifest, config.features);
            TrainSpec spec;
            spec.kind = model_kind_from_name(train_kind);
            spec.dbn = config.dbn;
            spec.hmm = config.hmm;
            spec.prior_mode = config.prior_mode;
            const ModelBank bank = train_bank(store, manifest, plan_for(config, manifest),
                                              train_set, spec, config.features, config.fusion);
            save_bank(bank, train_out);
            std::cout << "wrote " << model_kind_name(bank.kind) << " bank to " << train_out
                      << "\n";
        } else if (*eval) {
            const DatasetManifest manifest = load_manifest(eval_manifest);
            const ModelBank bank = load_bank(eval_bank);
            const FeatureStore store =
                extract_all_features(eval_manifest, manifest, config.features);
            const EvalOutput out = evaluate_detailed(store, manifest, plan_for(config, manifest),
                                                     eval_set, bank, config.fusion);
            const std::string report = metrics_report(out.metrics);
            if (eval_out.empty())
                std::cout << report;
            else
                write_file(eval_out, report);
            if (!eval_decisions.empty()) write_file(eval_decisions, decisions_csv(out.decisions));
            if (!eval_trajectories.empty())
                write_file(eval_trajectories, trajectories_csv(out.decisions));
        } else if (*experiment) {
            const ExperimentResults results = run_noise_experiment(config, experiment_out);
            std::cout << "dbn clean overall = "
                      << results.metrics_for("clean", ModelKind::Dbn).overall_accuracy()
                      << "\nresults written to " << experiment_out << "\n";
        } else if (*figdata) {
            emit_figure_data(load_results(figdata_results), figdata_out);
            std::cout << "figure csv files written to " << figdata_out << "\n";
        }
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
