#ifndef ACTREC_EVAL_HPP
#define ACTREC_EVAL_HPP

#include <map>
#include <string>
#include <vector>

#include "actrec/dataset.hpp"
#include "actrec/fusion.hpp"

namespace actrec {

struct SplitPlan {
    struct Fold {
        std::vector<std::string> train_ids;
        std::vector<std::string> test_ids;
    };
    int n_sets = 10;
    std::uint64_t seed = 0;
    std::vector<Fold> folds;
};

// Seeded per-class shuffle, round-robin held-out assignment; the remainder
// of the manifest trains. Requires at least 2 sequences per class.
SplitPlan make_splits(const DatasetManifest& manifest, int n_sets, std::uint64_t seed);

struct Metrics {
    std::array<std::array<long, kNumClasses>, kNumClasses> confusion{};  // [true][pred]
    long n_test = 0;
    long n_tie_broken = 0;

    double overall_accuracy() const;
    double per_class_accuracy(ActivityClass c) const;  // 0 when the class has no test rows
    double tie_break_rate() const;
    void merge(const Metrics& other);
};

// Extracted features keyed by sequence id; one per dataset so folds share
// the extraction work.
using FeatureStore = std::map<std::string, FeatureSequence>;

FeatureStore extract_all_features(const std::string& manifest_path,
                                  const DatasetManifest& manifest, const FeatureConfig& config);

enum class PriorMode : int { Uniform = 0, Empirical = 1 };

struct TrainSpec {
    ModelKind kind = ModelKind::Dbn;
    DbnConfig dbn;
    HmmConfig hmm;
    PriorMode prior_mode = PriorMode::Uniform;
};

ModelBank train_bank(const FeatureStore& store, const DatasetManifest& manifest,
                     const SplitPlan& plan, int set_index, const TrainSpec& spec,
                     const FeatureConfig& features, const FusionConfig& fusion);

struct SequenceDecision {
    std::string sequence_id;
    ActivityClass truth = ActivityClass::Walk;
    Decision decision;
};

struct EvalOutput {
    Metrics metrics;
    std::vector<SequenceDecision> decisions;  // ordered by sequence id
};

EvalOutput evaluate_detailed(const FeatureStore& store, const DatasetManifest& manifest,
                             const SplitPlan& plan, int set_index, const ModelBank& bank,
                             const FusionConfig& fusion);

Metrics evaluate(const FeatureStore& store, const DatasetManifest& manifest,
                 const SplitPlan& plan, int set_index, const ModelBank& bank,
                 const FusionConfig& fusion);

// `sequence_id,true_class,winner,tie_broken,vote_face,vote_hand,vote_body,vote_leg`
std::string decisions_csv(const std::vector<SequenceDecision>& decisions);
// `sequence_id,step,p_walk,p_sit,p_lift,p_putdown,p_stand`
std::string trajectories_csv(const std::vector<SequenceDecision>& decisions);

struct ExperimentConfig {
    SceneConfig scene;  // per-sequence template; activity is set per class
    int per_class_count = 30;
    int n_sets = 10;
    std::uint64_t master_seed = 2026;
    FeatureConfig features;
    DbnConfig dbn;
    HmmConfig hmm;
    FusionConfig fusion;
    PriorMode prior_mode = PriorMode::Uniform;
    NoiseConfig noisy;    // "noisy" profile; "clean"/"indoor" carry no noise
    NoiseConfig outdoor;  // "outdoor" profile: illumination ramp + higher sigma

    static ExperimentConfig defaults();
    void validate() const;
};

ExperimentConfig experiment_config_from_json(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& config);

inline constexpr int kResultsFormatVersion = 1;

struct ExperimentResults {
    struct Cell {
        std::string profile;  // clean | noisy | indoor | outdoor
        ModelKind kind = ModelKind::Dbn;
        Metrics metrics;
    };
    std::vector<Cell> cells;

    std::string fig3_sequence_id;
    std::vector<std::array<double, kNumClasses>> fig3_trajectory;  // DBN, clean, one lift sequence
    // (first, final) true-class prefix posterior of every correctly
    // classified held-out lift sequence (DBN, clean).
    std::vector<std::pair<double, double>> lift_trajectory_endpoints;
    // Per-ROI single-component vote accuracy on the clean DBN evaluation,
    // recorded to compare against the fused vote.
    std::array<long, kNumRois> clean_component_correct{};
    long clean_component_n = 0;

    double component_accuracy(RoiKind roi) const;

    const Metrics& metrics_for(const std::string& profile, ModelKind kind) const;
    double degradation(ModelKind kind, ActivityClass c) const;  // clean - noisy accuracy
    double mean_degradation(ModelKind kind) const;
};

// Generates the clean / noisy / outdoor datasets under out_dir, trains and
// evaluates both model kinds across every fold, and writes results.json plus
// a comparison table.
ExperimentResults run_noise_experiment(const ExperimentConfig& config, const std::string& out_dir);

std::string results_to_json(const ExperimentResults& results);
ExperimentResults results_from_json(const std::string& text);
ExperimentResults load_results(const std::string& path);

// fig1_dbn_accuracy.csv, fig2_hmm_accuracy.csv, fig3_posterior_trajectory.csv,
// fig4_dbn_vs_hmm.csv
void emit_figure_data(const ExperimentResults& results, const std::string& out_dir);

}  // namespace actrec

#endif
