#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "actrec/eval.hpp"
#include "actrec/model_io.hpp"
#include "test_util.hpp"

using namespace actrec;

namespace {

DatasetManifest fake_manifest(int per_class) {
    DatasetManifest manifest;
    for (ActivityClass c : all_classes())
        for (int i = 0; i < per_class; ++i) {
            ManifestEntry e;
            e.sequence_id = class_name(c) + "_" + std::to_string(i);
            e.frames_path = e.sequence_id + ".fgy";
            e.activity = c;
            e.n_frames = 30;
            manifest.entries.push_back(std::move(e));
        }
    return manifest;
}

// One small on-disk dataset shared by the training tests.
struct SmallDataset {
    testutil::TempDir dir{"eval_ds"};
    DatasetManifest manifest;
    FeatureConfig features;
    FeatureStore store;
    SplitPlan plan;
    FusionConfig fusion;

    SmallDataset() {
        SceneConfig scene;
        scene.width = 96;
        scene.height = 72;
        scene.n_frames = 30;
        manifest = synth_dataset(dir.str(), 3, scene, std::nullopt, 8181);
        store = extract_all_features(dir.str("manifest.json"), manifest, features);
        plan = make_splits(manifest, 3, 99);
    }
};

SmallDataset& dataset() {
    static SmallDataset ds;
    return ds;
}

TrainSpec dbn_spec() {
    TrainSpec spec;
    spec.kind = ModelKind::Dbn;
    spec.dbn.n_phase = 2;
    spec.dbn.n_motion = 2;
    return spec;
}

}  // namespace

TEST_CASE("splits: ten sequences of a class across ten sets") {
    const DatasetManifest manifest = fake_manifest(10);
    const SplitPlan plan = make_splits(manifest, 10, 5);
    for (const auto& fold : plan.folds) {
        std::array<int, kNumClasses> held{};
        for (const auto& id : fold.test_ids)
            ++held[static_cast<std::size_t>(class_id(manifest.find(id).activity))];
        for (int count : held) CHECK(count == 1);
    }
}

TEST_CASE("splits: deterministic given the seed") {
    const DatasetManifest manifest = fake_manifest(7);
    const SplitPlan a = make_splits(manifest, 10, 42);
    const SplitPlan b = make_splits(manifest, 10, 42);
    for (int k = 0; k < 10; ++k) {
        CHECK(a.folds[k].test_ids == b.folds[k].test_ids);
        CHECK(a.folds[k].train_ids == b.folds[k].train_ids);
    }
    const SplitPlan c = make_splits(manifest, 10, 43);
    bool any_difference = false;
    for (int k = 0; k < 10; ++k) any_difference |= a.folds[k].test_ids != c.folds[k].test_ids;
    CHECK(any_difference);
}

TEST_CASE("splits: soundness and coverage") {
    const DatasetManifest manifest = fake_manifest(30);
    const SplitPlan plan = make_splits(manifest, 10, 7);

    std::set<std::string> all_held;
    for (const auto& fold : plan.folds) {
        std::set<std::string> train(fold.train_ids.begin(), fold.train_ids.end());
        for (const auto& id : fold.test_ids) {
            CHECK(!train.contains(id));
            all_held.insert(id);
        }
        // Every class appears in every training partition.
        std::array<int, kNumClasses> counts{};
        for (const auto& id : fold.train_ids)
            ++counts[static_cast<std::size_t>(class_id(manifest.find(id).activity))];
        for (int count : counts) CHECK(count > 0);
    }
    CHECK(all_held.size() == manifest.entries.size());
}

TEST_CASE("splits: insufficient data is rejected") {
    DatasetManifest manifest = fake_manifest(2);
    manifest.entries.pop_back();  // one class down to a single sequence
    CHECK_THROWS_AS(make_splits(manifest, 10, 1), InsufficientData);
}

TEST_CASE("train_bank produces a complete valid bank") {
    auto& ds = dataset();
    const ModelBank bank =
        train_bank(ds.store, ds.manifest, ds.plan, 0, dbn_spec(), ds.features, ds.fusion);
    CHECK(bank.dbn.size() == 20);
    CHECK_NOTHROW(bank.validate());
    CHECK(bank.fingerprint == ds.features.fingerprint());
}

TEST_CASE("train_bank with a single-state hmm hits the data moments") {
    auto& ds = dataset();
    TrainSpec spec;
    spec.kind = ModelKind::Hmm;
    spec.hmm.n_states = 1;
    const ModelBank bank =
        train_bank(ds.store, ds.manifest, ds.plan, 0, spec, ds.features, ds.fusion);

    // Hand-average the walk/face training windows.
    double sum = 0.0;
    long count = 0;
    for (const auto& id : ds.plan.folds[0].train_ids) {
        if (ds.manifest.find(id).activity != ActivityClass::Walk) continue;
        const FeatureSequence win =
            subsample_window(ds.store.at(id), ds.fusion.stride, ds.fusion.cap);
        for (int t = 0; t < win.n_steps(); ++t) {
            sum += win.block(t, RoiKind::Face)[0];
            ++count;
        }
    }
    const auto& model = bank.hmm[ModelBank::cell(ActivityClass::Walk, RoiKind::Face)];
    CHECK(model.emit[0].mean[0] == doctest::Approx(sum / count).epsilon(1e-9));
}

TEST_CASE("retraining writes byte-identical banks") {
    auto& ds = dataset();
    const ModelBank a =
        train_bank(ds.store, ds.manifest, ds.plan, 1, dbn_spec(), ds.features, ds.fusion);
    const ModelBank b =
        train_bank(ds.store, ds.manifest, ds.plan, 1, dbn_spec(), ds.features, ds.fusion);
    CHECK(bank_to_json(a) == bank_to_json(b));
}

TEST_CASE("evaluate bookkeeping identities") {
    auto& ds = dataset();
    const ModelBank bank =
        train_bank(ds.store, ds.manifest, ds.plan, 0, dbn_spec(), ds.features, ds.fusion);
    const EvalOutput out = evaluate_detailed(ds.store, ds.manifest, ds.plan, 0, bank, ds.fusion);

    // Confusion row sums equal the per-class test counts.
    std::array<long, kNumClasses> expected{};
    for (const auto& id : ds.plan.folds[0].test_ids)
        ++expected[static_cast<std::size_t>(class_id(ds.manifest.find(id).activity))];
    long trace = 0;
    for (int c = 0; c < kNumClasses; ++c) {
        long row_sum = 0;
        for (long v : out.metrics.confusion[c]) row_sum += v;
        CHECK(row_sum == expected[c]);
        trace += out.metrics.confusion[c][c];
    }
    CHECK(out.metrics.n_test == static_cast<long>(ds.plan.folds[0].test_ids.size()));
    CHECK(out.metrics.overall_accuracy() ==
          doctest::Approx(static_cast<double>(trace) / out.metrics.n_test));
    CHECK(out.decisions.size() == ds.plan.folds[0].test_ids.size());
}

TEST_CASE("evaluating a bank on its own training fold is at least as good") {
    auto& ds = dataset();
    const ModelBank bank =
        train_bank(ds.store, ds.manifest, ds.plan, 0, dbn_spec(), ds.features, ds.fusion);
    const Metrics held_out = evaluate(ds.store, ds.manifest, ds.plan, 0, bank, ds.fusion);

    SplitPlan self;
    self.n_sets = 1;
    self.folds.push_back({ds.plan.folds[0].train_ids, ds.plan.folds[0].train_ids});
    const Metrics on_train = evaluate(ds.store, ds.manifest, self, 0, bank, ds.fusion);
    CHECK(on_train.overall_accuracy() >= held_out.overall_accuracy());
}

TEST_CASE("empty test sets are an error, not NaN metrics") {
    auto& ds = dataset();
    const ModelBank bank =
        train_bank(ds.store, ds.manifest, ds.plan, 0, dbn_spec(), ds.features, ds.fusion);
    SplitPlan degenerate;
    degenerate.n_sets = 1;
    degenerate.folds.push_back({ds.plan.folds[0].train_ids, {}});
    CHECK_THROWS_AS(evaluate(ds.store, ds.manifest, degenerate, 0, bank, ds.fusion),
                    InsufficientData);
}

TEST_CASE("decision and trajectory csv exports") {
    auto& ds = dataset();
    const ModelBank bank =
        train_bank(ds.store, ds.manifest, ds.plan, 0, dbn_spec(), ds.features, ds.fusion);
    const EvalOutput out = evaluate_detailed(ds.store, ds.manifest, ds.plan, 0, bank, ds.fusion);

    const std::string decisions = decisions_csv(out.decisions);
    CHECK(decisions.rfind(
              "sequence_id,true_class,winner,tie_broken,vote_face,vote_hand,vote_body,vote_leg\n",
              0) == 0);
    CHECK(std::count(decisions.begin(), decisions.end(), '\n') ==
          1 + static_cast<long>(out.decisions.size()));

    const std::string traj = trajectories_csv(out.decisions);
    CHECK(traj.rfind("sequence_id,step,p_walk,p_sit,p_lift,p_putdown,p_stand\n", 0) == 0);
}

TEST_CASE("bank save/load round trip") {
    auto& ds = dataset();
    testutil::TempDir dir("bankio");
    const ModelBank bank =
        train_bank(ds.store, ds.manifest, ds.plan, 2, dbn_spec(), ds.features, ds.fusion);

    save_bank(bank, dir.str("bank.json"));
    const ModelBank loaded = load_bank(dir.str("bank.json"));
    save_bank(loaded, dir.str("bank2.json"));
    CHECK(testutil::read_file(dir.str("bank.json")) == testutil::read_file(dir.str("bank2.json")));

    // Classifying with the loaded bank reproduces the in-memory decisions.
    const EvalOutput a = evaluate_detailed(ds.store, ds.manifest, ds.plan, 2, bank, ds.fusion);
    const EvalOutput b = evaluate_detailed(ds.store, ds.manifest, ds.plan, 2, loaded, ds.fusion);
    CHECK(decisions_csv(a.decisions) == decisions_csv(b.decisions));
    CHECK(trajectories_csv(a.decisions) == trajectories_csv(b.decisions));
}

TEST_CASE("bank loading validates content") {
    auto& ds = dataset();
    testutil::TempDir dir("bankbad");
    const ModelBank bank =
        train_bank(ds.store, ds.manifest, ds.plan, 0, dbn_spec(), ds.features, ds.fusion);
    const std::string text = bank_to_json(bank);

    SUBCASE("corrupted stochastic row") {
        auto doc = nlohmann::ordered_json::parse(text);
        auto& row = doc["models"][0]["params"]["phase_trans"][0];
        row[0] = row[0].get<double>() - 0.1;  // row now sums to 0.9
        CHECK_THROWS_AS(bank_from_json(doc.dump(2)), CorruptModel);
    }
    SUBCASE("wrong version") {
        std::string t = text;
        const auto pos = t.find("\"format_version\": 1");
        REQUIRE(pos != std::string::npos);
        t.replace(pos, std::string("\"format_version\": 1").size(), "\"format_version\": 9");
        CHECK_THROWS_AS(bank_from_json(t), SchemaVersionMismatch);
    }
    SUBCASE("garbage") { CHECK_THROWS_AS(bank_from_json("not json at all"), CorruptModel); }
}

TEST_CASE("experiment config json round trip") {
    ExperimentConfig config = ExperimentConfig::defaults();
    config.per_class_count = 7;
    config.master_seed = 555;
    config.noisy.pixel_sigma = 3.25;
    const std::string text = experiment_config_to_json(config);
    const ExperimentConfig back = experiment_config_from_json(text);
    CHECK(back.per_class_count == 7);
    CHECK(back.master_seed == 555);
    CHECK(back.noisy.pixel_sigma == 3.25);
    CHECK(experiment_config_to_json(back) == text);

    const ExperimentConfig partial = experiment_config_from_json("{\"per_class_count\": 4}");
    CHECK(partial.per_class_count == 4);
    CHECK(partial.scene.width == 160);
}

namespace {

ExperimentResults fake_results() {
    ExperimentResults results;
    for (ModelKind kind : {ModelKind::Dbn, ModelKind::Hmm})
        for (const std::string profile : {"clean", "noisy", "indoor", "outdoor"}) {
            Metrics metrics;
            for (int c = 0; c < kNumClasses; ++c) {
                metrics.confusion[c][c] = 8 + (kind == ModelKind::Dbn ? 1 : 0);
                metrics.confusion[c][(c + 1) % kNumClasses] =
                    profile == "noisy" || profile == "outdoor" ? 2 : 1;
            }
            for (int i = 0; i < kNumClasses; ++i)
                for (int j = 0; j < kNumClasses; ++j) metrics.n_test += metrics.confusion[i][j];
            results.cells.push_back({profile, kind, metrics});
        }
    results.fig3_sequence_id = "lift_004";
    results.fig3_trajectory = {{0.2, 0.2, 0.2, 0.2, 0.2}, {0.1, 0.1, 0.6, 0.1, 0.1}};
    results.lift_trajectory_endpoints = {{0.2, 0.6}, {0.25, 0.7}};
    return results;
}

}  // namespace

TEST_CASE("results json round trip") {
    const ExperimentResults results = fake_results();
    const std::string text = results_to_json(results);
    const ExperimentResults back = results_from_json(text);
    CHECK(results_to_json(back) == text);
    CHECK(back.metrics_for("clean", ModelKind::Dbn).n_test ==
          results.metrics_for("clean", ModelKind::Dbn).n_test);
    CHECK(back.degradation(ModelKind::Dbn, ActivityClass::Lift) ==
          doctest::Approx(results.degradation(ModelKind::Dbn, ActivityClass::Lift)));
}

TEST_CASE("figure data emission") {
    testutil::TempDir dir("figdata");
    const ExperimentResults results = fake_results();
    emit_figure_data(results, dir.str());

    for (const std::string name : {"fig1_dbn_accuracy.csv", "fig2_hmm_accuracy.csv",
                                   "fig3_posterior_trajectory.csv", "fig4_dbn_vs_hmm.csv"})
        CHECK(std::filesystem::exists(dir.str(name)));

    // fig1/fig2 accuracies live in [0, 1].
    for (const std::string name : {"fig1_dbn_accuracy.csv", "fig2_hmm_accuracy.csv"}) {
        std::ifstream in(dir.str(name));
        std::string line;
        std::getline(in, line);
        CHECK(line == "class,clean_accuracy,noisy_accuracy");
        while (std::getline(in, line)) {
            const auto c1 = line.find(','), c2 = line.rfind(',');
            const double clean = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
            const double noisy = std::stod(line.substr(c2 + 1));
            CHECK(clean >= 0.0);
            CHECK(clean <= 1.0);
            CHECK(noisy >= 0.0);
            CHECK(noisy <= 1.0);
        }
    }

    // fig3 rows sum to 1 across the class columns.
    {
        std::ifstream in(dir.str("fig3_posterior_trajectory.csv"));
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            double sum = 0.0;
            std::size_t pos = line.find(',');         // skip sequence_id
            pos = line.find(',', pos + 1);            // skip step
            while (pos != std::string::npos) {
                const std::size_t next = line.find(',', pos + 1);
                sum += std::stod(line.substr(pos + 1, next - pos - 1));
                pos = next;
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }

    // Re-emission is byte identical.
    testutil::TempDir dir2("figdata2");
    emit_figure_data(results, dir2.str());
    CHECK(testutil::read_tree(dir.str()) == testutil::read_tree(dir2.str()));
}
