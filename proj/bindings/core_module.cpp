// Python bindings for the main pipeline operations. Frames travel as
// (n_frames, height, width) uint8 arrays, observation sequences as (T, 8)
// float64, fused feature sequences as (T, 32) float64.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "actrec/eval.hpp"
#include "actrec/model_io.hpp"
#include "actrec/pca.hpp"
#include "actrec/rng.hpp"

namespace py = pybind11;
using namespace actrec;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

FrameSequence frames_from_array(const U8Array& arr) {
    if (arr.ndim() != 3) throw DimensionMismatch("expected a (n_frames, height, width) array");
    FrameSequence seq;
    seq.height = static_cast<int>(arr.shape(1));
    seq.width = static_cast<int>(arr.shape(2));
    const std::size_t frame_size = static_cast<std::size_t>(seq.width) * seq.height;
    const auto* data = arr.data();
    for (py::ssize_t t = 0; t < arr.shape(0); ++t)
        seq.frames.emplace_back(data + t * frame_size, data + (t + 1) * frame_size);
    return seq;
}

py::array_t<std::uint8_t> frames_to_array(const FrameSequence& seq) {
    py::array_t<std::uint8_t> arr({seq.n_frames(), seq.height, seq.width});
    auto* out = arr.mutable_data();
    const std::size_t frame_size = static_cast<std::size_t>(seq.width) * seq.height;
    for (int t = 0; t < seq.n_frames(); ++t)
        std::copy(seq.frames[static_cast<std::size_t>(t)].begin(),
                  seq.frames[static_cast<std::size_t>(t)].end(), out + t * frame_size);
    return arr;
}

ObsSequence obs_from_array(const F64Array& arr) {
    if (arr.ndim() != 2 || arr.shape(1) != kComponentDim)
        throw DimensionMismatch("expected a (T, 8) observation array");
    ObsSequence obs(static_cast<std::size_t>(arr.shape(0)));
    const auto view = arr.unchecked<2>();
    for (py::ssize_t t = 0; t < arr.shape(0); ++t)
        for (int i = 0; i < kComponentDim; ++i)
            obs[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] = view(t, i);
    return obs;
}

std::vector<ObsSequence> obs_list_from(const std::vector<F64Array>& arrays) {
    std::vector<ObsSequence> out;
    out.reserve(arrays.size());
    for (const auto& a : arrays) out.push_back(obs_from_array(a));
    return out;
}

py::array_t<double> features_to_array(const FeatureSequence& seq) {
    py::array_t<double> arr({seq.n_steps(), kFusedDim});
    auto view = arr.mutable_unchecked<2>();
    for (int t = 0; t < seq.n_steps(); ++t)
        for (int i = 0; i < kFusedDim; ++i)
            view(t, i) = seq.steps[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
    return arr;
}

FeatureSequence features_from_array(const F64Array& arr, const std::string& fingerprint) {
    if (arr.ndim() != 2 || arr.shape(1) != kFusedDim)
        throw DimensionMismatch("expected a (T, 32) feature array");
    FeatureSequence seq;
    seq.fingerprint = fingerprint;
    const auto view = arr.unchecked<2>();
    for (py::ssize_t t = 0; t < arr.shape(0); ++t) {
        FusedVector v{};
        for (int i = 0; i < kFusedDim; ++i) v[static_cast<std::size_t>(i)] = view(t, i);
        seq.steps.push_back(v);
    }
    return seq;
}

py::array_t<double> trajectory_to_array(const std::vector<std::array<double, kNumClasses>>& rows) {
    py::array_t<double> arr({static_cast<int>(rows.size()), kNumClasses});
    auto view = arr.mutable_unchecked<2>();
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (int c = 0; c < kNumClasses; ++c) view(static_cast<py::ssize_t>(t), c) = rows[t][static_cast<std::size_t>(c)];
    return arr;
}

ExperimentConfig config_from_text(const std::string& config_json) {
    if (config_json.empty()) return ExperimentConfig::defaults();
    return experiment_config_from_json(config_json);
}

py::dict decision_to_dict(const Decision& decision) {
    py::dict out;
    out["winner"] = class_name(decision.winner);
    out["tie_broken"] = decision.tie_broken;
    py::list votes;
    for (RoiKind roi : all_rois())
        votes.append(class_name(decision.component_votes[static_cast<std::size_t>(roi_id(roi))]));
    out["votes"] = votes;
    py::array_t<double> posteriors({kNumRois, kNumClasses});
    auto view = posteriors.mutable_unchecked<2>();
    for (int r = 0; r < kNumRois; ++r)
        for (int c = 0; c < kNumClasses; ++c)
            view(r, c) = decision.component_posteriors[static_cast<std::size_t>(r)]
                             .p[static_cast<std::size_t>(c)];
    out["posteriors"] = posteriors;
    out["trajectory"] = trajectory_to_array(decision.trajectory);
    return out;
}

py::dict metrics_to_dict(const Metrics& metrics) {
    py::dict out;
    out["overall_accuracy"] = metrics.overall_accuracy();
    py::dict per_class;
    for (ActivityClass c : all_classes())
        per_class[class_name(c).c_str()] = metrics.per_class_accuracy(c);
    out["per_class_accuracy"] = per_class;
    py::array_t<long> confusion({kNumClasses, kNumClasses});
    auto view = confusion.mutable_unchecked<2>();
    for (int i = 0; i < kNumClasses; ++i)
        for (int j = 0; j < kNumClasses; ++j)
            view(i, j) = metrics.confusion[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    out["confusion"] = confusion;
    out["n_test"] = metrics.n_test;
    out["tie_break_rate"] = metrics.tie_break_rate();
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Synthetic-scene human action recognition: factored temporal models, "
              "an HMM baseline, ROI motion features and MAP vote fusion.";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::enum_<ActivityClass>(m, "ActivityClass")
        .value("WALK", ActivityClass::Walk)
        .value("SIT", ActivityClass::Sit)
        .value("LIFT", ActivityClass::Lift)
        .value("PUT_DOWN", ActivityClass::PutDown)
        .value("NEUTRAL_STAND", ActivityClass::NeutralStand);

    py::enum_<RoiKind>(m, "RoiKind")
        .value("FACE", RoiKind::Face)
        .value("HAND", RoiKind::Hand)
        .value("BODY", RoiKind::Body)
        .value("LEG", RoiKind::Leg);

    py::class_<SceneConfig>(m, "SceneConfig")
        .def(py::init<>())
        .def_readwrite("width", &SceneConfig::width)
        .def_readwrite("height", &SceneConfig::height)
        .def_readwrite("fps", &SceneConfig::fps)
        .def_readwrite("n_frames", &SceneConfig::n_frames)
        .def_readwrite("activity", &SceneConfig::activity)
        .def_readwrite("actor_scale", &SceneConfig::actor_scale)
        .def_readwrite("background_level", &SceneConfig::background_level)
        .def_readwrite("seed", &SceneConfig::seed);

    py::class_<NoiseConfig>(m, "NoiseConfig")
        .def(py::init<>())
        .def_readwrite("pixel_sigma", &NoiseConfig::pixel_sigma)
        .def_readwrite("illum_gradient", &NoiseConfig::illum_gradient)
        .def_readwrite("distractor_count", &NoiseConfig::distractor_count)
        .def_readwrite("distractor_speed", &NoiseConfig::distractor_speed)
        .def_readwrite("seed", &NoiseConfig::seed);

    py::class_<FeatureConfig>(m, "FeatureConfig")
        .def(py::init<>())
        .def_readwrite("threshold", &FeatureConfig::threshold)
        .def_readwrite("min_area", &FeatureConfig::min_area)
        .def("fingerprint", &FeatureConfig::fingerprint);

    py::class_<DbnConfig>(m, "DbnConfig")
        .def(py::init<>())
        .def_readwrite("n_phase", &DbnConfig::n_phase)
        .def_readwrite("n_motion", &DbnConfig::n_motion)
        .def_readwrite("var_floor", &DbnConfig::var_floor)
        .def_readwrite("em_tol", &DbnConfig::em_tol)
        .def_readwrite("em_max_iter", &DbnConfig::em_max_iter)
        .def_readwrite("n_restarts", &DbnConfig::n_restarts)
        .def_readwrite("seed", &DbnConfig::seed);

    py::class_<HmmConfig>(m, "HmmConfig")
        .def(py::init<>())
        .def_readwrite("n_states", &HmmConfig::n_states)
        .def_readwrite("var_floor", &HmmConfig::var_floor)
        .def_readwrite("em_tol", &HmmConfig::em_tol)
        .def_readwrite("em_max_iter", &HmmConfig::em_max_iter)
        .def_readwrite("n_restarts", &HmmConfig::n_restarts)
        .def_readwrite("seed", &HmmConfig::seed);

    py::class_<FusionConfig>(m, "FusionConfig")
        .def(py::init<>())
        .def_readwrite("stride", &FusionConfig::stride)
        .def_readwrite("cap", &FusionConfig::cap)
        .def_readwrite("trajectory_roi", &FusionConfig::trajectory_roi)
        .def_readwrite("trajectory_fused", &FusionConfig::trajectory_fused);

    py::class_<DbnParams>(m, "DbnParams")
        .def_property_readonly("n_phase", &DbnParams::n_phase)
        .def_property_readonly("n_motion", &DbnParams::n_motion);

    py::class_<HmmParams>(m, "HmmParams")
        .def_property_readonly("n_states", &HmmParams::n_states);

    py::class_<EmReport>(m, "EmReport")
        .def_readonly("iterations", &EmReport::iterations)
        .def_readonly("log_lik_trace", &EmReport::log_lik_trace)
        .def_readonly("converged", &EmReport::converged);

    py::class_<PcaModel>(m, "PcaModel")
        .def_readonly("input_dim", &PcaModel::input_dim)
        .def_readonly("mean", &PcaModel::mean)
        .def_readonly("basis", &PcaModel::basis)
        .def_readonly("explained", &PcaModel::explained)
        .def_property_readonly("k", &PcaModel::k);

    py::class_<ModelBank>(m, "ModelBank")
        .def_property_readonly("kind",
                               [](const ModelBank& b) { return model_kind_name(b.kind); })
        .def_readonly("fingerprint", &ModelBank::fingerprint);

    // scene synthesis
    m.def(
        "synth_sequence",
        [](const SceneConfig& config) {
            auto [frames, gt] = synth_sequence(config);
            py::dict truth;
            truth["activity"] = class_name(gt.activity);
            truth["event_intervals"] = gt.event_intervals;
            py::list track;
            for (const auto& box : gt.actor_track)
                track.append(py::make_tuple(box.x_min, box.y_min, box.x_max, box.y_max));
            truth["actor_track"] = track;
            return py::make_tuple(frames_to_array(frames), truth);
        },
        py::arg("config"), "Render one labeled scene; returns (frames, ground_truth).");

    m.def(
        "add_noise",
        [](const U8Array& frames, const NoiseConfig& noise) {
            return frames_to_array(add_noise(frames_from_array(frames), noise));
        },
        py::arg("frames"), py::arg("noise"));

    m.def(
        "synth_dataset",
        [](const std::string& root, int per_class_count, const SceneConfig& scene,
           std::optional<NoiseConfig> noise, std::uint64_t master_seed,
           const std::string& profile_name) {
            const DatasetManifest manifest =
                synth_dataset(root, per_class_count, scene, noise, master_seed, profile_name);
            py::list entries;
            for (const auto& e : manifest.entries) {
                py::dict d;
                d["sequence_id"] = e.sequence_id;
                d["frames"] = e.frames_path;
                d["class"] = class_name(e.activity);
                d["n_frames"] = e.n_frames;
                d["seed"] = e.seed;
                d["noise_profile"] = e.noise_profile;
                entries.append(d);
            }
            return entries;
        },
        py::arg("root"), py::arg("per_class_count"), py::arg("scene") = SceneConfig{},
        py::arg("noise") = std::nullopt, py::arg("master_seed") = 2026,
        py::arg("profile_name") = "");

    m.def(
        "read_fgy1",
        [](const std::string& path) { return frames_to_array(read_fgy1(path)); },
        py::arg("path"));
    m.def(
        "write_fgy1",
        [](const std::string& path, const U8Array& frames) {
            write_fgy1(path, frames_from_array(frames));
        },
        py::arg("path"), py::arg("frames"));

    // features
    m.def(
        "extract_features",
        [](const U8Array& frames, const FeatureConfig& config) {
            const FeatureSequence seq =
                extract_sequence_features(frames_from_array(frames), config);
            return py::make_tuple(features_to_array(seq), seq.fingerprint);
        },
        py::arg("frames"), py::arg("config") = FeatureConfig{},
        "Per-step fused 32-vectors; returns (features, fingerprint).");

    m.def(
        "subsample_window",
        [](const F64Array& features, const std::string& fingerprint, int stride, int cap) {
            const FeatureSequence win =
                subsample_window(features_from_array(features, fingerprint), stride, cap);
            return py::make_tuple(features_to_array(win), win.truncated);
        },
        py::arg("features"), py::arg("fingerprint") = "", py::arg("stride") = 3,
        py::arg("cap") = 8);

    m.def(
        "pca_fit",
        [](const F64Array& data, double variance_target) {
            if (data.ndim() != 2) throw DimensionMismatch("expected a 2-d array");
            std::vector<std::vector<double>> rows;
            const auto view = data.unchecked<2>();
            for (py::ssize_t i = 0; i < data.shape(0); ++i) {
                std::vector<double> row(static_cast<std::size_t>(data.shape(1)));
                for (py::ssize_t j = 0; j < data.shape(1); ++j)
                    row[static_cast<std::size_t>(j)] = view(i, j);
                rows.push_back(std::move(row));
            }
            return pca_fit(rows, variance_target);
        },
        py::arg("data"), py::arg("variance_target") = 0.95);
    m.def("pca_project", &pca_project, py::arg("model"), py::arg("v"));
    m.def("pca_reconstruct", &pca_reconstruct, py::arg("model"), py::arg("coeffs"));

    // sequence models
    m.def(
        "dbn_em_fit",
        [](const DbnConfig& config, const std::vector<F64Array>& sequences) {
            return dbn_em_fit(config, obs_list_from(sequences));
        },
        py::arg("config"), py::arg("sequences"));
    m.def(
        "dbn_forward",
        [](const DbnParams& params, const F64Array& obs) {
            const ForwardResult result = dbn_forward(params, obs_from_array(obs));
            return py::make_tuple(result.log_lik, result.prefix_log_lik);
        },
        py::arg("params"), py::arg("obs"));
    m.def(
        "dbn_loglik_bruteforce",
        [](const DbnParams& params, const F64Array& obs) {
            return dbn_loglik_bruteforce(params, obs_from_array(obs));
        },
        py::arg("params"), py::arg("obs"));
    m.def(
        "hmm_em_fit",
        [](const HmmConfig& config, const std::vector<F64Array>& sequences) {
            return hmm_em_fit(config, obs_list_from(sequences));
        },
        py::arg("config"), py::arg("sequences"));
    m.def(
        "hmm_forward",
        [](const HmmParams& params, const F64Array& obs) {
            const ForwardResult result = hmm_forward(params, obs_from_array(obs));
            return py::make_tuple(result.log_lik, result.prefix_log_lik);
        },
        py::arg("params"), py::arg("obs"));

    // classification
    m.def(
        "map_posteriors",
        [](const std::vector<double>& log_lik, const std::vector<double>& prior) {
            if (log_lik.size() != kNumClasses || prior.size() != kNumClasses)
                throw DimensionMismatch("expected 5 log-likelihoods and 5 priors");
            std::array<double, kNumClasses> ll{};
            std::copy(log_lik.begin(), log_lik.end(), ll.begin());
            ClassPrior p;
            std::copy(prior.begin(), prior.end(), p.p.begin());
            const PosteriorVector post = map_posteriors(ll, p);
            return py::make_tuple(std::vector<double>(post.p.begin(), post.p.end()),
                                  class_name(post.winner));
        },
        py::arg("log_lik"), py::arg("prior"));

    m.def(
        "classify_sequence",
        [](const ModelBank& bank, const F64Array& features, const std::string& fingerprint,
           const FusionConfig& fusion) {
            const Decision decision = classify_sequence(
                bank, features_from_array(features, fingerprint), bank.prior, fusion);
            return decision_to_dict(decision);
        },
        py::arg("bank"), py::arg("features"), py::arg("fingerprint"),
        py::arg("fusion") = FusionConfig{});

    m.def("save_bank", &save_bank, py::arg("bank"), py::arg("path"));
    m.def("load_bank", &load_bank, py::arg("path"));

    // dataset-level orchestration
    m.def(
        "train_bank",
        [](const std::string& manifest_path, int set_index, const std::string& kind,
           const std::string& config_json) {
            const ExperimentConfig config = config_from_text(config_json);
            const DatasetManifest manifest = load_manifest(manifest_path);
            const FeatureStore store =
                extract_all_features(manifest_path, manifest, config.features);
            const SplitPlan plan =
                make_splits(manifest, config.n_sets, mix_seed(config.master_seed, 0x5B117ULL));
            TrainSpec spec;
            spec.kind = model_kind_from_name(kind);
            spec.dbn = config.dbn;
            spec.hmm = config.hmm;
            spec.prior_mode = config.prior_mode;
            return train_bank(store, manifest, plan, set_index, spec, config.features,
                              config.fusion);
        },
        py::arg("manifest_path"), py::arg("set_index") = 0, py::arg("kind") = "dbn",
        py::arg("config_json") = "");

    m.def(
        "evaluate_bank",
        [](const std::string& manifest_path, const ModelBank& bank, int set_index,
           const std::string& config_json) {
            const ExperimentConfig config = config_from_text(config_json);
            const DatasetManifest manifest = load_manifest(manifest_path);
            const FeatureStore store =
                extract_all_features(manifest_path, manifest, config.features);
            const SplitPlan plan =
                make_splits(manifest, config.n_sets, mix_seed(config.master_seed, 0x5B117ULL));
            return metrics_to_dict(
                evaluate(store, manifest, plan, set_index, bank, config.fusion));
        },
        py::arg("manifest_path"), py::arg("bank"), py::arg("set_index") = 0,
        py::arg("config_json") = "");

    m.def(
        "run_experiment",
        [](const std::string& out_dir, const std::string& config_json) {
            const ExperimentResults results =
                run_noise_experiment(config_from_text(config_json), out_dir);
            return results_to_json(results);
        },
        py::arg("out_dir"), py::arg("config_json") = "",
        "Full clean/noisy/outdoor comparison; returns the results document.");

    m.def("default_experiment_config",
          []() { return experiment_config_to_json(ExperimentConfig::defaults()); });

    m.attr("N_CLASSES") = kNumClasses;
    m.attr("N_ROIS") = kNumRois;
    m.attr("FUSED_DIM") = kFusedDim;
    m.attr("__version__") = "0.1.0";
}
