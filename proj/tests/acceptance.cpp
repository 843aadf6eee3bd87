// Acceptance suite: every release gate runs here and prints one line per
// criterion. Exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "actrec/eval.hpp"
#include "actrec/model_io.hpp"
#include "actrec/pca.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace actrec;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int id, const char* title, bool pass, double seconds, const std::string& detail) {
    std::printf("[%s] criterion %2d: %-28s (%6.1fs) %s\n", pass ? "PASS" : "FAIL", id, title,
                seconds, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

template <typename Fn>
void criterion(int id, const char* title, double budget_seconds, Fn&& fn) {
    const auto t0 = Clock::now();
    bool pass = false;
    std::string detail;
    try {
        pass = fn(detail);
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (budget_seconds > 0.0 && seconds > budget_seconds) {
        pass = false;
        detail += " [over the " + std::to_string(static_cast<int>(budget_seconds)) + "s budget]";
    }
    report(id, title, pass, seconds, detail);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

int main() {
    // Criteria 6-10 all read from one default experiment run.
    testutil::TempDir experiment_dir("acceptance_experiment");
    ExperimentResults experiment;
    bool experiment_ok = false;

    criterion(1, "inference vs enumeration", 10.0, [](std::string& detail) {
        Rng rng(0xAC5EED01ULL);
        double worst = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            const int P = 1 + static_cast<int>(rng.next_below(3));
            const int M = 1 + static_cast<int>(rng.next_below(3));
            const int T = 1 + static_cast<int>(rng.next_below(5));
            const DbnParams params = oracles::random_dbn_params(rng, P, M);
            const ObsSequence obs = oracles::random_obs(rng, T);
            const double exact = dbn_loglik_bruteforce(params, obs);
            const double fast = dbn_forward(params, obs).log_lik;
            worst = std::max(worst, std::abs(fast - exact) / std::max(1.0, std::abs(exact)));
        }
        for (int trial = 0; trial < 200; ++trial) {
            const int S = 1 + static_cast<int>(rng.next_below(3));
            const int T = 1 + static_cast<int>(rng.next_below(5));
            const HmmParams params = oracles::random_hmm_params(rng, S);
            const ObsSequence obs = oracles::random_obs(rng, T);
            const double exact = oracles::hmm_loglik_enumeration(params, obs);
            const double fast = hmm_forward(params, obs).log_lik;
            worst = std::max(worst, std::abs(fast - exact) / std::max(1.0, std::abs(exact)));
        }
        detail = "worst relative error " + fmt(worst);
        return worst <= 1e-9;
    });

    criterion(2, "em soundness", 30.0, [](std::string& detail) {
        Rng rng(0xAC5EED02ULL);
        double worst_drop = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            DbnConfig config;
            config.n_phase = 1 + static_cast<int>(rng.next_below(3));
            config.n_motion = 1 + static_cast<int>(rng.next_below(3));
            config.em_max_iter = 12;
            std::vector<ObsSequence> data;
            for (int s = 0; s < 2 + static_cast<int>(rng.next_below(3)); ++s)
                data.push_back(oracles::random_obs(rng, 4 + static_cast<int>(rng.next_below(8))));
            const auto [params, rep] = dbn_em_fit(config, data);
            params.validate(config.var_floor);
            for (std::size_t i = 1; i < rep.log_lik_trace.size(); ++i)
                worst_drop = std::max(
                    worst_drop, (rep.log_lik_trace[i - 1] - rep.log_lik_trace[i]) /
                                    std::max(1.0, std::abs(rep.log_lik_trace[i - 1])));
        }
        for (int trial = 0; trial < 50; ++trial) {
            HmmConfig config;
            config.n_states = 1 + static_cast<int>(rng.next_below(4));
            config.em_max_iter = 12;
            std::vector<ObsSequence> data;
            for (int s = 0; s < 2 + static_cast<int>(rng.next_below(3)); ++s)
                data.push_back(oracles::random_obs(rng, 4 + static_cast<int>(rng.next_below(8))));
            const auto [params, rep] = hmm_em_fit(config, data);
            params.validate(config.var_floor);
            for (std::size_t i = 1; i < rep.log_lik_trace.size(); ++i)
                worst_drop = std::max(
                    worst_drop, (rep.log_lik_trace[i - 1] - rep.log_lik_trace[i]) /
                                    std::max(1.0, std::abs(rep.log_lik_trace[i - 1])));
        }
        detail = "worst relative trace drop " + fmt(worst_drop);
        return worst_drop <= 1e-8;
    });

    criterion(3, "dbn collapses to hmm", 10.0, [](std::string& detail) {
        Rng rng(0xAC5EED03ULL);
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const int S = 1 + static_cast<int>(rng.next_below(3));
            HmmParams hmm = oracles::random_hmm_params(rng, S);
            for (int s = 1; s < S; ++s)
                for (int idx : kMotComponents) {
                    hmm.emit[s].mean[static_cast<std::size_t>(idx)] =
                        hmm.emit[0].mean[static_cast<std::size_t>(idx)];
                    hmm.emit[s].var[static_cast<std::size_t>(idx)] =
                        hmm.emit[0].var[static_cast<std::size_t>(idx)];
                }
            DbnParams dbn;
            dbn.phase_prior = hmm.prior;
            dbn.phase_trans = hmm.trans;
            dbn.motion_prior = {1.0};
            dbn.motion_trans.assign(static_cast<std::size_t>(S), {{1.0}});
            for (int s = 0; s < S; ++s) {
                DiagGaussian geo;
                for (int idx : kGeoComponents) {
                    geo.mean.push_back(hmm.emit[s].mean[static_cast<std::size_t>(idx)]);
                    geo.var.push_back(hmm.emit[s].var[static_cast<std::size_t>(idx)]);
                }
                dbn.geo_emit.push_back(std::move(geo));
            }
            DiagGaussian mot;
            for (int idx : kMotComponents) {
                mot.mean.push_back(hmm.emit[0].mean[static_cast<std::size_t>(idx)]);
                mot.var.push_back(hmm.emit[0].var[static_cast<std::size_t>(idx)]);
            }
            dbn.mot_emit.push_back(std::move(mot));

            const ObsSequence obs =
                oracles::random_obs(rng, 2 + static_cast<int>(rng.next_below(6)));
            const double lh = hmm_forward(hmm, obs).log_lik;
            const double ld = dbn_forward(dbn, obs).log_lik;
            worst = std::max(worst, std::abs(lh - ld) / std::max(1.0, std::abs(lh)));
        }
        detail = "worst relative gap " + fmt(worst);
        return worst <= 1e-12;
    });

    criterion(4, "map decision contract", 10.0, [](std::string& detail) {
        Rng rng(0xAC5EED04ULL);
        bool ok = true;
        for (int trial = 0; trial < 100; ++trial) {
            std::array<double, kNumClasses> ll{};
            for (auto& v : ll) v = rng.uniform(-300.0, 0.0);
            const ClassPrior prior = ClassPrior::uniform();
            const PosteriorVector base = map_posteriors(ll, prior);
            double sum = 0.0;
            for (double p : base.p) sum += p;
            ok &= std::abs(sum - 1.0) <= 1e-9;

            std::array<double, kNumClasses> shifted = ll;
            const double shift = rng.uniform(-500.0, 500.0);
            for (auto& v : shifted) v += shift;
            ok &= map_posteriors(shifted, prior).winner == base.winner;

            std::array<double, kNumClasses> flat{};
            flat.fill(rng.uniform(-100.0, 0.0));
            ClassPrior skew;
            skew.p = {0.4, 0.25, 0.2, 0.1, 0.05};
            const PosteriorVector from_prior = map_posteriors(flat, skew);
            for (int c = 0; c < kNumClasses; ++c)
                ok &= std::abs(from_prior.p[static_cast<std::size_t>(c)] -
                               skew.p[static_cast<std::size_t>(c)]) <= 1e-12;
        }
        detail = "100 seeded trials";
        return ok;
    });

    criterion(5, "paper subsampling window", 5.0, [](std::string& detail) {
        FeatureSequence seq;
        seq.fingerprint = "w";
        for (int t = 0; t < 24; ++t) {
            FusedVector v{};
            v[0] = t;
            seq.steps.push_back(v);
        }
        const FeatureSequence win = subsample_window(seq, 3, 8);
        bool ok = win.n_steps() == 8 && !win.truncated;
        for (int i = 0; ok && i < 8; ++i) ok = win.steps[static_cast<std::size_t>(i)][0] == 3.0 * i;
        detail = "24 steps, stride 3, cap 8 -> [0,3,...,21]";
        return ok;
    });

    criterion(6, "clean recognition >= 0.85", 300.0, [&](std::string& detail) {
        const ExperimentConfig config = ExperimentConfig::defaults();
        experiment = run_noise_experiment(config, experiment_dir.str());
        experiment_ok = true;
        const double acc = experiment.metrics_for("clean", ModelKind::Dbn).overall_accuracy();
        detail = "dbn clean held-out accuracy " + fmt(acc);
        return acc >= 0.85;
    });

    criterion(7, "noise degrades lift/putdown", 5.0, [&](std::string& detail) {
        if (!experiment_ok) {
            detail = "experiment run unavailable";
            return false;
        }
        const Metrics& clean = experiment.metrics_for("clean", ModelKind::Dbn);
        const Metrics& noisy = experiment.metrics_for("noisy", ModelKind::Dbn);
        const double lift_clean = clean.per_class_accuracy(ActivityClass::Lift);
        const double lift_noisy = noisy.per_class_accuracy(ActivityClass::Lift);
        const double put_clean = clean.per_class_accuracy(ActivityClass::PutDown);
        const double put_noisy = noisy.per_class_accuracy(ActivityClass::PutDown);
        detail = "lift " + fmt(lift_clean) + "->" + fmt(lift_noisy) + ", putdown " +
                 fmt(put_clean) + "->" + fmt(put_noisy);
        return lift_noisy <= lift_clean && put_noisy <= put_clean;
    });

    criterion(8, "dbn more robust than hmm", 5.0, [&](std::string& detail) {
        if (!experiment_ok) {
            detail = "experiment run unavailable";
            return false;
        }
        const double dbn_drop = experiment.mean_degradation(ModelKind::Dbn);
        const double hmm_drop = experiment.mean_degradation(ModelKind::Hmm);
        detail = "mean degradation hmm " + fmt(hmm_drop) + " vs dbn " + fmt(dbn_drop);
        return hmm_drop >= dbn_drop;
    });

    criterion(9, "indoor beats outdoor", 5.0, [&](std::string& detail) {
        if (!experiment_ok) {
            detail = "experiment run unavailable";
            return false;
        }
        const double indoor = experiment.metrics_for("indoor", ModelKind::Dbn).overall_accuracy();
        const double outdoor =
            experiment.metrics_for("outdoor", ModelKind::Dbn).overall_accuracy();
        detail = "indoor " + fmt(indoor) + " vs outdoor " + fmt(outdoor);
        return indoor >= outdoor;
    });

    criterion(10, "posterior trajectory grows", 5.0, [&](std::string& detail) {
        if (!experiment_ok) {
            detail = "experiment run unavailable";
            return false;
        }
        std::vector<double> first, final;
        for (const auto& [a, b] : experiment.lift_trajectory_endpoints) {
            first.push_back(a);
            final.push_back(b);
        }
        if (first.empty()) {
            detail = "no correctly classified lift sequences";
            return false;
        }
        std::sort(first.begin(), first.end());
        std::sort(final.begin(), final.end());
        const double med_first = first[first.size() / 2];
        const double med_final = final[final.size() / 2];
        detail = "median true-class posterior " + fmt(med_first) + " -> " + fmt(med_final) +
                 " over " + std::to_string(first.size()) + " sequences";
        return med_final > med_first;
    });

    criterion(11, "pipeline determinism", 120.0, [](std::string& detail) {
        ExperimentConfig config = ExperimentConfig::defaults();
        config.per_class_count = 5;
        config.n_sets = 5;
        testutil::TempDir dir_a("acceptance_det_a");
        testutil::TempDir dir_b("acceptance_det_b");
        run_noise_experiment(config, dir_a.str());
        run_noise_experiment(config, dir_b.str());
        const auto tree_a = testutil::read_tree(dir_a.str());
        const auto tree_b = testutil::read_tree(dir_b.str());
        detail = std::to_string(tree_a.size()) + " files compared";
        return !tree_a.empty() && tree_a == tree_b;
    });

    criterion(12, "feature-layer invariants", 20.0, [](std::string& detail) {
        Rng rng(0xAC5EED05ULL);
        bool ok = true;
        int cases = 0;

        auto random_frame = [&](int w, int h) {
            std::vector<std::uint8_t> f(static_cast<std::size_t>(w) * h);
            for (auto& v : f) v = static_cast<std::uint8_t>(rng.next_below(256));
            return f;
        };

        for (int trial = 0; trial < 700 && ok; ++trial, ++cases) {
            const int w = 6 + static_cast<int>(rng.next_below(24));
            const int h = 6 + static_cast<int>(rng.next_below(24));
            const auto prev = random_frame(w, h);
            const auto cur = random_frame(w, h);
            const int threshold = 1 + static_cast<int>(rng.next_below(255));
            const ForegroundMask mask = foreground_mask(prev, cur, w, h, threshold);
            ok &= mask.bits == foreground_mask(cur, prev, w, h, threshold).bits;

            const int x0 = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(w)));
            const int y0 = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(h)));
            const BoundingBox roi{
                x0, y0, x0 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(w - x0))),
                y0 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(h - y0)))};
            const ComponentFeatures f = extract_component_features(prev, cur, w, h, roi, mask);
            ok &= f[kFeatXMin] >= 0.0 && f[kFeatXMax] <= 1.0 && f[kFeatYMin] >= 0.0 &&
                  f[kFeatYMax] <= 1.0;
            ok &= f[kFeatMeanChange] >= 0.0 && f[kFeatMeanChange] <= 1.0;
            ok &= f[kFeatFillRatio] >= 0.0 && f[kFeatFillRatio] <= 1.0;
            ok &= std::abs(f[kFeatCxOff]) <= 0.5 && std::abs(f[kFeatCyOff]) <= 0.5;
            if (f[kFeatFillRatio] == 0.0) ok &= f[kFeatCxOff] == 0.0 && f[kFeatCyOff] == 0.0;
        }

        for (int trial = 0; trial < 300 && ok; ++trial, ++cases) {
            const int w = 6 + static_cast<int>(rng.next_below(20));
            const int h = 6 + static_cast<int>(rng.next_below(14));
            ForegroundMask mask{w, h,
                                std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, 0)};
            const double density = rng.uniform(0.05, 0.5);
            for (auto& bit : mask.bits) bit = rng.next_double() < density;
            const int min_area = 1 + static_cast<int>(rng.next_below(6));
            ok &= detect_body_box(mask, min_area) ==
                  oracles::largest_component_oracle(mask, min_area);
        }

        for (int trial = 0; trial < 30 && ok; ++trial, ++cases) {
            std::vector<std::vector<double>> data;
            const int n = 10 + static_cast<int>(rng.next_below(40));
            for (int i = 0; i < n; ++i) {
                std::vector<double> row(32);
                for (auto& v : row) v = rng.next_gaussian();
                data.push_back(row);
            }
            const PcaModel model = pca_fit(data, rng.uniform(0.3, 1.0));
            for (int r = 0; r < model.k() && ok; ++r)
                for (int r2 = 0; r2 <= r; ++r2) {
                    double dot = 0.0;
                    for (int j = 0; j < 32; ++j) dot += model.basis[r][j] * model.basis[r2][j];
                    ok &= std::abs(dot - (r == r2 ? 1.0 : 0.0)) <= 1e-9;
                }
            for (int r = 1; r < model.k(); ++r) ok &= model.explained[r] <= model.explained[r - 1];
        }

        detail = std::to_string(cases) + " random cases";
        return ok && cases >= 1000;
    });

    std::printf("%s: %d of 12 criteria passed\n", g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                12 - g_failures);
    return g_failures;
}
