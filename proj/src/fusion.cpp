#include "actrec/fusion.hpp"

#include <algorithm>
#include <cmath>

namespace actrec {

namespace {

const std::array<std::string, 2> kKindNames = {"dbn", "hmm"};

// Argmax with ties to the smallest ordinal: strict > while scanning upward.
ActivityClass argmax_class(const std::array<double, kNumClasses>& p) {
    int best = 0;
    for (int c = 1; c < kNumClasses; ++c)
        if (p[static_cast<std::size_t>(c)] > p[static_cast<std::size_t>(best)]) best = c;
    return class_from_id(best);
}

std::array<double, kNumClasses> map_normalize(const std::array<double, kNumClasses>& log_scores) {
    double m = kNegInf;
    for (double v : log_scores) m = std::max(m, v);
    if (m == kNegInf) throw NumericalFailure("all class scores are zero");
    std::array<double, kNumClasses> p{};
    double sum = 0.0;
    for (int c = 0; c < kNumClasses; ++c) {
        p[static_cast<std::size_t>(c)] = std::exp(log_scores[static_cast<std::size_t>(c)] - m);
        sum += p[static_cast<std::size_t>(c)];
    }
    for (double& v : p) v /= sum;
    return p;
}

}  // namespace

ClassPrior ClassPrior::uniform() {
    ClassPrior prior;
    prior.p.fill(1.0 / kNumClasses);
    return prior;
}

void ClassPrior::validate() const {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw ValidationError("class prior: negative entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("class prior does not sum to 1");
}

const std::string& model_kind_name(ModelKind kind) {
    return kKindNames[static_cast<std::size_t>(kind)];
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "dbn") return ModelKind::Dbn;
    if (name == "hmm") return ModelKind::Hmm;
    throw ValidationError("unknown model kind: " + name);
}

void FusionConfig::validate() const {
    if (stride < 1) throw InvalidConfig("stride must be >= 1");
    if (cap < 1) throw InvalidConfig("cap must be >= 1");
}

void ModelBank::validate() const {
    const std::size_t expected = static_cast<std::size_t>(kNumClasses) * kNumRois;
    const std::size_t have = kind == ModelKind::Dbn ? dbn.size() : hmm.size();
    if (have != expected)
        throw IncompleteBank("bank needs one model per (class, roi) cell");
    prior.validate();
    window.validate();
    if (kind == ModelKind::Dbn)
        for (const auto& m : dbn) m.validate(var_floor);
    else
        for (const auto& m : hmm) m.validate(var_floor);
}

ForwardResult ModelBank::forward(ActivityClass c, RoiKind r, const ObsSequence& obs) const {
    const std::size_t i = cell(c, r);
    if (kind == ModelKind::Dbn) {
        if (i >= dbn.size()) throw IncompleteBank("missing dbn model");
        return dbn_forward(dbn[i], obs);
    }
    if (i >= hmm.size()) throw IncompleteBank("missing hmm model");
    return hmm_forward(hmm[i], obs);
}

FeatureSequence subsample_window(const FeatureSequence& seq, int stride, int cap) {
    if (stride < 1 || cap < 1) throw InvalidConfig("stride and cap must be >= 1");
    if (seq.steps.empty()) throw EmptySequence("cannot subsample an empty feature sequence");

    FeatureSequence out;
    out.fingerprint = seq.fingerprint;
    for (int i = 0, taken = 0; i < seq.n_steps() && taken < cap; i += stride, ++taken)
        out.steps.push_back(seq.steps[static_cast<std::size_t>(i)]);
    out.truncated = out.n_steps() < cap;
    return out;
}

ObsSequence roi_observations(const FeatureSequence& seq, RoiKind roi) {
    ObsSequence obs;
    obs.reserve(seq.steps.size());
    for (int t = 0; t < seq.n_steps(); ++t) {
        ObsVector v{};
        const auto block = seq.block(t, roi);
        std::copy(block.begin(), block.end(), v.begin());
        obs.push_back(v);
    }
    return obs;
}

PosteriorVector map_posteriors(const std::array<double, kNumClasses>& log_lik,
                               const ClassPrior& prior) {
    prior.validate();
    std::array<double, kNumClasses> scores{};
    for (int c = 0; c < kNumClasses; ++c) {
        const double pc = prior.p[static_cast<std::size_t>(c)];
        scores[static_cast<std::size_t>(c)] =
            pc > 0.0 ? std::log(pc) + log_lik[static_cast<std::size_t>(c)] : kNegInf;
    }
    PosteriorVector post;
    post.p = map_normalize(scores);
    post.winner = argmax_class(post.p);
    return post;
}

PosteriorVector class_posteriors(const ModelBank& bank, RoiKind roi, const ObsSequence& obs,
                                 const ClassPrior& prior) {
    if (obs.empty()) throw EmptySequence("empty observation sequence");
    prior.validate();

    std::array<double, kNumClasses> log_lik{};
    for (ActivityClass c : all_classes())
        log_lik[static_cast<std::size_t>(class_id(c))] =
            prior.p[static_cast<std::size_t>(class_id(c))] > 0.0
                ? bank.forward(c, roi, obs).log_lik
                : 0.0;  // zero-prior classes never contribute
    return map_posteriors(log_lik, prior);
}

std::vector<std::array<double, kNumClasses>> posterior_trajectory(const ModelBank& bank,
                                                                  RoiKind roi,
                                                                  const ObsSequence& obs,
                                                                  const ClassPrior& prior) {
    if (obs.empty()) throw EmptySequence("empty observation sequence");
    prior.validate();

    std::array<std::vector<double>, kNumClasses> prefixes;
    for (ActivityClass c : all_classes())
        prefixes[static_cast<std::size_t>(class_id(c))] =
            bank.forward(c, roi, obs).prefix_log_lik;

    std::vector<std::array<double, kNumClasses>> rows;
    rows.reserve(obs.size());
    for (std::size_t t = 0; t < obs.size(); ++t) {
        std::array<double, kNumClasses> log_lik{};
        for (int c = 0; c < kNumClasses; ++c)
            log_lik[static_cast<std::size_t>(c)] = prefixes[static_cast<std::size_t>(c)][t];
        rows.push_back(map_posteriors(log_lik, prior).p);
    }
    return rows;
}

std::pair<ActivityClass, bool> component_vote(
    const std::array<ActivityClass, kNumRois>& votes,
    const std::array<PosteriorVector, kNumRois>& posteriors) {
    std::array<int, kNumClasses> counts{};
    for (ActivityClass v : votes) ++counts[static_cast<std::size_t>(class_id(v))];

    const int top = *std::max_element(counts.begin(), counts.end());
    std::vector<int> tied;
    for (int c = 0; c < kNumClasses; ++c)
        if (counts[static_cast<std::size_t>(c)] == top) tied.push_back(c);

    if (tied.size() == 1) return {class_from_id(tied.front()), false};

    const auto& hand = posteriors[static_cast<std::size_t>(roi_id(RoiKind::Hand))].p;
    int best = tied.front();
    for (int c : tied)
        if (hand[static_cast<std::size_t>(c)] > hand[static_cast<std::size_t>(best)]) best = c;
    return {class_from_id(best), true};
}

Decision classify_sequence(const ModelBank& bank, const FeatureSequence& features,
                           const ClassPrior& prior, const FusionConfig& config) {
    config.validate();
    if (!bank.fingerprint.empty() && features.fingerprint != bank.fingerprint)
        throw FingerprintMismatch("features were extracted with a different config than the bank: '" +
                                  features.fingerprint + "' vs '" + bank.fingerprint + "'");

    const FeatureSequence window = subsample_window(features, config.stride, config.cap);

    Decision decision;
    std::array<ObsSequence, kNumRois> obs;
    for (RoiKind roi : all_rois()) {
        obs[static_cast<std::size_t>(roi_id(roi))] = roi_observations(window, roi);
        const PosteriorVector post =
            class_posteriors(bank, roi, obs[static_cast<std::size_t>(roi_id(roi))], prior);
        decision.component_posteriors[static_cast<std::size_t>(roi_id(roi))] = post;
        decision.component_votes[static_cast<std::size_t>(roi_id(roi))] = post.winner;
    }

    auto [winner, tie_broken] =
        component_vote(decision.component_votes, decision.component_posteriors);
    decision.winner = winner;
    decision.tie_broken = tie_broken;

    if (config.trajectory_fused) {
        std::vector<std::array<double, kNumClasses>> fused;
        for (RoiKind roi : all_rois()) {
            const auto rows = posterior_trajectory(
                bank, roi, obs[static_cast<std::size_t>(roi_id(roi))], prior);
            if (fused.empty()) fused.assign(rows.size(), {});
            for (std::size_t t = 0; t < rows.size(); ++t)
                for (int c = 0; c < kNumClasses; ++c)
                    fused[t][static_cast<std::size_t>(c)] +=
                        rows[t][static_cast<std::size_t>(c)] / kNumRois;
        }
        decision.trajectory = std::move(fused);
    } else {
        decision.trajectory = posterior_trajectory(
            bank, config.trajectory_roi,
            obs[static_cast<std::size_t>(roi_id(config.trajectory_roi))], prior);
    }
    return decision;
}

}  // namespace actrec
