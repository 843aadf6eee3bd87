#ifndef ACTREC_FUSION_HPP
#define ACTREC_FUSION_HPP

#include <array>
#include <string>
#include <vector>

#include "actrec/dbn.hpp"
#include "actrec/hmm.hpp"

namespace actrec {

struct ClassPrior {
    std::array<double, kNumClasses> p{};

    static ClassPrior uniform();
    void validate() const;  // non-negative, sums to 1 within 1e-12
};

struct PosteriorVector {
    std::array<double, kNumClasses> p{};
    ActivityClass winner = ActivityClass::Walk;
};

enum class ModelKind : int { Dbn = 0, Hmm = 1 };

const std::string& model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

struct FusionConfig {
    int stride = 3;
    int cap = 8;
    RoiKind trajectory_roi = RoiKind::Hand;
    bool trajectory_fused = false;  // average the four per-ROI trajectories

    void validate() const;
};

// One fitted sequence model per (class, ROI) cell plus the shared priors and
// the feature fingerprint stamped at training time.
struct ModelBank {
    ModelKind kind = ModelKind::Dbn;
    std::vector<DbnParams> dbn;  // kNumClasses * kNumRois when kind == Dbn
    std::vector<HmmParams> hmm;
    ClassPrior prior;
    std::string fingerprint;
    FusionConfig window;  // subsampling the bank was trained with
    double var_floor = 1e-6;

    static std::size_t cell(ActivityClass c, RoiKind r) {
        return static_cast<std::size_t>(class_id(c) * kNumRois + roi_id(r));
    }

    void validate() const;  // IncompleteBank / CorruptModel
    ForwardResult forward(ActivityClass c, RoiKind r, const ObsSequence& obs) const;
};

struct Decision {
    ActivityClass winner = ActivityClass::Walk;
    std::array<ActivityClass, kNumRois> component_votes{};
    std::array<PosteriorVector, kNumRois> component_posteriors{};
    bool tie_broken = false;
    std::vector<std::array<double, kNumClasses>> trajectory;  // T x 5, rows sum to 1
};

// Steps 0, stride, 2*stride, ... capped at `cap`; a window shorter than the
// cap is returned as-is with `truncated` set.
FeatureSequence subsample_window(const FeatureSequence& seq, int stride = 3, int cap = 8);

// The MAP decision rule on raw per-class sequence log-likelihoods:
// posterior_c = prior_c*exp(ll_c - m) normalized, winner by argmax with
// ties to the smallest ordinal.
PosteriorVector map_posteriors(const std::array<double, kNumClasses>& log_lik,
                               const ClassPrior& prior);

PosteriorVector class_posteriors(const ModelBank& bank, RoiKind roi, const ObsSequence& obs,
                                 const ClassPrior& prior);

std::vector<std::array<double, kNumClasses>> posterior_trajectory(const ModelBank& bank,
                                                                  RoiKind roi,
                                                                  const ObsSequence& obs,
                                                                  const ClassPrior& prior);

// Plurality over the four ROI votes; ties resolved by the Hand posterior
// restricted to the tied classes, residual ties by smallest ordinal.
std::pair<ActivityClass, bool> component_vote(
    const std::array<ActivityClass, kNumRois>& votes,
    const std::array<PosteriorVector, kNumRois>& posteriors);

Decision classify_sequence(const ModelBank& bank, const FeatureSequence& features,
                           const ClassPrior& prior, const FusionConfig& config);

// Extracts the per-ROI 8-vector subsequence from a fused feature sequence.
ObsSequence roi_observations(const FeatureSequence& seq, RoiKind roi);

}  // namespace actrec

#endif
