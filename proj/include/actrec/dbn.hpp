#ifndef ACTREC_DBN_HPP
#define ACTREC_DBN_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "actrec/features.hpp"
#include "actrec/numerics.hpp"

namespace actrec {

// The 8-vector splits into a geometry block (box corners + centroid offsets,
// driven by the pose-phase chain) and a motion block (mean change + fill
// ratio, driven by the motion-state chain).
inline constexpr std::array<int, 6> kGeoComponents = {kFeatXMin, kFeatYMin, kFeatXMax,
                                                      kFeatYMax,  kFeatCxOff, kFeatCyOff};
inline constexpr std::array<int, 2> kMotComponents = {kFeatMeanChange, kFeatFillRatio};

using ObsVector = std::array<double, kComponentDim>;
using ObsSequence = std::vector<ObsVector>;

struct DbnConfig {
    int n_phase = 3;
    int n_motion = 3;
    double var_floor = 1e-6;
    double em_tol = 1e-6;
    int em_max_iter = 100;
    // Extra EM starts from seeded perturbations of the deterministic
    // time-quantile initialization; the best final likelihood wins. Zero
    // keeps training fully deterministic in the data alone.
    int n_restarts = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Factored two-chain model. The joint transition is
//   T[(p,m) -> (p',m')] = phase_trans[p][p'] * motion_trans[p'][m][m'],
// i.e. the motion chain's step is conditioned on the phase it lands in.
struct DbnParams {
    std::vector<double> phase_prior;                            // P
    std::vector<std::vector<double>> phase_trans;               // P x P
    std::vector<double> motion_prior;                           // M
    std::vector<std::vector<std::vector<double>>> motion_trans; // P x M x M
    std::vector<DiagGaussian> geo_emit;                         // per phase, 6-dim
    std::vector<DiagGaussian> mot_emit;                         // per motion state, 2-dim

    int n_phase() const { return static_cast<int>(phase_prior.size()); }
    int n_motion() const { return static_cast<int>(motion_prior.size()); }
    int n_joint() const { return n_phase() * n_motion(); }

    // Throws CorruptModel unless rows are stochastic within 1e-12 and all
    // variances are at least var_floor.
    void validate(double var_floor) const;
};

struct ForwardResult {
    double log_lik = 0.0;
    std::vector<double> prefix_log_lik;  // entry t = log P(o_1..o_{t+1})
};

struct EmReport {
    int iterations = 0;
    std::vector<double> log_lik_trace;
    bool converged = false;
};

// Joint-state posteriors from exact forward-backward.
struct DbnPosteriors {
    std::vector<std::vector<double>> gamma;           // T x J
    std::vector<std::vector<std::vector<double>>> xi; // (T-1) x J x J
};

DbnParams dbn_init(const DbnConfig& config, const std::vector<ObsSequence>& sequences);
ForwardResult dbn_forward(const DbnParams& params, const ObsSequence& obs);
// Exhaustive path enumeration; the testing oracle for dbn_forward.
double dbn_loglik_bruteforce(const DbnParams& params, const ObsSequence& obs);
DbnPosteriors dbn_forward_backward(const DbnParams& params, const ObsSequence& obs);
std::pair<DbnParams, EmReport> dbn_em_fit(const DbnConfig& config,
                                          const std::vector<ObsSequence>& sequences);

// Shared helpers for the time-quantile initialization; hmm_init follows the
// same segmentation rule.
std::pair<std::size_t, std::size_t> quantile_segment(std::size_t length, int n_segments,
                                                     int segment);
std::vector<std::vector<double>> sticky_transitions(int n, double self_prob);

}  // namespace actrec

#endif
