#ifndef ACTREC_HMM_HPP
#define ACTREC_HMM_HPP

#include <cstdint>
#include <vector>

#include "actrec/dbn.hpp"

namespace actrec {

struct HmmConfig {
    int n_states = 4;
    double var_floor = 1e-6;
    double em_tol = 1e-6;
    int em_max_iter = 100;
    int n_restarts = 0;  // seeded random restarts, see DbnConfig
    std::uint64_t seed = 0;

    void validate() const;
};

// Single chain, diagonal-Gaussian emissions over the full 8-vector.
struct HmmParams {
    std::vector<double> prior;                    // S
    std::vector<std::vector<double>> trans;       // S x S
    std::vector<DiagGaussian> emit;               // per state, 8-dim

    int n_states() const { return static_cast<int>(prior.size()); }

    void validate(double var_floor) const;
};

HmmParams hmm_init(const HmmConfig& config, const std::vector<ObsSequence>& sequences);
ForwardResult hmm_forward(const HmmParams& params, const ObsSequence& obs);
std::pair<HmmParams, EmReport> hmm_em_fit(const HmmConfig& config,
                                          const std::vector<ObsSequence>& sequences);

}  // namespace actrec

#endif
