#ifndef ACTREC_PCA_HPP
#define ACTREC_PCA_HPP

#include <vector>

#include "actrec/errors.hpp"

namespace actrec {

struct PcaModel {
    int input_dim = 0;
    std::vector<double> mean;                // input_dim
    std::vector<std::vector<double>> basis;  // k rows, orthonormal
    std::vector<double> explained;           // k fractions, non-increasing

    int k() const { return static_cast<int>(basis.size()); }
};

// Mean-centered covariance eigendecomposition. Keeps the smallest k whose
// cumulative explained variance reaches variance_target; rows are unit
// eigenvectors in descending eigenvalue order with the largest-magnitude
// entry made positive. Identical rows yield a k=0 model.
PcaModel pca_fit(const std::vector<std::vector<double>>& data, double variance_target);

std::vector<double> pca_project(const PcaModel& model, const std::vector<double>& v);
std::vector<double> pca_reconstruct(const PcaModel& model, const std::vector<double>& coeffs);

}  // namespace actrec

#endif
