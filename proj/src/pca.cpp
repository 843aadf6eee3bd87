#include "actrec/pca.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace actrec {

PcaModel pca_fit(const std::vector<std::vector<double>>& data, double variance_target) {
    if (data.size() < 2) throw InsufficientData("pca_fit needs at least 2 rows");
    if (!(variance_target > 0.0 && variance_target <= 1.0))
        throw InvalidConfig("variance_target outside (0, 1]");
    const int n = static_cast<int>(data.size());
    const int d = static_cast<int>(data[0].size());

    Eigen::MatrixXd x(n, d);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(data[static_cast<std::size_t>(i)].size()) != d)
            throw DimensionMismatch("ragged pca input");
        for (int j = 0; j < d; ++j) {
            const double v = data[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (!std::isfinite(v)) throw NonFiniteObservation("non-finite pca input");
            x(i, j) = v;
        }
    }

    PcaModel model;
    model.input_dim = d;
    Eigen::VectorXd mean = x.colwise().mean();
    model.mean.assign(mean.data(), mean.data() + d);

    Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
    Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    Eigen::VectorXd evals = solver.eigenvalues();  // ascending
    const Eigen::MatrixXd& evecs = solver.eigenvectors();

    double total = 0.0;
    for (int i = 0; i < d; ++i) total += std::max(evals(i), 0.0);
    if (total <= 1e-30) return model;  // degenerate: all rows identical, k = 0

    double cum = 0.0;
    for (int r = 0; r < d; ++r) {
        const int i = d - 1 - r;  // descending eigenvalue order
        const double frac = std::max(evals(i), 0.0) / total;
        std::vector<double> row(static_cast<std::size_t>(d));
        int arg_abs_max = 0;
        for (int j = 0; j < d; ++j) {
            row[static_cast<std::size_t>(j)] = evecs(j, i);
            if (std::abs(evecs(j, i)) > std::abs(evecs(arg_abs_max, i))) arg_abs_max = j;
        }
        if (row[static_cast<std::size_t>(arg_abs_max)] < 0.0)
            for (double& v : row) v = -v;
        model.basis.push_back(std::move(row));
        model.explained.push_back(frac);
        cum += frac;
        if (cum + 1e-12 >= variance_target) break;
    }
    return model;
}

std::vector<double> pca_project(const PcaModel& model, const std::vector<double>& v) {
    if (static_cast<int>(v.size()) != model.input_dim)
        throw DimensionMismatch("pca_project input dimension mismatch");
    for (double x : v)
        if (!std::isfinite(x)) throw NonFiniteObservation("non-finite pca input");
    std::vector<double> out(static_cast<std::size_t>(model.k()), 0.0);
    for (int r = 0; r < model.k(); ++r) {
        double acc = 0.0;
        for (int j = 0; j < model.input_dim; ++j)
            acc += model.basis[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] *
                   (v[static_cast<std::size_t>(j)] - model.mean[static_cast<std::size_t>(j)]);
        out[static_cast<std::size_t>(r)] = acc;
    }
    return out;
}

std::vector<double> pca_reconstruct(const PcaModel& model, const std::vector<double>& coeffs) {
    if (static_cast<int>(coeffs.size()) != model.k())
        throw DimensionMismatch("pca_reconstruct coefficient count mismatch");
    std::vector<double> out = model.mean;
    for (int r = 0; r < model.k(); ++r)
        for (int j = 0; j < model.input_dim; ++j)
            out[static_cast<std::size_t>(j)] +=
                coeffs[static_cast<std::size_t>(r)] *
                model.basis[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
    return out;
}

}  // namespace actrec
