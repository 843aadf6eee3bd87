#ifndef ACTREC_SRC_CHAIN_HPP
#define ACTREC_SRC_CHAIN_HPP

// Log-space forward / forward-backward over a flattened state chain; the
// factored model and the HMM baseline both reduce to this once their joint
// matrices are assembled.

#include <cmath>
#include <vector>

#include "actrec/dbn.hpp"
#include "actrec/errors.hpp"
#include "actrec/numerics.hpp"

namespace actrec::detail {

using LogMatrix = std::vector<std::vector<double>>;

inline ForwardResult chain_forward(const std::vector<double>& log_init,
                                   const LogMatrix& log_trans, const LogMatrix& log_emit) {
    const std::size_t n_states = log_init.size();
    const std::size_t n_steps = log_emit.size();

    ForwardResult result;
    result.prefix_log_lik.reserve(n_steps);

    std::vector<double> alpha(n_states), next(n_states), terms(n_states);
    for (std::size_t j = 0; j < n_states; ++j) alpha[j] = log_init[j] + log_emit[0][j];
    result.prefix_log_lik.push_back(log_sum_exp(alpha));

    for (std::size_t t = 1; t < n_steps; ++t) {
        for (std::size_t j2 = 0; j2 < n_states; ++j2) {
            for (std::size_t j = 0; j < n_states; ++j) terms[j] = alpha[j] + log_trans[j][j2];
            next[j2] = log_sum_exp(terms) + log_emit[t][j2];
        }
        alpha.swap(next);
        result.prefix_log_lik.push_back(log_sum_exp(alpha));
    }
    result.log_lik = result.prefix_log_lik.back();
    return result;
}

struct ChainPosteriors {
    double log_lik = 0.0;
    std::vector<std::vector<double>> gamma;
    std::vector<std::vector<std::vector<double>>> xi;
};

inline ChainPosteriors chain_forward_backward(const std::vector<double>& log_init,
                                              const LogMatrix& log_trans,
                                              const LogMatrix& log_emit) {
    const std::size_t n_states = log_init.size();
    const std::size_t n_steps = log_emit.size();

    LogMatrix alpha(n_steps, std::vector<double>(n_states));
    std::vector<double> terms(n_states);
    for (std::size_t j = 0; j < n_states; ++j) alpha[0][j] = log_init[j] + log_emit[0][j];
    for (std::size_t t = 1; t < n_steps; ++t)
        for (std::size_t j2 = 0; j2 < n_states; ++j2) {
            for (std::size_t j = 0; j < n_states; ++j) terms[j] = alpha[t - 1][j] + log_trans[j][j2];
            alpha[t][j2] = log_sum_exp(terms) + log_emit[t][j2];
        }

    ChainPosteriors post;
    post.log_lik = log_sum_exp(alpha[n_steps - 1]);
    if (!std::isfinite(post.log_lik))
        throw NumericalFailure("sequence has zero probability under the model");

    LogMatrix beta(n_steps, std::vector<double>(n_states, 0.0));
    for (std::size_t t = n_steps - 1; t-- > 0;)
        for (std::size_t j = 0; j < n_states; ++j) {
            for (std::size_t j2 = 0; j2 < n_states; ++j2)
                terms[j2] = log_trans[j][j2] + log_emit[t + 1][j2] + beta[t + 1][j2];
            beta[t][j] = log_sum_exp(terms);
        }

    post.gamma.assign(n_steps, std::vector<double>(n_states));
    for (std::size_t t = 0; t < n_steps; ++t) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < n_states; ++j) {
            post.gamma[t][j] = std::exp(alpha[t][j] + beta[t][j] - post.log_lik);
            row_sum += post.gamma[t][j];
        }
        for (std::size_t j = 0; j < n_states; ++j) post.gamma[t][j] /= row_sum;
    }

    if (n_steps > 1) {
        post.xi.assign(n_steps - 1,
                       std::vector<std::vector<double>>(n_states, std::vector<double>(n_states)));
        for (std::size_t t = 0; t + 1 < n_steps; ++t) {
            double total = 0.0;
            for (std::size_t j = 0; j < n_states; ++j)
                for (std::size_t j2 = 0; j2 < n_states; ++j2) {
                    post.xi[t][j][j2] = std::exp(alpha[t][j] + log_trans[j][j2] +
                                                 log_emit[t + 1][j2] + beta[t + 1][j2] -
                                                 post.log_lik);
                    total += post.xi[t][j][j2];
                }
            for (auto& row : post.xi[t])
                for (double& v : row) v /= total;
        }
    }
    return post;
}

inline double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

}  // namespace actrec::detail

#endif
