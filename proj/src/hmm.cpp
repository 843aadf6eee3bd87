#include "actrec/hmm.hpp"

#include <cmath>

#include "actrec/rng.hpp"
#include "chain.hpp"

namespace actrec {

namespace {

constexpr double kRowSumTol = 1e-12;

void check_obs(const ObsSequence& obs) {
    if (obs.empty()) throw EmptySequence("empty observation sequence");
    for (const auto& vec : obs)
        for (double v : vec)
            if (!std::isfinite(v)) throw NonFiniteObservation("non-finite observation component");
}

void check_training_set(const std::vector<ObsSequence>& sequences) {
    if (sequences.empty()) throw EmptyTrainingSet("no training sequences");
    for (const auto& seq : sequences) {
        if (seq.size() < 2) throw SequenceTooShort("training sequences need length >= 2");
        check_obs(seq);
    }
}

std::vector<double> log_init_of(const HmmParams& params) {
    std::vector<double> init(params.prior.size());
    for (std::size_t s = 0; s < params.prior.size(); ++s)
        init[s] = detail::safe_log(params.prior[s]);
    return init;
}

detail::LogMatrix log_trans_of(const HmmParams& params) {
    detail::LogMatrix out(params.trans.size());
    for (std::size_t i = 0; i < params.trans.size(); ++i) {
        out[i].resize(params.trans[i].size());
        for (std::size_t j = 0; j < params.trans[i].size(); ++j)
            out[i][j] = detail::safe_log(params.trans[i][j]);
    }
    return out;
}

detail::LogMatrix log_emit_of(const HmmParams& params, const ObsSequence& obs) {
    detail::LogMatrix emit(obs.size(), std::vector<double>(params.emit.size()));
    for (std::size_t t = 0; t < obs.size(); ++t)
        for (std::size_t s = 0; s < params.emit.size(); ++s)
            emit[t][s] = params.emit[s].log_pdf(obs[t]);
    return emit;
}

}  // namespace

void HmmConfig::validate() const {
    if (n_states < 1) throw InvalidConfig("n_states must be >= 1");
    if (n_states > 64) throw InvalidConfig("n_states above 64");
    if (!(var_floor > 0.0)) throw InvalidConfig("var_floor must be positive");
    if (!(em_tol >= 0.0)) throw InvalidConfig("em_tol must be >= 0");
    if (em_max_iter < 1) throw InvalidConfig("em_max_iter must be >= 1");
    if (n_restarts < 0) throw InvalidConfig("n_restarts must be >= 0");
}

void HmmParams::validate(double var_floor) const {
    const int S = n_states();
    if (S < 1) throw CorruptModel("empty state space");
    if (static_cast<int>(trans.size()) != S || static_cast<int>(emit.size()) != S)
        throw CorruptModel("parameter array sizes disagree");
    auto check_simplex = [](const std::vector<double>& row, const char* what) {
        double sum = 0.0;
        for (double v : row) {
            if (!(v >= 0.0)) throw CorruptModel(std::string(what) + ": negative entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kRowSumTol)
            throw CorruptModel(std::string(what) + ": row does not sum to 1");
    };
    check_simplex(prior, "hmm prior");
    for (const auto& row : trans) {
        if (static_cast<int>(row.size()) != S) throw CorruptModel("hmm transition row size");
        check_simplex(row, "hmm transition");
    }
    for (const auto& g : emit) {
        if (g.mean.size() != kComponentDim || g.var.size() != kComponentDim)
            throw CorruptModel("hmm emission dimension");
        for (double m : g.mean)
            if (!std::isfinite(m)) throw CorruptModel("hmm emission: non-finite mean");
        for (double v : g.var)
            if (!(v >= var_floor)) throw CorruptModel("hmm emission: variance below floor");
    }
}

HmmParams hmm_init(const HmmConfig& config, const std::vector<ObsSequence>& sequences) {
    config.validate();
    check_training_set(sequences);
    const int S = config.n_states;

    HmmParams params;
    params.prior.assign(static_cast<std::size_t>(S), 1.0 / S);
    params.trans = sticky_transitions(S, 0.8);

    std::vector<double> weight(static_cast<std::size_t>(S), 0.0);
    std::vector<std::array<double, kComponentDim>> sum(static_cast<std::size_t>(S), std::array<double, kComponentDim>{});
    std::vector<std::array<double, kComponentDim>> sum_sq(static_cast<std::size_t>(S), std::array<double, kComponentDim>{});
    std::array<double, kComponentDim> g_sum{}, g_sum_sq{};
    double g_w = 0.0;
    for (const auto& seq : sequences)
        for (int s = 0; s < S; ++s) {
            const auto [lo, hi] = quantile_segment(seq.size(), S, s);
            for (std::size_t t = lo; t < hi; ++t) {
                weight[static_cast<std::size_t>(s)] += 1.0;
                g_w += 1.0;
                for (std::size_t i = 0; i < kComponentDim; ++i) {
                    sum[static_cast<std::size_t>(s)][i] += seq[t][i];
                    sum_sq[static_cast<std::size_t>(s)][i] += seq[t][i] * seq[t][i];
                    g_sum[i] += seq[t][i];
                    g_sum_sq[i] += seq[t][i] * seq[t][i];
                }
            }
        }

    params.emit.resize(static_cast<std::size_t>(S));
    for (int s = 0; s < S; ++s) {
        const bool empty = weight[static_cast<std::size_t>(s)] <= 0.0;
        const double w = empty ? g_w : weight[static_cast<std::size_t>(s)];
        const auto& s1 = empty ? g_sum : sum[static_cast<std::size_t>(s)];
        const auto& s2 = empty ? g_sum_sq : sum_sq[static_cast<std::size_t>(s)];
        DiagGaussian& g = params.emit[static_cast<std::size_t>(s)];
        g.mean.resize(kComponentDim);
        g.var.resize(kComponentDim);
        for (std::size_t i = 0; i < kComponentDim; ++i) {
            g.mean[i] = s1[i] / w;
            g.var[i] = std::max(s2[i] / w - g.mean[i] * g.mean[i], config.var_floor);
        }
    }
    return params;
}

ForwardResult hmm_forward(const HmmParams& params, const ObsSequence& obs) {
    check_obs(obs);
    return detail::chain_forward(log_init_of(params), log_trans_of(params),
                                 log_emit_of(params, obs));
}

namespace {

std::pair<HmmParams, EmReport> run_em(const HmmConfig& config,
                                      const std::vector<ObsSequence>& sequences,
                                      HmmParams params) {
    const int S = config.n_states;

    EmReport report;
    double prev_ll = kNegInf;
    for (int iter = 0; iter < config.em_max_iter; ++iter) {
        const auto log_init = log_init_of(params);
        const auto log_trans = log_trans_of(params);

        std::vector<double> prior_num(static_cast<std::size_t>(S), 0.0);
        std::vector<std::vector<double>> trans_num(
            static_cast<std::size_t>(S), std::vector<double>(static_cast<std::size_t>(S), 0.0));
        std::vector<double> w(static_cast<std::size_t>(S), 0.0);
        std::vector<std::array<double, kComponentDim>> sum(static_cast<std::size_t>(S), std::array<double, kComponentDim>{});
        std::vector<std::array<double, kComponentDim>> sum_sq(static_cast<std::size_t>(S), std::array<double, kComponentDim>{});

        double total_ll = 0.0;
        for (const auto& seq : sequences) {
            const auto post =
                detail::chain_forward_backward(log_init, log_trans, log_emit_of(params, seq));
            if (!std::isfinite(post.log_lik))
                throw NumericalFailure("forward pass returned a non-finite log-likelihood");
            total_ll += post.log_lik;

            for (int s = 0; s < S; ++s) prior_num[static_cast<std::size_t>(s)] += post.gamma[0][static_cast<std::size_t>(s)];
            for (std::size_t t = 0; t < seq.size(); ++t)
                for (int s = 0; s < S; ++s) {
                    const double g = post.gamma[t][static_cast<std::size_t>(s)];
                    w[static_cast<std::size_t>(s)] += g;
                    for (std::size_t i = 0; i < kComponentDim; ++i) {
                        sum[static_cast<std::size_t>(s)][i] += g * seq[t][i];
                        sum_sq[static_cast<std::size_t>(s)][i] += g * seq[t][i] * seq[t][i];
                    }
                }
            for (const auto& xi_t : post.xi)
                for (int s = 0; s < S; ++s)
                    for (int s2 = 0; s2 < S; ++s2)
                        trans_num[static_cast<std::size_t>(s)][static_cast<std::size_t>(s2)] +=
                            xi_t[static_cast<std::size_t>(s)][static_cast<std::size_t>(s2)];
        }

        report.log_lik_trace.push_back(total_ll);
        report.iterations = iter + 1;
        if (iter > 0) {
            const double denom = std::max(std::abs(prev_ll), 1.0);
            if (total_ll - prev_ll < config.em_tol * denom) {
                report.converged = true;
                break;
            }
        }
        prev_ll = total_ll;

        auto normalized_or = [](const std::vector<double>& counts,
                                const std::vector<double>& fallback) {
            double total = 0.0;
            for (double c : counts) total += c;
            if (total <= 1e-300) return fallback;
            std::vector<double> out(counts.size());
            for (std::size_t i = 0; i < counts.size(); ++i) out[i] = counts[i] / total;
            return out;
        };

        HmmParams next = params;
        next.prior = normalized_or(prior_num, params.prior);
        for (int s = 0; s < S; ++s)
            next.trans[static_cast<std::size_t>(s)] = normalized_or(
                trans_num[static_cast<std::size_t>(s)], params.trans[static_cast<std::size_t>(s)]);
        for (int s = 0; s < S; ++s) {
            if (w[static_cast<std::size_t>(s)] <= 1e-300) continue;
            DiagGaussian& g = next.emit[static_cast<std::size_t>(s)];
            for (std::size_t i = 0; i < kComponentDim; ++i) {
                g.mean[i] = sum[static_cast<std::size_t>(s)][i] / w[static_cast<std::size_t>(s)];
                g.var[i] = std::max(sum_sq[static_cast<std::size_t>(s)][i] /
                                            w[static_cast<std::size_t>(s)] -
                                        g.mean[i] * g.mean[i],
                                    config.var_floor);
            }
        }
        params = std::move(next);
    }
    return {std::move(params), std::move(report)};
}

}  // namespace

std::pair<HmmParams, EmReport> hmm_em_fit(const HmmConfig& config,
                                          const std::vector<ObsSequence>& sequences) {
    const HmmParams init = hmm_init(config, sequences);
    auto best = run_em(config, sequences, init);
    if (config.n_restarts > 0) {
        Rng rng(config.seed);
        for (int r = 0; r < config.n_restarts; ++r) {
            HmmParams jittered = init;
            for (auto& g : jittered.emit)
                for (std::size_t i = 0; i < g.mean.size(); ++i)
                    g.mean[i] += 0.25 * std::sqrt(g.var[i]) * rng.next_gaussian();
            auto candidate = run_em(config, sequences, std::move(jittered));
            if (candidate.second.log_lik_trace.back() > best.second.log_lik_trace.back())
                best = std::move(candidate);
        }
    }
    return best;
}

}  // namespace actrec
