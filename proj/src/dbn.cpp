#include "actrec/dbn.hpp"

#include <cmath>

#include "actrec/rng.hpp"
#include "chain.hpp"

namespace actrec {

namespace {

constexpr double kRowSumTol = 1e-12;

void check_simplex(const std::vector<double>& row, const char* what) {
    double sum = 0.0;
    for (double v : row) {
        if (!(v >= 0.0)) throw CorruptModel(std::string(what) + ": negative entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
        throw CorruptModel(std::string(what) + ": row does not sum to 1");
}

void check_emission(const DiagGaussian& g, std::size_t dim, double var_floor, const char* what) {
    if (g.mean.size() != dim || g.var.size() != dim)
        throw CorruptModel(std::string(what) + ": wrong emission dimension");
    for (double m : g.mean)
        if (!std::isfinite(m)) throw CorruptModel(std::string(what) + ": non-finite mean");
    for (double v : g.var)
        if (!(v >= var_floor)) throw CorruptModel(std::string(what) + ": variance below floor");
}

void check_obs(const ObsSequence& obs) {
    if (obs.empty()) throw EmptySequence("empty observation sequence");
    for (const auto& vec : obs)
        for (double v : vec)
            if (!std::isfinite(v)) throw NonFiniteObservation("non-finite observation component");
}

std::array<double, 6> geo_block(const ObsVector& o) {
    std::array<double, 6> g;
    for (std::size_t i = 0; i < kGeoComponents.size(); ++i)
        g[i] = o[static_cast<std::size_t>(kGeoComponents[i])];
    return g;
}

std::array<double, 2> mot_block(const ObsVector& o) {
    std::array<double, 2> m;
    for (std::size_t i = 0; i < kMotComponents.size(); ++i)
        m[i] = o[static_cast<std::size_t>(kMotComponents[i])];
    return m;
}

// Joint chain assembly: j = p * M + m.
std::vector<double> joint_log_init(const DbnParams& params) {
    const int P = params.n_phase(), M = params.n_motion();
    std::vector<double> init(static_cast<std::size_t>(P * M));
    for (int p = 0; p < P; ++p)
        for (int m = 0; m < M; ++m)
            init[static_cast<std::size_t>(p * M + m)] =
                detail::safe_log(params.phase_prior[static_cast<std::size_t>(p)]) +
                detail::safe_log(params.motion_prior[static_cast<std::size_t>(m)]);
    return init;
}

detail::LogMatrix joint_log_trans(const DbnParams& params) {
    const int P = params.n_phase(), M = params.n_motion();
    const int J = P * M;
    detail::LogMatrix trans(static_cast<std::size_t>(J),
                            std::vector<double>(static_cast<std::size_t>(J)));
    for (int p = 0; p < P; ++p)
        for (int m = 0; m < M; ++m)
            for (int p2 = 0; p2 < P; ++p2)
                for (int m2 = 0; m2 < M; ++m2)
                    trans[static_cast<std::size_t>(p * M + m)]
                         [static_cast<std::size_t>(p2 * M + m2)] =
                             detail::safe_log(params.phase_trans[static_cast<std::size_t>(p)]
                                                                [static_cast<std::size_t>(p2)]) +
                             detail::safe_log(
                                 params.motion_trans[static_cast<std::size_t>(p2)]
                                                    [static_cast<std::size_t>(m)]
                                                    [static_cast<std::size_t>(m2)]);
    return trans;
}

detail::LogMatrix joint_log_emit(const DbnParams& params, const ObsSequence& obs) {
    const int P = params.n_phase(), M = params.n_motion();
    const std::size_t T = obs.size();
    detail::LogMatrix emit(T, std::vector<double>(static_cast<std::size_t>(P * M)));
    std::vector<double> geo_ll(static_cast<std::size_t>(P)), mot_ll(static_cast<std::size_t>(M));
    for (std::size_t t = 0; t < T; ++t) {
        const auto geo = geo_block(obs[t]);
        const auto mot = mot_block(obs[t]);
        for (int p = 0; p < P; ++p)
            geo_ll[static_cast<std::size_t>(p)] =
                params.geo_emit[static_cast<std::size_t>(p)].log_pdf(geo);
        for (int m = 0; m < M; ++m)
            mot_ll[static_cast<std::size_t>(m)] =
                params.mot_emit[static_cast<std::size_t>(m)].log_pdf(mot);
        for (int p = 0; p < P; ++p)
            for (int m = 0; m < M; ++m)
                emit[t][static_cast<std::size_t>(p * M + m)] =
                    geo_ll[static_cast<std::size_t>(p)] + mot_ll[static_cast<std::size_t>(m)];
    }
    return emit;
}

struct BlockStats {
    std::vector<double> weight;                  // per state
    std::vector<std::vector<double>> sum;        // per state, per dim
    std::vector<std::vector<double>> sum_sq;

    BlockStats(int n_states, int dim)
        : weight(static_cast<std::size_t>(n_states), 0.0),
          sum(static_cast<std::size_t>(n_states), std::vector<double>(static_cast<std::size_t>(dim), 0.0)),
          sum_sq(static_cast<std::size_t>(n_states),
                 std::vector<double>(static_cast<std::size_t>(dim), 0.0)) {}

    void add(int state, std::span<const double> x, double w) {
        weight[static_cast<std::size_t>(state)] += w;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sum[static_cast<std::size_t>(state)][i] += w * x[i];
            sum_sq[static_cast<std::size_t>(state)][i] += w * x[i] * x[i];
        }
    }

    // Weighted moments with the variance floor; keeps `fallback` when the
    // state received no responsibility.
    DiagGaussian finish(int state, const DiagGaussian& fallback, double var_floor) const {
        const double w = weight[static_cast<std::size_t>(state)];
        if (w <= 1e-300) return fallback;
        DiagGaussian g;
        const std::size_t dim = sum[static_cast<std::size_t>(state)].size();
        g.mean.resize(dim);
        g.var.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            g.mean[i] = sum[static_cast<std::size_t>(state)][i] / w;
            g.var[i] = std::max(sum_sq[static_cast<std::size_t>(state)][i] / w - g.mean[i] * g.mean[i],
                                var_floor);
        }
        return g;
    }
};

std::vector<double> normalized_or(const std::vector<double>& counts,
                                  const std::vector<double>& fallback) {
    double total = 0.0;
    for (double c : counts) total += c;
    if (total <= 1e-300) return fallback;
    std::vector<double> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) out[i] = counts[i] / total;
    return out;
}

}  // namespace

void DbnConfig::validate() const {
    if (n_phase < 1 || n_motion < 1) throw InvalidConfig("state counts must be >= 1");
    if (n_phase * n_motion > 64)
        throw InvalidConfig("joint state space above 64 (exact inference is quadratic in it)");
    if (!(var_floor > 0.0)) throw InvalidConfig("var_floor must be positive");
    if (!(em_tol >= 0.0)) throw InvalidConfig("em_tol must be >= 0");
    if (em_max_iter < 1) throw InvalidConfig("em_max_iter must be >= 1");
    if (n_restarts < 0) throw InvalidConfig("n_restarts must be >= 0");
}

void DbnParams::validate(double var_floor) const {
    const int P = n_phase(), M = n_motion();
    if (P < 1 || M < 1) throw CorruptModel("empty state space");
    if (static_cast<int>(phase_trans.size()) != P || static_cast<int>(motion_trans.size()) != P ||
        static_cast<int>(geo_emit.size()) != P || static_cast<int>(mot_emit.size()) != M)
        throw CorruptModel("parameter array sizes disagree");
    check_simplex(phase_prior, "phase prior");
    check_simplex(motion_prior, "motion prior");
    for (const auto& row : phase_trans) {
        if (static_cast<int>(row.size()) != P) throw CorruptModel("phase transition row size");
        check_simplex(row, "phase transition");
    }
    for (const auto& per_phase : motion_trans) {
        if (static_cast<int>(per_phase.size()) != M) throw CorruptModel("motion transition size");
        for (const auto& row : per_phase) {
            if (static_cast<int>(row.size()) != M) throw CorruptModel("motion transition row size");
            check_simplex(row, "motion transition");
        }
    }
    for (const auto& g : geo_emit) check_emission(g, kGeoComponents.size(), var_floor, "geometry emission");
    for (const auto& g : mot_emit) check_emission(g, kMotComponents.size(), var_floor, "motion emission");
}

std::pair<std::size_t, std::size_t> quantile_segment(std::size_t length, int n_segments,
                                                     int segment) {
    const std::size_t lo = length * static_cast<std::size_t>(segment) /
                           static_cast<std::size_t>(n_segments);
    const std::size_t hi = length * static_cast<std::size_t>(segment + 1) /
                           static_cast<std::size_t>(n_segments);
    return {lo, hi};
}

std::vector<std::vector<double>> sticky_transitions(int n, double self_prob) {
    std::vector<std::vector<double>> trans(static_cast<std::size_t>(n),
                                           std::vector<double>(static_cast<std::size_t>(n)));
    if (n == 1) {
        trans[0][0] = 1.0;
        return trans;
    }
    const double off = (1.0 - self_prob) / (n - 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            trans[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                i == j ? self_prob : off;
    return trans;
}

namespace {

// Pooled per-segment moments over one feature block; segment -> Gaussian.
template <std::size_t Dim, typename BlockFn>
std::vector<DiagGaussian> quantile_emissions(const std::vector<ObsSequence>& sequences,
                                             int n_segments, double var_floor, BlockFn block) {
    std::vector<double> weight(static_cast<std::size_t>(n_segments), 0.0);
    std::vector<std::array<double, Dim>> sum(static_cast<std::size_t>(n_segments), std::array<double, Dim>{});
    std::vector<std::array<double, Dim>> sum_sq(static_cast<std::size_t>(n_segments), std::array<double, Dim>{});
    std::array<double, Dim> g_sum{}, g_sum_sq{};
    double g_weight = 0.0;

    for (const auto& seq : sequences)
        for (int s = 0; s < n_segments; ++s) {
            const auto [lo, hi] = quantile_segment(seq.size(), n_segments, s);
            for (std::size_t t = lo; t < hi; ++t) {
                const auto x = block(seq[t]);
                weight[static_cast<std::size_t>(s)] += 1.0;
                g_weight += 1.0;
                for (std::size_t i = 0; i < Dim; ++i) {
                    sum[static_cast<std::size_t>(s)][i] += x[i];
                    sum_sq[static_cast<std::size_t>(s)][i] += x[i] * x[i];
                    g_sum[i] += x[i];
                    g_sum_sq[i] += x[i] * x[i];
                }
            }
        }

    std::vector<DiagGaussian> out;
    out.reserve(static_cast<std::size_t>(n_segments));
    for (int s = 0; s < n_segments; ++s) {
        DiagGaussian g;
        g.mean.resize(Dim);
        g.var.resize(Dim);
        // Segments that received no steps (very short sequences) fall back
        // to the global moments.
        const bool empty = weight[static_cast<std::size_t>(s)] <= 0.0;
        const double w = empty ? g_weight : weight[static_cast<std::size_t>(s)];
        const auto& s1 = empty ? g_sum : sum[static_cast<std::size_t>(s)];
        const auto& s2 = empty ? g_sum_sq : sum_sq[static_cast<std::size_t>(s)];
        for (std::size_t i = 0; i < Dim; ++i) {
            g.mean[i] = s1[i] / w;
            g.var[i] = std::max(s2[i] / w - g.mean[i] * g.mean[i], var_floor);
        }
        out.push_back(std::move(g));
    }
    return out;
}

void check_training_set(const std::vector<ObsSequence>& sequences) {
    if (sequences.empty()) throw EmptyTrainingSet("no training sequences");
    for (const auto& seq : sequences) {
        if (seq.size() < 2) throw SequenceTooShort("training sequences need length >= 2");
        check_obs(seq);
    }
}

}  // namespace

DbnParams dbn_init(const DbnConfig& config, const std::vector<ObsSequence>& sequences) {
    config.validate();
    check_training_set(sequences);

    DbnParams params;
    params.phase_prior.assign(static_cast<std::size_t>(config.n_phase), 1.0 / config.n_phase);
    params.motion_prior.assign(static_cast<std::size_t>(config.n_motion), 1.0 / config.n_motion);
    params.phase_trans = sticky_transitions(config.n_phase, 0.8);
    params.motion_trans.assign(static_cast<std::size_t>(config.n_phase),
                               sticky_transitions(config.n_motion, 0.8));
    params.geo_emit = quantile_emissions<6>(sequences, config.n_phase, config.var_floor,
                                            [](const ObsVector& o) { return geo_block(o); });
    params.mot_emit = quantile_emissions<2>(sequences, config.n_motion, config.var_floor,
                                            [](const ObsVector& o) { return mot_block(o); });
    return params;
}

ForwardResult dbn_forward(const DbnParams& params, const ObsSequence& obs) {
    check_obs(obs);
    return detail::chain_forward(joint_log_init(params), joint_log_trans(params),
                                 joint_log_emit(params, obs));
}

double dbn_loglik_bruteforce(const DbnParams& params, const ObsSequence& obs) {
    check_obs(obs);
    const int P = params.n_phase(), M = params.n_motion();
    const int J = P * M;
    const std::size_t T = obs.size();

    double n_paths = 1.0;
    for (std::size_t t = 0; t < T; ++t) {
        n_paths *= J;
        if (n_paths > 1e6) throw TooLargeForEnumeration("more than 1e6 hidden paths");
    }

    // Direct per-component density; deliberately does not share the forward
    // pass's emission code.
    auto log_normal = [](double x, double mean, double var) {
        const double d = x - mean;
        return -0.5 * (d * d / var + std::log(2.0 * M_PI * var));
    };
    auto log_emit = [&](std::size_t t, int p, int m) {
        double ll = 0.0;
        const auto& geo = params.geo_emit[static_cast<std::size_t>(p)];
        for (std::size_t i = 0; i < kGeoComponents.size(); ++i)
            ll += log_normal(obs[t][static_cast<std::size_t>(kGeoComponents[i])], geo.mean[i],
                             geo.var[i]);
        const auto& mot = params.mot_emit[static_cast<std::size_t>(m)];
        for (std::size_t i = 0; i < kMotComponents.size(); ++i)
            ll += log_normal(obs[t][static_cast<std::size_t>(kMotComponents[i])], mot.mean[i],
                             mot.var[i]);
        return ll;
    };

    std::vector<int> path(T, 0);
    double total = kNegInf;
    while (true) {
        double lp = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            const int p = path[t] / M, m = path[t] % M;
            if (t == 0)
                lp += detail::safe_log(params.phase_prior[static_cast<std::size_t>(p)]) +
                      detail::safe_log(params.motion_prior[static_cast<std::size_t>(m)]);
            else {
                const int p_prev = path[t - 1] / M, m_prev = path[t - 1] % M;
                lp += detail::safe_log(params.phase_trans[static_cast<std::size_t>(p_prev)]
                                                         [static_cast<std::size_t>(p)]) +
                      detail::safe_log(params.motion_trans[static_cast<std::size_t>(p)]
                                                          [static_cast<std::size_t>(m_prev)]
                                                          [static_cast<std::size_t>(m)]);
            }
            lp += log_emit(t, p, m);
        }
        total = log_add_exp(total, lp);

        std::size_t digit = 0;
        while (digit < T && ++path[digit] == J) {
            path[digit] = 0;
            ++digit;
        }
        if (digit == T) break;
    }
    return total;
}

DbnPosteriors dbn_forward_backward(const DbnParams& params, const ObsSequence& obs) {
    check_obs(obs);
    auto post = detail::chain_forward_backward(joint_log_init(params), joint_log_trans(params),
                                               joint_log_emit(params, obs));
    return {std::move(post.gamma), std::move(post.xi)};
}

namespace {

std::pair<DbnParams, EmReport> run_em(const DbnConfig& config,
                                      const std::vector<ObsSequence>& sequences,
                                      DbnParams params) {
    const int P = config.n_phase, M = config.n_motion;

    EmReport report;
    double prev_ll = kNegInf;
    for (int iter = 0; iter < config.em_max_iter; ++iter) {
        const auto log_init = joint_log_init(params);
        const auto log_trans = joint_log_trans(params);

        std::vector<double> phase_prior_num(static_cast<std::size_t>(P), 0.0);
        std::vector<double> motion_prior_num(static_cast<std::size_t>(M), 0.0);
        std::vector<std::vector<double>> phase_trans_num(
            static_cast<std::size_t>(P), std::vector<double>(static_cast<std::size_t>(P), 0.0));
        std::vector<std::vector<std::vector<double>>> motion_trans_num(
            static_cast<std::size_t>(P),
            std::vector<std::vector<double>>(static_cast<std::size_t>(M),
                                             std::vector<double>(static_cast<std::size_t>(M), 0.0)));
        BlockStats geo_stats(P, 6), mot_stats(M, 2);

        double total_ll = 0.0;
        for (const auto& seq : sequences) {
            const auto post =
                detail::chain_forward_backward(log_init, log_trans, joint_log_emit(params, seq));
            if (!std::isfinite(post.log_lik))
                throw NumericalFailure("forward pass returned a non-finite log-likelihood");
            total_ll += post.log_lik;

            for (int p = 0; p < P; ++p)
                for (int m = 0; m < M; ++m) {
                    phase_prior_num[static_cast<std::size_t>(p)] +=
                        post.gamma[0][static_cast<std::size_t>(p * M + m)];
                    motion_prior_num[static_cast<std::size_t>(m)] +=
                        post.gamma[0][static_cast<std::size_t>(p * M + m)];
                }

            for (std::size_t t = 0; t < seq.size(); ++t) {
                const auto geo = geo_block(seq[t]);
                const auto mot = mot_block(seq[t]);
                for (int p = 0; p < P; ++p)
                    for (int m = 0; m < M; ++m) {
                        const double g = post.gamma[t][static_cast<std::size_t>(p * M + m)];
                        geo_stats.add(p, std::span<const double>(geo.data(), 6), g);
                        mot_stats.add(m, std::span<const double>(mot.data(), 2), g);
                    }
            }

            for (const auto& xi_t : post.xi)
                for (int p = 0; p < P; ++p)
                    for (int m = 0; m < M; ++m)
                        for (int p2 = 0; p2 < P; ++p2)
                            for (int m2 = 0; m2 < M; ++m2) {
                                const double x = xi_t[static_cast<std::size_t>(p * M + m)]
                                                     [static_cast<std::size_t>(p2 * M + m2)];
                                phase_trans_num[static_cast<std::size_t>(p)]
                                               [static_cast<std::size_t>(p2)] += x;
                                motion_trans_num[static_cast<std::size_t>(p2)]
                                                [static_cast<std::size_t>(m)]
                                                [static_cast<std::size_t>(m2)] += x;
                            }
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

        DbnParams next = params;
        next.phase_prior = normalized_or(phase_prior_num, params.phase_prior);
        next.motion_prior = normalized_or(motion_prior_num, params.motion_prior);
        for (int p = 0; p < P; ++p)
            next.phase_trans[static_cast<std::size_t>(p)] =
                normalized_or(phase_trans_num[static_cast<std::size_t>(p)],
                              params.phase_trans[static_cast<std::size_t>(p)]);
        for (int p2 = 0; p2 < P; ++p2)
            for (int m = 0; m < M; ++m)
                next.motion_trans[static_cast<std::size_t>(p2)][static_cast<std::size_t>(m)] =
                    normalized_or(
                        motion_trans_num[static_cast<std::size_t>(p2)][static_cast<std::size_t>(m)],
                        params.motion_trans[static_cast<std::size_t>(p2)][static_cast<std::size_t>(m)]);
        for (int p = 0; p < P; ++p)
            next.geo_emit[static_cast<std::size_t>(p)] = geo_stats.finish(
                p, params.geo_emit[static_cast<std::size_t>(p)], config.var_floor);
        for (int m = 0; m < M; ++m)
            next.mot_emit[static_cast<std::size_t>(m)] = mot_stats.finish(
                m, params.mot_emit[static_cast<std::size_t>(m)], config.var_floor);
        params = std::move(next);
    }
    return {std::move(params), std::move(report)};
}

}  // namespace

std::pair<DbnParams, EmReport> dbn_em_fit(const DbnConfig& config,
                                          const std::vector<ObsSequence>& sequences) {
    const DbnParams init = dbn_init(config, sequences);
    auto best = run_em(config, sequences, init);
    if (config.n_restarts > 0) {
        Rng rng(config.seed);
        for (int r = 0; r < config.n_restarts; ++r) {
            DbnParams jittered = init;
            for (auto& g : jittered.geo_emit)
                for (std::size_t i = 0; i < g.mean.size(); ++i)
                    g.mean[i] += 0.25 * std::sqrt(g.var[i]) * rng.next_gaussian();
            for (auto& g : jittered.mot_emit)
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
