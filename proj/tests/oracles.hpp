#ifndef ACTREC_TESTS_ORACLES_HPP
#define ACTREC_TESTS_ORACLES_HPP

// Test-side oracles and generators. Everything here is written directly from
// the model definitions and stays independent of the library's inference
// code paths.

#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "actrec/dbn.hpp"
#include "actrec/features.hpp"
#include "actrec/hmm.hpp"
#include "actrec/rng.hpp"

namespace oracles {

using namespace actrec;

inline double log_normal(double x, double mean, double var) {
    const double d = x - mean;
    return -0.5 * (d * d / var + std::log(2.0 * M_PI * var));
}

inline std::vector<double> random_simplex(Rng& rng, int n) {
    std::vector<double> row(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (auto& v : row) {
        v = rng.uniform(0.05, 1.0);
        sum += v;
    }
    for (auto& v : row) v /= sum;
    return row;
}

inline DbnParams random_dbn_params(Rng& rng, int P, int M) {
    DbnParams params;
    params.phase_prior = random_simplex(rng, P);
    params.motion_prior = random_simplex(rng, M);
    for (int p = 0; p < P; ++p) params.phase_trans.push_back(random_simplex(rng, P));
    for (int p = 0; p < P; ++p) {
        std::vector<std::vector<double>> rows;
        for (int m = 0; m < M; ++m) rows.push_back(random_simplex(rng, M));
        params.motion_trans.push_back(std::move(rows));
    }
    for (int p = 0; p < P; ++p) {
        DiagGaussian g;
        for (int i = 0; i < 6; ++i) {
            g.mean.push_back(rng.uniform(-1.0, 1.0));
            g.var.push_back(rng.uniform(0.05, 1.0));
        }
        params.geo_emit.push_back(std::move(g));
    }
    for (int m = 0; m < M; ++m) {
        DiagGaussian g;
        for (int i = 0; i < 2; ++i) {
            g.mean.push_back(rng.uniform(-1.0, 1.0));
            g.var.push_back(rng.uniform(0.05, 1.0));
        }
        params.mot_emit.push_back(std::move(g));
    }
    return params;
}

inline HmmParams random_hmm_params(Rng& rng, int S) {
    HmmParams params;
    params.prior = random_simplex(rng, S);
    for (int s = 0; s < S; ++s) params.trans.push_back(random_simplex(rng, S));
    for (int s = 0; s < S; ++s) {
        DiagGaussian g;
        for (int i = 0; i < kComponentDim; ++i) {
            g.mean.push_back(rng.uniform(-1.0, 1.0));
            g.var.push_back(rng.uniform(0.05, 1.0));
        }
        params.emit.push_back(std::move(g));
    }
    return params;
}

inline ObsSequence random_obs(Rng& rng, int T) {
    ObsSequence obs(static_cast<std::size_t>(T));
    for (auto& vec : obs)
        for (auto& v : vec) v = rng.uniform(-1.5, 1.5);
    return obs;
}

inline double dbn_emit_ll(const DbnParams& params, const ObsVector& o, int p, int m) {
    double ll = 0.0;
    const auto& geo = params.geo_emit[static_cast<std::size_t>(p)];
    for (std::size_t i = 0; i < kGeoComponents.size(); ++i)
        ll += log_normal(o[static_cast<std::size_t>(kGeoComponents[i])], geo.mean[i], geo.var[i]);
    const auto& mot = params.mot_emit[static_cast<std::size_t>(m)];
    for (std::size_t i = 0; i < kMotComponents.size(); ++i)
        ll += log_normal(o[static_cast<std::size_t>(kMotComponents[i])], mot.mean[i], mot.var[i]);
    return ll;
}

inline double hmm_obs_ll(const HmmParams& params, const ObsVector& o, int s) {
    double ll = 0.0;
    for (int i = 0; i < kComponentDim; ++i)
        ll += log_normal(o[static_cast<std::size_t>(i)],
                         params.emit[static_cast<std::size_t>(s)].mean[static_cast<std::size_t>(i)],
                         params.emit[static_cast<std::size_t>(s)].var[static_cast<std::size_t>(i)]);
    return ll;
}

// Enumerates all S^T hidden paths of a plain HMM.
inline double hmm_loglik_enumeration(const HmmParams& params, const ObsSequence& obs) {
    const int S = params.n_states();
    const std::size_t T = obs.size();
    std::vector<int> path(T, 0);
    double total = kNegInf;
    while (true) {
        double lp = std::log(params.prior[static_cast<std::size_t>(path[0])]) +
                    hmm_obs_ll(params, obs[0], path[0]);
        for (std::size_t t = 1; t < T; ++t)
            lp += std::log(params.trans[static_cast<std::size_t>(path[t - 1])]
                                       [static_cast<std::size_t>(path[t])]) +
                  hmm_obs_ll(params, obs[t], path[t]);
        total = log_add_exp(total, lp);

        std::size_t digit = 0;
        while (digit < T && ++path[digit] == S) {
            path[digit] = 0;
            ++digit;
        }
        if (digit == T) break;
    }
    return total;
}

// Union-find connected-components reference for detect_body_box: largest
// 8-connected area, ties to the smaller (y_min, x_min), tight box.
inline std::optional<BoundingBox> largest_component_oracle(const ForegroundMask& mask,
                                                           int min_area) {
    const int w = mask.width, h = mask.height;
    const int n = w * h;
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) {
        while (parent[static_cast<std::size_t>(a)] != a)
            a = parent[static_cast<std::size_t>(a)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
        return a;
    };
    auto unite = [&](int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); };

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y)) continue;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    if (mask.at(nx, ny)) unite(y * w + x, ny * w + nx);
                }
        }

    std::map<int, std::pair<long, BoundingBox>> comps;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y)) continue;
            const int root = find(y * w + x);
            auto it = comps.find(root);
            if (it == comps.end())
                comps.emplace(root, std::make_pair(1L, BoundingBox{x, y, x, y}));
            else {
                it->second.first += 1;
                it->second.second.x_min = std::min(it->second.second.x_min, x);
                it->second.second.x_max = std::max(it->second.second.x_max, x);
                it->second.second.y_min = std::min(it->second.second.y_min, y);
                it->second.second.y_max = std::max(it->second.second.y_max, y);
            }
        }

    std::optional<BoundingBox> best;
    long best_area = 0;
    for (const auto& [root, comp] : comps) {
        const auto& [area, box] = comp;
        const bool better =
            area > best_area ||
            (area == best_area && best &&
             (box.y_min < best->y_min || (box.y_min == best->y_min && box.x_min < best->x_min)));
        if (better) {
            best_area = area;
            best = box;
        }
    }
    if (!best || best_area < min_area) return std::nullopt;
    return best;
}

}  // namespace oracles

#endif
