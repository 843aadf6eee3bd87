#ifndef ACTREC_NUMERICS_HPP
#define ACTREC_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace actrec {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)), safe for -inf arguments.
inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double log_sum_exp(std::span<const double> vals) {
    double m = kNegInf;
    for (double v : vals) m = std::max(m, v);
    if (m == kNegInf) return kNegInf;
    double sum = 0.0;
    for (double v : vals) sum += std::exp(v - m);
    return m + std::log(sum);
}

inline double log_sum_exp(const std::vector<double>& vals) {
    return log_sum_exp(std::span<const double>(vals));
}

// Diagonal Gaussian over a fixed-dimension block.
struct DiagGaussian {
    std::vector<double> mean;
    std::vector<double> var;

    double log_pdf(std::span<const double> x) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < mean.size(); ++i) {
            const double d = x[i] - mean[i];
            acc += d * d / var[i] + std::log(2.0 * M_PI * var[i]);
        }
        return -0.5 * acc;
    }
};

}  // namespace actrec

#endif
