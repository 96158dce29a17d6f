#pragma once

// Mergeable running moments (through the fourth central) and the one-sample
// Kolmogorov-Smirnov test with the asymptotic p-value. Moment objects merge
// associatively, so parallel blocks reduce to the same result in any fixed
// order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace isingcm {

struct RunningMoments {
    std::uint64_t n = 0;
    double mean = 0.0;
    double M2 = 0.0;  // sum of (x - mean)^2
    double M3 = 0.0;
    double M4 = 0.0;

    void add(double x) {
        const auto n1 = static_cast<double>(n);
        ++n;
        const auto nn = static_cast<double>(n);
        const double delta = x - mean;
        const double dn = delta / nn;
        const double dn2 = dn * dn;
        const double term1 = delta * dn * n1;
        mean += dn;
        M4 += term1 * dn2 * (nn * nn - 3 * nn + 3) + 6 * dn2 * M2 - 4 * dn * M3;
        M3 += term1 * dn * (nn - 2) - 3 * dn * M2;
        M2 += term1;
    }

    void merge(const RunningMoments& b) {
        if (b.n == 0) return;
        if (n == 0) {
            *this = b;
            return;
        }
        const auto na = static_cast<double>(n);
        const auto nb = static_cast<double>(b.n);
        const double nn = na + nb;
        const double d = b.mean - mean;
        const double d2 = d * d;
        const double M4n = M4 + b.M4 + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (nn * nn * nn) +
                           6 * d2 * (na * na * b.M2 + nb * nb * M2) / (nn * nn) +
                           4 * d * (na * b.M3 - nb * M3) / nn;
        const double M3n = M3 + b.M3 + d * d2 * na * nb * (na - nb) / (nn * nn) +
                           3 * d * (na * b.M2 - nb * M2) / nn;
        const double M2n = M2 + b.M2 + d2 * na * nb / nn;
        mean += d * nb / nn;
        M2 = M2n;
        M3 = M3n;
        M4 = M4n;
        n += b.n;
    }

    double variance() const { return n > 1 ? M2 / static_cast<double>(n - 1) : 0.0; }
    double population_variance() const { return n > 0 ? M2 / static_cast<double>(n) : 0.0; }
    double fourth_central() const { return n > 0 ? M4 / static_cast<double>(n) : 0.0; }

    double se_mean() const {
        return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
    }

    // SE of the sample variance, kurtosis-aware:
    // Var(s^2) = (mu4 - sigma^4 (n-3)/(n-1)) / n.
    double se_variance() const {
        if (n < 2) return 0.0;
        const auto nn = static_cast<double>(n);
        const double s2 = population_variance();
        const double v = (fourth_central() - s2 * s2 * (nn - 3) / (nn - 1)) / nn;
        return std::sqrt(std::max(0.0, v));
    }
};

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Complement of the Kolmogorov distribution at x: 2 sum (-1)^{k-1} e^{-2k^2x^2},
// truncated once terms drop below 1e-12.
inline double kolmogorov_p(double x) {
    if (!(x > 0.0)) return 1.0;
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k < 100000; ++k) {
        const double term = std::exp(-2.0 * x * x * static_cast<double>(k) * k);
        p += sign * term;
        if (term < 1e-12) break;
        sign = -sign;
    }
    return std::clamp(2.0 * p, 0.0, 1.0);
}

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::uint64_t n = 0;
};

// Empirical-CDF supremum against a target CDF; no sample-size requirement.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(samples.begin(), samples.end());
    const auto n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, f - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
    }
    return d;
}

template <class Cdf>
KsResult ks_test(const std::vector<double>& samples, Cdf&& cdf) {
    if (samples.size() < 50) throw std::invalid_argument("ks_test: need at least 50 samples");
    KsResult r;
    r.n = samples.size();
    r.statistic = ks_statistic(samples, cdf);
    r.p_value = kolmogorov_p(std::sqrt(static_cast<double>(r.n)) * r.statistic);
    return r;
}

} // namespace isingcm
