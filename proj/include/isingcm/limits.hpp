#pragma once

// Thermodynamic limits and CLT variances for the two degree models.
// Line corrections enter through log(A+ + A- r^l) = log A+ + log1p(a r^l);
// each series is walked once with second-order duals carrying the field
// derivatives, then extended past the truncation to report a tail bound.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dual.hpp"
#include "ising1d.hpp"

namespace isingcm {

inline double pressure_cm2(const IsingParams& p) { return pressure_1d(p); }

// Limit law of the length of a uniformly rooted line: geometric with ratio
// 2p/(1+p) started at l = 2, total mass (1-p)/2 (the line density per vertex).
inline double p_star(double p, std::uint64_t l) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p_star: p in [0,1] required");
    if (l < 2) throw std::invalid_argument("p_star: l >= 2 required");
    const double q = 2 * p / (p + 1);
    return std::pow(q, static_cast<double>(l - 2)) * ((1 - p) / (p + 1)) * ((1 - p) / 2);
}

// Field derivative of the length-l line correction to the pressure.
inline double gamma_l(const IsingParams& p, std::uint64_t l) {
    validate(p);
    if (l < 2) throw std::invalid_argument("gamma_l: l >= 2 required");
    if (p.B == 0.0) return 0.0;  // the correction is even in B
    const auto sp = spectrum_t(Dual2(p.beta), Dual2::variable(p.B));
    return log1p(sp.a * pow_int(sp.r, l)).d1;
}

// Limit covariance of centered line counts, indices r, t >= 2.
inline double covariance_H(double alpha, std::uint64_t r, std::uint64_t t) {
    if (!std::isfinite(alpha) || alpha < 0.0)
        throw std::invalid_argument("covariance_H: finite alpha >= 0 required");
    if (r < 2 || t < 2) throw std::invalid_argument("covariance_H: indices start at 2");
    if (alpha == 0.0) return 0.0;  // matching is deterministic, counts do not fluctuate
    const double kappa = alpha / (1 + alpha);
    const double rr = static_cast<double>(r) - 2.0;
    const double tt = static_cast<double>(t) - 2.0;
    double v = -std::pow(kappa, rr + tt) / ((1 + alpha) * (1 + alpha)) *
               (1.0 + (rr - alpha) * (tt - alpha) / (alpha * (1 + alpha)));
    if (r == t) v += std::pow(kappa, rr) / (1 + alpha);
    return v;
}

struct CovarianceH {
    double alpha = 0.0;
    std::uint64_t T = 2;
    std::vector<double> entries;  // (T-1) x (T-1), row-major, index (r-2, t-2)

    double at(std::uint64_t r, std::uint64_t t) const {
        if (r < 2 || r > T || t < 2 || t > T)
            throw std::out_of_range("CovarianceH::at: index outside [2, T]");
        return entries[(r - 2) * (T - 1) + (t - 2)];
    }
};

inline CovarianceH covariance_H_matrix(double alpha, std::uint64_t T) {
    if (T < 2) throw std::invalid_argument("covariance_H_matrix: T >= 2 required");
    CovarianceH m;
    m.alpha = alpha;
    m.T = T;
    const std::uint64_t n = T - 1;
    m.entries.assign(n * n, 0.0);
    for (std::uint64_t r = 2; r <= T; ++r)
        for (std::uint64_t t = r; t <= T; ++t) {
            const double v = covariance_H(alpha, r, t);
            m.entries[(r - 2) * n + (t - 2)] = v;
            m.entries[(t - 2) * n + (r - 2)] = v;
        }
    return m;
}

struct Cm12Limits {
    double p = 0.0;
    double alpha = 0.0;  // 2p/(1-p)
    double pressure = 0.0;
    double magnetization = 0.0;
    double chi = 0.0;
    double sigma_G2 = 0.0;
    double sigma_aq2 = 0.0;  // chi + sigma_G2
    std::uint64_t T = 2;
    double tail_bound = 0.0;  // largest truncation-error estimate across the series
};

namespace detail {

// One-pass cursor over the line-correction series: term l carries the
// pressure/magnetization/susceptibility increments, gamma_l, and the update
// of the variance quadratic form. The H kernel is diagonal minus rank two,
// so the quadratic form reduces to three running sums.
struct Cm12Series {
    Dual2 r, a, log_aplus;
    double q, kappa, alpha, c1, pref;
    Dual2 rl;
    double ps, kl;
    double S0 = 0.0, S1 = 0.0, Dd = 0.0, sigma = 0.0;
    std::uint64_t l = 2;
    bool zero_field;

    struct Step {
        std::uint64_t l;
        double press, mag, chi, gamma, sigma_slice;
    };

    Cm12Series(const IsingParams& params, double p) : zero_field(params.B == 0.0) {
        const auto sp = spectrum_t(Dual2(params.beta), Dual2::variable(params.B));
        r = sp.r;
        a = sp.a;
        log_aplus = log(sp.A_plus);
        q = 2 * p / (1 + p);
        kappa = q;  // the count-covariance decay rate coincides with the length law's
        alpha = 2 * p / (1 - p);
        c1 = alpha > 0.0 ? 1.0 / std::sqrt(alpha * (1 + alpha)) : 0.0;
        pref = (1 - p) / 2;
        rl = r * r;
        ps = ((1 - p) / (p + 1)) * ((1 - p) / 2);
        kl = 1.0;
    }

    Step step() {
        const Dual2 w = log1p(a * rl);
        Step s;
        s.l = l;
        s.press = ps * (log_aplus.v + w.v);
        s.mag = ps * (log_aplus.d1 + w.d1);
        s.chi = ps * (log_aplus.d2 + w.d2);
        s.gamma = zero_field ? 0.0 : w.d1;
        s.sigma_slice = 0.0;
        if (alpha > 0.0) {
            S0 += s.gamma * kl;
            S1 += s.gamma * kl * (static_cast<double>(l) - 2.0 - alpha) * c1;
            Dd += s.gamma * s.gamma * kl;
            const double fresh =
                pref * (Dd / (1 + alpha) - (S0 * S0 + S1 * S1) / ((1 + alpha) * (1 + alpha)));
            s.sigma_slice = fresh - sigma;
            sigma = fresh;
        }
        ++l;
        rl = rl * r;
        ps *= q;
        kl *= kappa;
        return s;
    }
};

inline double geometric_remainder(double last, double rho) {
    if (!(rho > 0.0) || last == 0.0) return 0.0;
    rho = std::min(rho, 0.999);
    return last * rho / (1 - rho);
}

} // namespace detail

inline Cm12Limits cm12_limits(const IsingParams& params, double p, std::uint64_t T) {
    validate(params);
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("cm12_limits: p in [0,1] required");
    if (T < 2) throw std::invalid_argument("cm12_limits: T >= 2 required");

    Cm12Limits out;
    out.p = p;
    out.T = T;
    const Dual2 loglam =
        spectrum_t(Dual2(params.beta), Dual2::variable(params.B)).log_lambda_plus;
    const double mag_1d = params.B == 0.0 ? 0.0 : loglam.d1;
    if (p == 1.0) {  // no degree-1 vertices, no line corrections
        out.alpha = std::numeric_limits<double>::infinity();
        out.pressure = loglam.v;
        out.magnetization = mag_1d;
        out.chi = loglam.d2;
        out.sigma_aq2 = out.chi;
        return out;
    }
    out.alpha = 2 * p / (1 - p);

    detail::Cm12Series series(params, p);
    double press = 0.0, mag = 0.0, chi = 0.0, sigma_T = 0.0;
    double tp = 0.0, tm = 0.0, tc = 0.0, ts = 0.0;
    double lp = 0.0, lm = 0.0, lc = 0.0, lsl = 0.0;
    std::uint64_t quiet = 0;
    const std::uint64_t band = 400;
    for (std::uint64_t l = 2; l <= T + band; ++l) {
        const auto s = series.step();
        if (l <= T) {
            press += s.press;
            mag += s.mag;
            chi += s.chi;
            sigma_T = series.sigma;
        } else {
            lp = std::fabs(s.press);
            lm = std::fabs(s.mag);
            lc = std::fabs(s.chi);
            lsl = std::fabs(s.sigma_slice);
            tp += lp;
            tm += lm;
            tc += lc;
            ts += lsl;
            quiet = lp + lm + lc + lsl < 1e-18 ? quiet + 1 : 0;
            if (quiet >= 8) break;
        }
    }
    const double rho = series.q;
    const double rho_sigma = std::fabs(series.r.v) * series.kappa;
    tp += detail::geometric_remainder(lp, rho);
    tm += detail::geometric_remainder(lm, rho);
    tc += detail::geometric_remainder(lc, rho);
    ts += detail::geometric_remainder(lsl, rho_sigma);

    out.pressure = loglam.v + press;
    out.magnetization = params.B == 0.0 ? 0.0 : mag_1d + mag;
    out.chi = loglam.d2 + chi;
    out.sigma_G2 = sigma_T;
    out.sigma_aq2 = out.chi + out.sigma_G2;
    out.tail_bound = std::max(std::max(tp, tm), std::max(tc, ts));
    return out;
}

// Smallest truncation whose tail estimate drops below 1e-10, capped at 4096.
inline std::uint64_t default_truncation(const IsingParams& params, double p) {
    validate(params);
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("default_truncation: p in [0,1] required");
    if (p == 0.0 || p == 1.0) return 2;
    detail::Cm12Series series(params, p);
    const double rho = series.q;
    const double rho_sigma = std::fabs(series.r.v) * series.kappa;
    std::uint64_t streak = 0;
    for (std::uint64_t l = 2; l <= 4096; ++l) {
        const auto s = series.step();
        const double est =
            detail::geometric_remainder(std::fabs(s.press) + std::fabs(s.mag) + std::fabs(s.chi),
                                        rho) +
            detail::geometric_remainder(std::fabs(s.sigma_slice), rho_sigma);
        if (est < 1e-10) {
            if (++streak >= 3) return l;
        } else {
            streak = 0;
        }
    }
    return 4096;
}

inline Cm12Limits cm12_limits(const IsingParams& params, double p) {
    return cm12_limits(params, p, default_truncation(params, p));
}

inline double pressure_cm12(const IsingParams& params, double p, std::uint64_t T) {
    return cm12_limits(params, p, T).pressure;
}

inline double chi_cm12(const IsingParams& params, double p, std::uint64_t T) {
    return cm12_limits(params, p, T).chi;
}

inline double sigma_G2(const IsingParams& params, double p, std::uint64_t T) {
    return cm12_limits(params, p, T).sigma_G2;
}

inline double sigma_aq2(const IsingParams& params, double p, std::uint64_t T) {
    return cm12_limits(params, p, T).sigma_aq2;
}

} // namespace isingcm
