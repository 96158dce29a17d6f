// Exact one-dimensional Ising solver.
//
// Transfer matrix D(s,s') = exp(beta*s*s' + (B/2)(s+s')) over s in {-1,+1}.
// Eigenvalues lambda_pm = e^beta (cosh B pm sqrt(sinh^2 B + e^{-4 beta})).
// Cycle of length L:  Z = Trace(D^L)        = lambda_plus^L (1 + r^L)
// Line  of length L:  Z = v' D^{L-1} v      = A_plus lambda_plus^L + A_minus lambda_minus^L
// with v = (e^{B/2}, e^{-B/2}), r = lambda_minus/lambda_plus, and A_pm the
// squared projections of v onto the unit eigenvectors, divided by lambda_pm.
//
// Everything is carried in the log domain and templated on the scalar type,
// so Dual2 evaluation yields exact d/dB and d^2/dB^2 (see dual.hpp).
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dual.hpp"
#include "rng.hpp"

namespace isingcm {

struct IsingParams {
    double beta = 0.0;  // inverse temperature, >= 0
    double B = 0.0;     // external field
};

inline void validate(const IsingParams& p) {
    if (!(p.beta >= 0.0) || !std::isfinite(p.beta) || !std::isfinite(p.B))
        throw std::invalid_argument("IsingParams: beta must be finite and >= 0, B finite");
}

enum class ComponentKind { cycle, line };

template <class T>
struct SpectrumT {
    T lambda_plus{};
    T lambda_minus{};
    T r{};                // lambda_minus / lambda_plus, in [0,1)
    T A_plus{};
    T A_minus{};
    T a{};                // A_minus / A_plus
    T log_lambda_plus{};  // beta + log(cosh B + s), safe for large beta
};

using Spectrum = SpectrumT<double>;

// Closed forms rearranged for stability:
//   s = sqrt(sinh^2 B + e^{-4 beta})
//   cosh B - s = -expm1(-4 beta)/(cosh B + s)        [exact 0 at beta = 0]
//   u = s - sinh B, t = s + sinh B, with u t = e^{-4 beta}; the cancelling
//   one of the pair is recovered from the product, branching on sign(B).
// Eigenvectors are proportional to (e^{-2 beta}, u) and (e^{-2 beta}, -t);
// the A_minus numerator collapses to -2 sinh(B) t (cosh B - s) / c, which
// keeps full relative accuracy near beta = 0 and near B = 0.
template <class T>
SpectrumT<T> spectrum_t(const T& beta, const T& B) {
    using std::exp;
    using std::expm1;
    using std::log;
    using std::sinh;
    using std::cosh;
    using std::sqrt;

    const T sh = sinh(B);
    const T ch = cosh(B);
    const T e4 = exp(T(-4.0) * beta);
    const T s = sqrt(sh * sh + e4);
    const T m = -expm1(T(-4.0) * beta) / (ch + s);  // cosh B - s
    const T eb = exp(beta);

    SpectrumT<T> sp;
    sp.lambda_plus = eb * (ch + s);
    sp.lambda_minus = eb * m;
    sp.r = m / (ch + s);
    sp.log_lambda_plus = beta + log(ch + s);

    T u, t;
    if (B >= T(0.0)) {
        t = s + sh;
        u = e4 / t;
    } else {
        u = s - sh;
        t = e4 / u;
    }

    const T e2 = exp(T(-2.0) * beta);
    const T ebh = exp(T(0.5) * B);
    const T embh = exp(T(-0.5) * B);

    const T np = ebh * e2 + embh * u;
    sp.A_plus = np * np / ((e2 * e2 + u * u) * sp.lambda_plus);

    if (sp.lambda_minus > T(0.0)) {
        const T c = ebh * e2 + embh * t;
        const T nm = T(-2.0) * sh * t * m / c;
        sp.A_minus = nm * nm / ((e2 * e2 + t * t) * sp.lambda_minus);
    } else {
        sp.A_minus = T(0.0);  // exact limit: A_minus -> 0 as beta -> 0
    }
    sp.a = sp.A_minus / sp.A_plus;
    return sp;
}

inline Spectrum spectrum(const IsingParams& p) {
    validate(p);
    return spectrum_t<double>(p.beta, p.B);
}

template <class T>
T log_partition_cycle_t(const T& beta, const T& B, std::uint64_t L) {
    using std::log1p;
    const SpectrumT<T> sp = spectrum_t(beta, B);
    return T(static_cast<double>(L)) * sp.log_lambda_plus + log1p(pow_int(sp.r, L));
}

template <class T>
T log_partition_line_t(const T& beta, const T& B, std::uint64_t L) {
    using std::log;
    const SpectrumT<T> sp = spectrum_t(beta, B);
    return T(static_cast<double>(L)) * sp.log_lambda_plus + log(sp.A_plus + sp.A_minus * pow_int(sp.r, L));
}

inline double log_partition_cycle(const IsingParams& p, std::uint64_t L) {
    validate(p);
    if (L < 1) throw std::invalid_argument("log_partition_cycle: L >= 1 required");
    return log_partition_cycle_t<double>(p.beta, p.B, L);
}

inline double log_partition_line(const IsingParams& p, std::uint64_t L) {
    validate(p);
    if (L < 2) throw std::invalid_argument("log_partition_line: L >= 2 required (a line has two endpoints)");
    return log_partition_line_t<double>(p.beta, p.B, L);
}

template <class T>
T log_partition_component_t(const T& beta, const T& B, std::uint64_t L, ComponentKind kind) {
    return kind == ComponentKind::cycle ? log_partition_cycle_t(beta, B, L)
                                        : log_partition_line_t(beta, B, L);
}

// d/dB (order 1) and d^2/dB^2 (order 2) of the component log-partition:
// mean and variance of the component spin sum under its Gibbs measure.
inline double d_logZ_dB(const IsingParams& p, std::uint64_t L, ComponentKind kind, int order) {
    validate(p);
    if (order != 1 && order != 2) throw std::invalid_argument("d_logZ_dB: order must be 1 or 2");
    if (kind == ComponentKind::line && L < 2)
        throw std::invalid_argument("d_logZ_dB: line requires L >= 2");
    if (L < 1) throw std::invalid_argument("d_logZ_dB: L >= 1 required");
    const Dual2 lz = log_partition_component_t(Dual2(p.beta), Dual2::variable(p.B), L, kind);
    // log Z is even in B, so the odd derivative vanishes identically at B = 0.
    const double d1 = p.B == 0.0 ? 0.0 : lz.d1;
    return order == 1 ? d1 : lz.d2;
}

// Mean and variance of the component spin sum in one dual evaluation.
inline std::pair<double, double> component_moments(const IsingParams& p, std::uint64_t L,
                                                   ComponentKind kind) {
    const Dual2 lz = log_partition_component_t(Dual2(p.beta), Dual2::variable(p.B), L, kind);
    return {p.B == 0.0 ? 0.0 : lz.d1, lz.d2};
}

inline double pressure_1d(const IsingParams& p) {
    validate(p);
    return spectrum_t<double>(p.beta, p.B).log_lambda_plus;
}

inline double magnetization_1d(const IsingParams& p) {
    validate(p);
    return spectrum_t(Dual2(p.beta), Dual2::variable(p.B)).log_lambda_plus.d1;
}

inline double susceptibility_1d(const IsingParams& p) {
    validate(p);
    return spectrum_t(Dual2(p.beta), Dual2::variable(p.B)).log_lambda_plus.d2;
}

// Exact Z by enumeration of all 2^L configurations; test oracle only.
inline double brute_force_partition(const IsingParams& p, unsigned L, ComponentKind kind) {
    validate(p);
    if (L > 20) throw std::invalid_argument("brute_force_partition: L <= 20 required");
    if (L < 1 || (kind == ComponentKind::line && L < 2))
        throw std::invalid_argument("brute_force_partition: invalid length for kind");
    long double z = 0.0L;
    const auto count = std::uint64_t{1} << L;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        long double energy = 0.0L;
        int spin_sum = 0;
        const unsigned bonds = (kind == ComponentKind::cycle) ? L : L - 1;
        for (unsigned i = 0; i < L; ++i) spin_sum += (mask >> i & 1u) ? 1 : -1;
        for (unsigned i = 0; i < bonds; ++i) {
            const int si = (mask >> i & 1u) ? 1 : -1;
            const int sj = (mask >> ((i + 1) % L) & 1u) ? 1 : -1;
            energy += static_cast<long double>(p.beta) * si * sj;
        }
        energy += static_cast<long double>(p.B) * spin_sum;
        z += std::exp(energy);
    }
    return static_cast<double>(z);
}

// Exact sampling from the component Gibbs measure: forward message recursion
// with per-step renormalization, then backward sequential sampling. Cycles
// first draw sigma_0 from the diagonal of the L-step message, then sample
// the remaining chain conditioned on both endpoints.
inline std::vector<std::int8_t> sample_component(const IsingParams& p, std::uint64_t L,
                                                 ComponentKind kind, Rng& rng) {
    validate(p);
    if (L < 1 || (kind == ComponentKind::line && L < 2))
        throw std::invalid_argument("sample_component: invalid length for kind");

    const double phi_same = std::exp(p.beta);
    const double phi_diff = std::exp(-p.beta);
    const double psi_up = std::exp(p.B);
    const double psi_dn = std::exp(-p.B);
    const auto phi = [&](int s, int t) { return s == t ? phi_same : phi_diff; };
    const auto psi = [&](int s) { return s > 0 ? psi_up : psi_dn; };

    std::vector<std::int8_t> sigma(L);
    // fwd[i] = unnormalized marginal message at site i, index 0 = spin +1.
    std::vector<std::array<double, 2>> fwd(L);
    const auto draw = [&](double w_up, double w_dn) -> std::int8_t {
        return rng.uniform() * (w_up + w_dn) < w_up ? std::int8_t{1} : std::int8_t{-1};
    };

    if (kind == ComponentKind::line) {
        fwd[0] = {psi_up, psi_dn};
        for (std::uint64_t i = 1; i < L; ++i) {
            const double up = psi_up * (fwd[i - 1][0] * phi_same + fwd[i - 1][1] * phi_diff);
            const double dn = psi_dn * (fwd[i - 1][0] * phi_diff + fwd[i - 1][1] * phi_same);
            const double norm = up + dn;
            fwd[i] = {up / norm, dn / norm};
        }
        sigma[L - 1] = draw(fwd[L - 1][0], fwd[L - 1][1]);
        for (std::uint64_t i = L - 1; i-- > 0;) {
            const int next = sigma[i + 1];
            sigma[i] = draw(fwd[i][0] * phi(1, next), fwd[i][1] * phi(-1, next));
        }
        return sigma;
    }

    // Cycle: diagonal of M^L by repeated normalized 2x2 multiplication, with
    // M(s,s') = psi(s) phi(s,s'). M is similar to the symmetric transfer
    // matrix via diag(psi^(1/2)), so the diagonal of the power is the same.
    double d00 = 1.0, d01 = 0.0, d10 = 0.0, d11 = 1.0;  // M^0
    const double t00 = psi_up * phi_same, t01 = psi_up * phi_diff;
    const double t10 = psi_dn * phi_diff, t11 = psi_dn * phi_same;
    for (std::uint64_t i = 0; i < L; ++i) {
        const double n00 = d00 * t00 + d01 * t10;
        const double n01 = d00 * t01 + d01 * t11;
        const double n10 = d10 * t00 + d11 * t10;
        const double n11 = d10 * t01 + d11 * t11;
        const double norm = n00 + n01 + n10 + n11;
        d00 = n00 / norm;
        d01 = n01 / norm;
        d10 = n10 / norm;
        d11 = n11 / norm;
    }
    sigma[0] = draw(d00, d11);
    if (L == 1) return sigma;

    const int s0 = sigma[0];
    fwd[1] = {psi_up * phi(s0, 1), psi_dn * phi(s0, -1)};
    for (std::uint64_t i = 2; i < L; ++i) {
        const double up = psi_up * (fwd[i - 1][0] * phi_same + fwd[i - 1][1] * phi_diff);
        const double dn = psi_dn * (fwd[i - 1][0] * phi_diff + fwd[i - 1][1] * phi_same);
        const double norm = up + dn;
        fwd[i] = {up / norm, dn / norm};
    }
    sigma[L - 1] = draw(fwd[L - 1][0] * phi(1, s0), fwd[L - 1][1] * phi(-1, s0));
    for (std::uint64_t i = L - 1; i-- > 1;) {
        const int next = sigma[i + 1];
        sigma[i] = draw(fwd[i][0] * phi(1, next), fwd[i][1] * phi(-1, next));
    }
    return sigma;
}

} // namespace isingcm
