#pragma once

// Glauber heat-bath dynamics on arbitrary multigraphs: the stochastic
// fallback for degree sequences without an exact solver, and an independent
// cross-check of the exact machinery. Random-scan updates; a self-loop adds
// the constant beta to the energy, so it never enters a local field.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "graphgen.hpp"
#include "ising1d.hpp"
#include "rng.hpp"

namespace isingcm {

struct SpinState {
    std::vector<std::int8_t> spins;
    std::vector<std::int32_t> fields;  // multiplicity-weighted neighbor sums, self-loops excluded
    std::int64_t S = 0;
};

inline SpinState random_state(const MultiGraph& g, const Adjacency& adj, Rng& rng) {
    SpinState st;
    st.spins.resize(g.N);
    for (auto& s : st.spins) s = rng.bernoulli(0.5) ? 1 : -1;
    st.fields.assign(g.N, 0);
    st.S = 0;
    for (std::uint32_t v = 0; v < g.N; ++v) {
        st.S += st.spins[v];
        for (std::uint64_t k = adj.offsets[v]; k < adj.offsets[v + 1]; ++k) {
            const std::uint32_t u = adj.slots[k].first;
            if (u != v) st.fields[v] += st.spins[u];
        }
    }
    return st;
}

inline bool state_consistent(const SpinState& st, const MultiGraph& g, const Adjacency& adj) {
    if (st.spins.size() != g.N || st.fields.size() != g.N) return false;
    std::int64_t total = 0;
    for (std::uint32_t v = 0; v < g.N; ++v) {
        if (st.spins[v] != 1 && st.spins[v] != -1) return false;
        total += st.spins[v];
        std::int32_t m = 0;
        for (std::uint64_t k = adj.offsets[v]; k < adj.offsets[v + 1]; ++k) {
            const std::uint32_t u = adj.slots[k].first;
            if (u != v) m += st.spins[u];
        }
        if (m != st.fields[v]) return false;
    }
    return total == st.S;
}

// P(sigma_i <- +1 | neighbors), x = beta * m_i + B.
inline double heat_bath_up_probability(double x) { return 1.0 / (1.0 + std::exp(-2.0 * x)); }

inline void heat_bath_sweep(SpinState& st, const IsingParams& p, const Adjacency& adj, Rng& rng) {
    const auto n = static_cast<std::uint64_t>(st.spins.size());
    for (std::uint64_t step = 0; step < n; ++step) {
        const auto i = static_cast<std::uint32_t>(rng.below(n));
        const double pup = heat_bath_up_probability(p.beta * st.fields[i] + p.B);
        const std::int8_t nxt = rng.uniform() < pup ? std::int8_t{1} : std::int8_t{-1};
        if (nxt == st.spins[i]) continue;
        st.spins[i] = nxt;
        st.S += 2 * nxt;
        const std::int32_t delta = 2 * nxt;
        for (std::uint64_t k = adj.offsets[i]; k < adj.offsets[i + 1]; ++k) {
            const std::uint32_t u = adj.slots[k].first;
            if (u != i) st.fields[u] += delta;
        }
    }
}

// Total spin recorded once per sweep after burn-in.
inline std::vector<std::int64_t> glauber_trace(const MultiGraph& g, const IsingParams& p,
                                               std::uint64_t sweeps, std::uint64_t burn_in,
                                               Rng& rng) {
    validate(p);
    if (sweeps <= burn_in) throw std::invalid_argument("glauber_trace: sweeps > burn_in required");
    const Adjacency adj = build_adjacency(g);
    SpinState st = random_state(g, adj, rng);
    std::vector<std::int64_t> trace;
    trace.reserve(sweeps - burn_in);
    for (std::uint64_t t = 0; t < sweeps; ++t) {
        heat_bath_sweep(st, p, adj, rng);
        if (t >= burn_in) trace.push_back(st.S);
    }
    return trace;
}

struct McmcMoments {
    double mean_S = 0.0;
    double var_S = 0.0;
    double se_mean = 0.0;
    double se_var = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t batches = 0;
};

// Batch-means estimates with autocorrelation-aware standard errors. The
// variance SE comes from batching y_t = S_t^2 - 2*mean*S_t, whose average
// plus mean^2 is the sample variance (delta method; the neglected term is
// second order in the mean's error).
inline McmcMoments estimate_moments(const MultiGraph& g, const IsingParams& p,
                                    std::uint64_t sweeps, std::uint64_t burn_in, Rng& rng) {
    constexpr std::uint64_t kBatches = 20;
    if (sweeps <= burn_in || sweeps - burn_in < 10 * kBatches)
        throw std::invalid_argument("estimate_moments: need at least 200 post-burn-in sweeps");
    const auto trace = glauber_trace(g, p, sweeps, burn_in, rng);

    McmcMoments out;
    out.batches = kBatches;
    const std::uint64_t b = trace.size() / kBatches;
    out.samples = b * kBatches;

    double mean = 0.0;
    for (std::uint64_t t = 0; t < out.samples; ++t) mean += static_cast<double>(trace[t]);
    mean /= static_cast<double>(out.samples);

    double var_mb = 0.0, mean_y = 0.0, var_yb = 0.0;
    std::vector<double> ybatch(kBatches, 0.0);
    for (std::uint64_t k = 0; k < kBatches; ++k) {
        double bm = 0.0, by = 0.0;
        for (std::uint64_t t = k * b; t < (k + 1) * b; ++t) {
            const auto s = static_cast<double>(trace[t]);
            bm += s;
            by += s * s - 2.0 * mean * s;
        }
        bm /= static_cast<double>(b);
        by /= static_cast<double>(b);
        var_mb += (bm - mean) * (bm - mean);
        ybatch[k] = by;
        mean_y += by;
    }
    mean_y /= static_cast<double>(kBatches);
    for (std::uint64_t k = 0; k < kBatches; ++k)
        var_yb += (ybatch[k] - mean_y) * (ybatch[k] - mean_y);

    out.mean_S = mean;
    out.var_S = mean_y + mean * mean;
    out.se_mean = std::sqrt(var_mb / (kBatches * (kBatches - 1)));
    out.se_var = std::sqrt(var_yb / (kBatches * (kBatches - 1)));
    return out;
}

} // namespace isingcm
