#pragma once

// Exact per-graph observables. Components are disjoint, so the partition
// function factorizes and spin moments are additive; everything here runs
// off the decomposition with per-length caching, never the raw edge list.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "graphgen.hpp"
#include "ising1d.hpp"
#include "rng.hpp"

namespace isingcm {

struct GraphMoments {
    double mean_S = 0.0;
    double var_S = 0.0;
};

struct QuenchedObservables {
    double log_Z = 0.0;
    double pressure = 0.0;  // log_Z / N
    double mean_S = 0.0;
    double var_S = 0.0;
    double chi_N = 0.0;  // var_S / N
    std::uint32_t N = 0;
};

namespace detail {

template <class Fn>
inline double accumulate_cached(const std::vector<std::uint32_t>& lengths, Fn&& per_length) {
    std::map<std::uint32_t, std::pair<double, std::uint64_t>> cache;  // length -> (value, count)
    for (auto l : lengths) {
        auto [it, fresh] = cache.try_emplace(l, 0.0, 0);
        if (fresh) it->second.first = per_length(l);
        ++it->second.second;
    }
    double total = 0.0;
    for (const auto& [l, vc] : cache) total += vc.first * static_cast<double>(vc.second);
    return total;
}

} // namespace detail

inline double log_partition_graph(const IsingParams& params, const ComponentDecomposition& decomp) {
    validate(params);
    double log_z = detail::accumulate_cached(decomp.torus_lengths, [&](std::uint32_t l) {
        return log_partition_cycle(params, l);
    });
    log_z += detail::accumulate_cached(decomp.line_lengths, [&](std::uint32_t l) {
        return log_partition_line(params, l);
    });
    return log_z;
}

inline GraphMoments spin_moments(const IsingParams& params, const ComponentDecomposition& decomp) {
    validate(params);
    GraphMoments total;
    const auto add = [&](const std::vector<std::uint32_t>& lengths, ComponentKind kind) {
        std::map<std::uint32_t, std::pair<std::pair<double, double>, std::uint64_t>> cache;
        for (auto l : lengths) {
            auto [it, fresh] = cache.try_emplace(l, std::pair{0.0, 0.0}, 0);
            if (fresh) it->second.first = component_moments(params, l, kind);
            ++it->second.second;
        }
        for (const auto& [l, vc] : cache) {
            const auto n = static_cast<double>(vc.second);
            total.mean_S += vc.first.first * n;
            total.var_S += vc.first.second * n;
        }
    };
    add(decomp.torus_lengths, ComponentKind::cycle);
    add(decomp.line_lengths, ComponentKind::line);
    return total;
}

inline QuenchedObservables quenched_observables(const IsingParams& params,
                                               const ComponentDecomposition& decomp) {
    QuenchedObservables q;
    q.N = decomp.N;
    q.log_Z = log_partition_graph(params, decomp);
    q.pressure = q.log_Z / static_cast<double>(decomp.N);
    const GraphMoments m = spin_moments(params, decomp);
    q.mean_S = m.mean_S;
    q.var_S = m.var_S;
    q.chi_N = m.var_S / static_cast<double>(decomp.N);
    return q;
}

// Cumulant generating function of S_N/N: tilting by t shifts the field.
inline double scgf(const IsingParams& params, const ComponentDecomposition& decomp, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("scgf: t must be finite");
    const IsingParams tilted{params.beta, params.B + t};
    const auto n = static_cast<double>(decomp.N);
    return (log_partition_graph(tilted, decomp) - log_partition_graph(params, decomp)) / n;
}

struct SpinSample {
    std::vector<std::int8_t> spins;  // indexed by vertex, values in {-1, +1}
    std::int64_t S = 0;
};

inline SpinSample sample_configuration(const IsingParams& params,
                                       const ComponentDecomposition& decomp, Rng& rng) {
    validate(params);
    SpinSample out;
    out.spins.assign(decomp.N, 0);
    const auto place = [&](const std::vector<std::uint32_t>& lengths,
                           const std::vector<std::uint32_t>& vertices, ComponentKind kind) {
        std::size_t off = 0;
        for (auto l : lengths) {
            const auto sigma = sample_component(params, l, kind, rng);
            for (std::uint32_t i = 0; i < l; ++i) {
                out.spins[vertices[off + i]] = sigma[i];
                out.S += sigma[i];
            }
            off += l;
        }
    };
    place(decomp.torus_lengths, decomp.torus_vertices, ComponentKind::cycle);
    place(decomp.line_lengths, decomp.line_vertices, ComponentKind::line);
    return out;
}

struct LineDensity {
    std::map<std::uint32_t, double> density;  // length -> (#lines of that length)/N
};

inline LineDensity line_empirical_density(const ComponentDecomposition& decomp) {
    LineDensity out;
    const auto n = static_cast<double>(decomp.N);
    for (auto l : decomp.line_lengths) out.density[l] += 1.0 / n;
    return out;
}

} // namespace isingcm
