// Configuration-model multigraphs by uniform half-edge pairing, plus the
// line/torus component decomposition and closed-form component-count laws
// for degree sequences supported on {1,2}.
#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"

namespace isingcm {

struct DegreeSequence {
    std::vector<std::uint32_t> degrees;  // indexed by vertex, all >= 1

    std::uint64_t total_degree() const {
        std::uint64_t t = 0;
        for (auto d : degrees) t += d;
        return t;
    }
};

struct MultiGraph {
    std::uint32_t N = 0;
    std::vector<std::uint32_t> degrees;
    // Unordered pairs, normalized u <= v; self-loops (u == u) and parallel
    // edges permitted. |edges| = total_degree / 2.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

    std::uint64_t total_degree() const {
        std::uint64_t t = 0;
        for (auto d : degrees) t += d;
        return t;
    }
};

// Uniform perfect matching on the labeled half-edges, realized as an
// in-place partial Fisher-Yates: the lowest-indexed unpaired half-edge is
// paired with a uniformly random remaining one. O(total_degree).
inline MultiGraph pair_half_edges(const DegreeSequence& deg, Rng& rng) {
    const std::uint64_t ell = deg.total_degree();
    if (ell % 2 != 0)
        throw std::invalid_argument("pair_half_edges: odd total degree, graph not constructible");
    for (auto d : deg.degrees)
        if (d < 1) throw std::invalid_argument("pair_half_edges: degrees must be >= 1");

    std::vector<std::uint32_t> owner(ell);
    std::uint64_t k = 0;
    for (std::uint32_t v = 0; v < deg.degrees.size(); ++v)
        for (std::uint32_t i = 0; i < deg.degrees[v]; ++i) owner[k++] = v;

    MultiGraph g;
    g.N = static_cast<std::uint32_t>(deg.degrees.size());
    g.degrees = deg.degrees;
    g.edges.reserve(ell / 2);
    for (std::uint64_t i = 0; i < ell; i += 2) {
        const std::uint64_t j = i + 1 + rng.below(ell - i - 1);
        std::swap(owner[i + 1], owner[j]);
        const std::uint32_t u = owner[i], v = owner[i + 1];
        g.edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    return g;
}

// CM(2): all N vertices have degree 2.
inline MultiGraph cm2(std::uint32_t N, Rng& rng) {
    if (N < 1) throw std::invalid_argument("cm2: N >= 1 required");
    DegreeSequence d;
    d.degrees.assign(N, 2);
    return pair_half_edges(d, rng);
}

// Degree-1/2 mixture counts: n2 = floor(p N) vertices of degree 2, the rest
// degree 1. When n1 is odd, one degree-1 vertex is promoted to degree 2 so
// the matching exists (perturbs p by O(1/N)).
struct Cm12Counts {
    std::uint64_t n1 = 0;
    std::uint64_t n2 = 0;

    std::uint64_t total_degree() const { return n1 + 2 * n2; }
};

inline Cm12Counts cm12_counts(std::uint32_t N, double p) {
    if (N < 1) throw std::invalid_argument("cm12: N >= 1 required");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("cm12: p in [0,1] required");
    Cm12Counts c;
    c.n2 = static_cast<std::uint64_t>(p * N);
    if (c.n2 > N) c.n2 = N;
    c.n1 = N - c.n2;
    if (c.n1 % 2 != 0) {
        --c.n1;
        ++c.n2;
    }
    return c;
}

// CM(1,2): vertices [0, n2) get degree 2, [n2, N) degree 1.
inline MultiGraph cm12(std::uint32_t N, double p, Rng& rng) {
    const Cm12Counts c = cm12_counts(N, p);
    DegreeSequence d;
    d.degrees.assign(N, 1);
    for (std::uint64_t v = 0; v < c.n2; ++v) d.degrees[v] = 2;
    return pair_half_edges(d, rng);
}

// Per-vertex incidence in CSR form; each slot is (neighbor, edge id), a
// self-loop occupies two slots at its vertex.
struct Adjacency {
    std::vector<std::uint64_t> offsets;                          // size N+1
    std::vector<std::pair<std::uint32_t, std::uint32_t>> slots;  // (neighbor, edge)
};

inline Adjacency build_adjacency(const MultiGraph& g) {
    Adjacency adj;
    adj.offsets.assign(g.N + 1, 0);
    for (const auto& [u, v] : g.edges) {
        ++adj.offsets[u + 1];
        ++adj.offsets[v + 1];
    }
    for (std::uint32_t i = 0; i < g.N; ++i) adj.offsets[i + 1] += adj.offsets[i];
    adj.slots.resize(adj.offsets[g.N]);
    std::vector<std::uint64_t> cursor(adj.offsets.begin(), adj.offsets.end() - 1);
    for (std::uint32_t e = 0; e < g.edges.size(); ++e) {
        const auto [u, v] = g.edges[e];
        adj.slots[cursor[u]++] = {v, e};
        adj.slots[cursor[v]++] = {u, e};
    }
    return adj;
}

// Lines are stored with their vertices in chain order, tori in cycle order,
// so exact per-component samplers can write spins straight through.
struct ComponentDecomposition {
    std::uint32_t N = 0;
    std::vector<std::uint32_t> line_lengths;
    std::vector<std::uint32_t> torus_lengths;
    std::vector<std::uint32_t> line_vertices;   // concatenated, chain order
    std::vector<std::uint32_t> torus_vertices;  // concatenated, cycle order
};

// Classify every component of a degree-{1,2} multigraph as a line (has a
// degree-1 endpoint) or a torus (cycle; self-loop = length 1, double edge =
// length 2). Single traversal, linear in N.
inline ComponentDecomposition decompose(const MultiGraph& g) {
    for (auto d : g.degrees)
        if (d != 1 && d != 2)
            throw std::invalid_argument("decompose: degrees must lie in {1,2}");

    const Adjacency adj = build_adjacency(g);
    ComponentDecomposition out;
    out.N = g.N;
    std::vector<char> visited(g.N, 0);

    const auto other_slot = [&](std::uint32_t v, std::uint32_t arrived_edge) {
        const auto first = adj.slots[adj.offsets[v]];
        if (g.degrees[v] == 1 || first.second != arrived_edge) return first;
        return adj.slots[adj.offsets[v] + 1];
    };

    for (std::uint32_t v0 = 0; v0 < g.N; ++v0) {
        if (visited[v0] || g.degrees[v0] != 1) continue;
        visited[v0] = 1;
        out.line_vertices.push_back(v0);
        std::uint32_t len = 1;
        auto [w, e] = adj.slots[adj.offsets[v0]];
        while (true) {
            visited[w] = 1;
            out.line_vertices.push_back(w);
            ++len;
            if (g.degrees[w] == 1) break;
            const auto next = other_slot(w, e);
            w = next.first;
            e = next.second;
        }
        out.line_lengths.push_back(len);
    }

    for (std::uint32_t v0 = 0; v0 < g.N; ++v0) {
        if (visited[v0]) continue;
        visited[v0] = 1;
        out.torus_vertices.push_back(v0);
        std::uint32_t len = 1;
        auto [w, e] = adj.slots[adj.offsets[v0]];
        while (w != v0) {
            visited[w] = 1;
            out.torus_vertices.push_back(w);
            ++len;
            const auto next = other_slot(w, e);
            w = next.first;
            e = next.second;
        }
        out.torus_lengths.push_back(len);
    }
    return out;
}

// E[number of tori] in CM(2): sum of Bernoulli means 1/(2N - 2j + 1).
inline double expected_tori(std::uint64_t N) {
    if (N < 1) throw std::invalid_argument("expected_tori: N >= 1 required");
    long double s = 0.0L;
    for (std::uint64_t j = 1; j <= N; ++j) s += 1.0L / (2 * N - 2 * j + 1);
    return static_cast<double>(s);
}

// Mean and variance of the CM(2) torus count (independent Bernoulli sum).
inline std::pair<double, double> torus_count_mean_var(std::uint64_t N) {
    if (N < 1) throw std::invalid_argument("torus_count_mean_var: N >= 1 required");
    long double mean = 0.0L, var = 0.0L;
    for (std::uint64_t j = 1; j <= N; ++j) {
        const long double q = 1.0L / (2 * N - 2 * j + 1);
        mean += q;
        var += q * (1.0L - q);
    }
    return {static_cast<double>(mean), static_cast<double>(var)};
}

// Exact law of the length of the line through a fixed degree-1 vertex, for
// n1 degree-1 and n2 degree-2 vertices (total degree ell = n1 + 2 n2):
//   Q(L = l) = [prod_{i=0}^{l-3} (2 n2 - 2i)/(ell - 1 - 2i)] * (n1 - 1)/(ell - 1 - 2(l-2)).
// Infeasible lengths return 0.
inline double line_length_pmf(std::uint64_t n1, std::uint64_t n2, std::uint64_t l) {
    if (l < 2 || n1 < 2 || l > n2 + 2) return 0.0;
    const std::uint64_t ell = n1 + 2 * n2;
    long double prob = 1.0L;
    for (std::uint64_t i = 0; i + 2 < l; ++i)
        prob *= static_cast<long double>(2 * (n2 - i)) / (ell - 1 - 2 * i);
    prob *= static_cast<long double>(n1 - 1) / (ell - 1 - 2 * (l - 2));
    return static_cast<double>(prob);
}

// Law of the second line's length given the first: remove the length-l line
// (two degree-1 vertices, l-2 degree-2 vertices) and re-apply the pmf.
inline double line_length_pmf_conditional(std::uint64_t n1, std::uint64_t n2, std::uint64_t l,
                                          std::uint64_t j) {
    if (line_length_pmf(n1, n2, l) == 0.0) return 0.0;
    const std::uint64_t n1r = n1 - 2;
    const std::uint64_t n2r = n2 - (l - 2);
    return line_length_pmf(n1r, n2r, j);
}

struct DegreeModel {
    std::vector<double> pmf;  // pmf[k] = P(D = k); pmf[0] must be 0
};

struct DegreeModelStats {
    double mean_degree = 0.0;
    double nu = 0.0;                 // E[D(D-1)] / E[D], mean of the size-biased law
    double beta_c = 0.0;             // atanh(1/nu) for nu > 1, else +infinity
    std::vector<double> size_biased; // rho[k] = (k+1) pmf[k+1] / E[D]
};

inline DegreeModelStats degree_model_stats(const DegreeModel& model) {
    double sum = 0.0, mean = 0.0, second = 0.0;
    for (std::size_t k = 0; k < model.pmf.size(); ++k) {
        const double pk = model.pmf[k];
        if (!(pk >= 0.0) || !std::isfinite(pk))
            throw std::invalid_argument("degree_model_stats: pmf entries must be finite and >= 0");
        sum += pk;
        mean += static_cast<double>(k) * pk;
        second += static_cast<double>(k) * (static_cast<double>(k) - 1.0) * pk;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("degree_model_stats: pmf must sum to 1");
    if (!model.pmf.empty() && model.pmf[0] != 0.0)
        throw std::invalid_argument("degree_model_stats: degree 0 not supported");
    if (mean <= 0.0) throw std::invalid_argument("degree_model_stats: mean degree must be positive");

    DegreeModelStats st;
    st.mean_degree = mean;
    st.nu = second / mean;
    st.beta_c = st.nu > 1.0 ? std::atanh(1.0 / st.nu) : std::numeric_limits<double>::infinity();
    if (model.pmf.size() > 1) {
        st.size_biased.resize(model.pmf.size() - 1);
        for (std::size_t k = 0; k + 1 < model.pmf.size(); ++k)
            st.size_biased[k] = (static_cast<double>(k) + 1.0) * model.pmf[k + 1] / mean;
    }
    return st;
}

// Serialization: one-line header "N ell_N seed", then one "u v" line per
// edge in stored order. Integers only, so the round-trip is exact.
inline void save_graph(const MultiGraph& g, std::ostream& os, std::uint64_t seed) {
    os << g.N << ' ' << g.total_degree() << ' ' << seed << '\n';
    for (const auto& [u, v] : g.edges) os << u << ' ' << v << '\n';
}

struct LoadedGraph {
    MultiGraph graph;
    std::uint64_t seed = 0;
};

inline LoadedGraph load_graph(std::istream& is) {
    LoadedGraph out;
    std::uint64_t ell = 0;
    if (!(is >> out.graph.N >> ell >> out.seed))
        throw std::runtime_error("load_graph: malformed header, expected 'N ell_N seed'");
    if (ell % 2 != 0) throw std::runtime_error("load_graph: odd total degree in header");
    out.graph.degrees.assign(out.graph.N, 0);
    out.graph.edges.reserve(ell / 2);
    for (std::uint64_t e = 0; e < ell / 2; ++e) {
        std::uint32_t u, v;
        if (!(is >> u >> v)) throw std::runtime_error("load_graph: truncated edge list");
        if (u >= out.graph.N || v >= out.graph.N)
            throw std::runtime_error("load_graph: vertex id out of range");
        out.graph.edges.emplace_back(std::min(u, v), std::max(u, v));
        out.graph.degrees[u] += 1;
        out.graph.degrees[v] += 1;
    }
    if (out.graph.total_degree() != ell)
        throw std::runtime_error("load_graph: header total degree does not match edges");
    return out;
}

} // namespace isingcm
