#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gsqc/basis.hpp"
#include "gsqc/circuit.hpp"

namespace gsqc {

/// Unit-weight undirected graph over integer coordinate tuples. `coords`
/// holds the working labels used by the path constructions; gate-derived
/// graphs keep the raw step tuples in `kcoords` as well.
struct Graph {
    enum class Family { chain, grid, gate_graph, from_circuit };
    Family family = Family::chain;
    int coord_dim = 1;
    std::vector<int> extents;                // per-axis label range sizes
    std::vector<std::vector<int>> coords;    // per-vertex working labels (size coord_dim)
    std::vector<std::vector<int>> kcoords;   // raw step tuples (gate graphs only)
    std::vector<std::vector<int>> adj;
    std::map<std::vector<int>, int> index;

    int vertices() const { return static_cast<int>(coords.size()); }
    std::size_t edge_count() const {
        std::size_t e = 0;
        for (const auto& a : adj) e += a.size();
        return e / 2;
    }
    bool adjacent(int u, int v) const {
        return std::find(adj[u].begin(), adj[u].end(), v) != adj[u].end();
    }
    int vertex_at(const std::vector<int>& c) const {
        auto it = index.find(c);
        return it == index.end() ? -1 : it->second;
    }

    void add_edge(int u, int v) {
        if (u == v || adjacent(u, v)) return;
        adj[u].push_back(v);
        adj[v].push_back(u);
    }

    void finish() {
        adj.resize(coords.size());
        index.clear();
        for (std::size_t i = 0; i < coords.size(); ++i) index[coords[i]] = static_cast<int>(i);
    }

    Eigen::MatrixXd laplacian() const {
        Eigen::MatrixXd l = Eigen::MatrixXd::Zero(vertices(), vertices());
        for (int u = 0; u < vertices(); ++u)
            for (int v : adj[u]) {
                l(u, u) += 1.0;
                l(u, v) -= 1.0;
            }
        return l;
    }

    /// Second smallest Laplacian eigenvalue (dense oracle).
    double fiedler_value() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(laplacian());
        return es.eigenvalues()(1);
    }
};

inline Graph build_chain(int n1) {
    if (n1 < 2) throw std::invalid_argument("chain needs at least 2 vertices");
    Graph g;
    g.family = Graph::Family::chain;
    g.coord_dim = 1;
    g.extents = {n1};
    for (int i = 0; i < n1; ++i) g.coords.push_back({i});
    g.finish();
    for (int i = 0; i + 1 < n1; ++i) g.add_edge(i, i + 1);
    return g;
}

inline Graph build_grid(const std::vector<int>& extents) {
    if (extents.empty()) throw std::invalid_argument("grid needs at least one axis");
    for (int e : extents)
        if (e < 1) throw std::invalid_argument("grid extents must be positive");
    Graph g;
    g.family = Graph::Family::grid;
    g.coord_dim = static_cast<int>(extents.size());
    g.extents = extents;
    std::vector<int> c(extents.size(), 0);
    while (true) {
        g.coords.push_back(c);
        int ax = 0;
        while (ax < g.coord_dim && ++c[ax] == extents[ax]) c[ax++] = 0;
        if (ax == g.coord_dim) break;
    }
    g.finish();
    for (int u = 0; u < g.vertices(); ++u)
        for (int ax = 0; ax < g.coord_dim; ++ax) {
            std::vector<int> d = g.coords[u];
            ++d[ax];
            int v = g.vertex_at(d);
            if (v >= 0) g.add_edge(u, v);
        }
    return g;
}

namespace detail {

/// Window base of coordinate alpha-1 given k_alpha in the gate graph: the
/// two admissible consecutive values start here.
inline int gate_graph_base(int alpha, int k_alpha, int depth) {
    if (alpha % 2 == 0) {  // even alpha constrains the odd coordinate below
        if (k_alpha == 0) return 1;
        return 2 * ((k_alpha + 1) / 2) - 1;
    }
    if (k_alpha == depth) return depth - 2;
    return 2 * (k_alpha / 2);
}

}  // namespace detail

/// The M-dimensional gate lattice with two-qubit couplings at every interior
/// step: odd coordinates run over {1..N}, even over {0..N-1}, and the pair
/// penalties leave exactly two admissible values of k_{alpha-1} per k_alpha.
/// Working labels: i_alpha in {0,1} for alpha < M and i_M = k_M in {1..N}.
inline Graph build_gate_graph(int m, int depth) {
    if (m < 3 || m % 2 == 0) throw std::invalid_argument("gate graph needs odd M >= 3");
    if (depth < 2 || depth % 2 == 1) throw std::invalid_argument("gate graph needs even N >= 2");
    Graph g;
    g.family = Graph::Family::gate_graph;
    g.coord_dim = m;
    g.extents.assign(m, 2);
    g.extents[m - 1] = depth;

    std::vector<int> k(m + 1, 0), lab(m, 0);
    std::function<void(int)> rec = [&](int alpha) {
        if (alpha == 0) {
            g.coords.push_back(lab);
            g.kcoords.push_back(std::vector<int>(k.begin() + 1, k.end()));
            return;
        }
        if (alpha == m) {
            for (k[m] = 1; k[m] <= depth; ++k[m]) {
                lab[m - 1] = k[m];
                rec(alpha - 1);
            }
            return;
        }
        int base = detail::gate_graph_base(alpha + 1, k[alpha + 1], depth);
        for (int d = 0; d < 2; ++d) {
            k[alpha] = base + d;
            lab[alpha - 1] = d;
            rec(alpha - 1);
        }
    };
    rec(m);
    g.finish();

    // edges are declared on raw tuples; both endpoints must be admissible
    std::map<std::vector<int>, int> kindex;
    for (std::size_t i = 0; i < g.kcoords.size(); ++i) kindex[g.kcoords[i]] = static_cast<int>(i);
    auto try_edge = [&](int u, std::vector<int> kk) {
        auto it = kindex.find(kk);
        if (it != kindex.end()) g.add_edge(u, it->second);
    };
    for (int u = 0; u < g.vertices(); ++u) {
        std::vector<int> kk = g.kcoords[u];
        auto bump = [&](std::initializer_list<int> qs) {
            std::vector<int> t = kk;
            for (int q : qs) ++t[q - 1];
            return t;
        };
        if (kk[m - 1] % 2 == 0) try_edge(u, bump({m}));
        if (kk[0] % 2 == 1) try_edge(u, bump({1}));
        for (int a = 1; a + 1 <= m - 1; a += 2)
            if (kk[a - 1] % 2 == 0 && kk[a] % 2 == 0) try_edge(u, bump({a, a + 1}));
        for (int a = 2; a + 1 <= m; a += 2)
            if (kk[a - 1] % 2 == 1 && kk[a] % 2 == 1) try_edge(u, bump({a, a + 1}));
        for (int alpha = 1; alpha <= m; ++alpha) {
            if (alpha % 2 == 1 && kk[alpha - 1] == depth - 1) try_edge(u, bump({alpha}));
            if (alpha % 2 == 0 && kk[alpha - 1] == 0) try_edge(u, bump({alpha}));
        }
    }
    return g;
}

/// Time-valid configuration graph of a generated one-dimensional circuit
/// with the last qubit pinned past its entry (the Thm.-4 setting): vertices
/// are penalty-free tuples with i_M >= o_M, edges are the gate hops, and
/// coordinates below M are relabeled into their four-value windows.
inline Graph build_from_circuit(const Circuit& c) {
    if (c.layout != Layout::one_dimensional)
        throw std::invalid_argument("from-circuit graph expects the one-dimensional layout");
    Graph g;
    g.family = Graph::Family::from_circuit;
    g.coord_dim = c.m;

    PositionPins pins;
    pins.range.assign(c.m + 1, std::nullopt);
    pins.range[c.m] = {c.o(c.m), c.f(c.m)};
    VertexSet vs = penalty_free_vertices(c, &pins);

    // window base of each coordinate given the one above it
    std::vector<std::map<int, int>> base(c.m + 1);
    for (const auto& t : vs.tuples)
        for (int q = 1; q < c.m; ++q) {
            auto it = base[q].find(t[q + 1]);
            if (it == base[q].end())
                base[q][t[q + 1]] = t[q];
            else
                it->second = std::min(it->second, t[q]);
        }
    g.extents.assign(c.m, 4);
    g.extents[c.m - 1] = c.f(c.m) - c.o(c.m) + 1;
    for (const auto& t : vs.tuples) {
        std::vector<int> lab(c.m);
        for (int q = 1; q < c.m; ++q) lab[q - 1] = t[q] - base[q][t[q + 1]];
        lab[c.m - 1] = t[c.m];
        g.coords.push_back(lab);
        g.kcoords.push_back(std::vector<int>(t.begin() + 1, t.end()));
    }
    g.finish();

    std::map<std::vector<int>, int> kindex;
    for (std::size_t i = 0; i < g.kcoords.size(); ++i) kindex[g.kcoords[i]] = static_cast<int>(i);
    for (int u = 0; u < g.vertices(); ++u) {
        const std::vector<int>& kk = g.kcoords[u];
        for (const Gate& gate : c.gates) {
            if (gate.kind == Gate::Kind::one_qubit) {
                if (kk[gate.a - 1] != gate.time - 1) continue;
                std::vector<int> t = kk;
                ++t[gate.a - 1];
                auto it = kindex.find(t);
                if (it != kindex.end()) g.add_edge(u, it->second);
            } else {
                if (kk[gate.a - 1] != gate.time - 1 || kk[gate.b - 1] != gate.time - 1) continue;
                std::vector<int> t = kk;
                ++t[gate.a - 1];
                ++t[gate.b - 1];
                auto it = kindex.find(t);
                if (it != kindex.end()) g.add_edge(u, it->second);
            }
        }
    }
    return g;
}

/// Dispatch used by the CLI: chain(N1) | grid(N1,..,NM) | gate-graph(M,N) |
/// from-circuit.
struct GraphSpec {
    enum class Kind { chain, grid, gate_graph, from_circuit } kind;
    std::vector<int> params;
    const Circuit* circuit = nullptr;
};

inline Graph build_graph(const GraphSpec& spec) {
    switch (spec.kind) {
        case GraphSpec::Kind::chain: return build_chain(spec.params.at(0));
        case GraphSpec::Kind::grid: return build_grid(spec.params);
        case GraphSpec::Kind::gate_graph: return build_gate_graph(spec.params.at(0), spec.params.at(1));
        case GraphSpec::Kind::from_circuit:
            if (!spec.circuit) throw std::invalid_argument("from-circuit graph needs a circuit");
            return build_from_circuit(*spec.circuit);
    }
    throw std::invalid_argument("unknown graph spec");
}

}  // namespace gsqc
