#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gsqc/sparse.hpp"

namespace gsqc {

inline Eigen::MatrixXcd identity_u(int n) { return Eigen::MatrixXcd::Identity(n, n); }

inline bool is_unitary(const Eigen::MatrixXcd& u, double tol = 1e-12) {
    if (u.rows() != u.cols()) return false;
    return (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

/// One gate slot of the circuit. Qubit indices are 1-based, kept in the role
/// order of the layout tables (the first index decides window extensions in
/// the all-to-all layout), so two-qubit gates may carry a > b.
struct Gate {
    enum class Kind { one_qubit, two_qubit };
    Kind kind = Kind::one_qubit;
    int a = 0;
    int b = 0;  // 0 for one-qubit gates
    int time = 0;
    Eigen::MatrixXcd u;

    bool is_identity(double tol = 1e-12) const {
        return (u - identity_u(static_cast<int>(u.rows()))).cwiseAbs().maxCoeff() <= tol;
    }
    bool acts_on(int q) const { return q == a || q == b; }
    int partner(int q) const { return q == a ? b : a; }
};

enum class Layout { one_dimensional, all_to_all, custom };

inline std::string layout_name(Layout l) {
    switch (l) {
        case Layout::one_dimensional: return "1d";
        case Layout::all_to_all: return "all-to-all";
        default: return "custom";
    }
}

/// Sparse user-supplied gate content for the generators: (step, qubits) -> unitary.
/// Qubit vector has one entry for a one-qubit slot, two for a two-qubit slot.
using CoreGates = std::map<std::pair<int, std::vector<int>>, Eigen::MatrixXcd>;

struct Violation {
    int qubit;
    int step;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

class Circuit {
public:
    int m = 0;        // qubit count M
    int n_core = 0;   // underlying algorithm depth n (generators only, else 0)
    int depth = 0;    // total depth N
    Layout layout = Layout::custom;
    std::vector<int> first_step;  // o_A, index 1..m
    std::vector<int> last_step;   // f_A, index 1..m
    std::vector<Gate> gates;

    int o(int q) const { return first_step[q]; }
    int f(int q) const { return last_step[q]; }

    /// Index of the gate acting on qubit q at step i, or -1.
    int gate_index(int q, int i) const {
        if (q < 1 || q > m || i < 1 || i > depth) return -1;
        return slot_[q][i];
    }
    const Gate* gate_at(int q, int i) const {
        int k = gate_index(q, i);
        return k < 0 ? nullptr : &gates[k];
    }

    void rebuild_index() {
        slot_.assign(m + 1, std::vector<int>(depth + 1, -1));
        for (std::size_t k = 0; k < gates.size(); ++k) {
            const Gate& g = gates[k];
            if (g.time >= 1 && g.time <= depth) {
                if (g.a >= 1 && g.a <= m) slot_[g.a][g.time] = static_cast<int>(k);
                if (g.kind == Gate::Kind::two_qubit && g.b >= 1 && g.b <= m)
                    slot_[g.b][g.time] = static_cast<int>(k);
            }
        }
    }

    /// Ordered (a, b) pairs of the two-qubit layer at the given step.
    std::vector<std::pair<int, int>> pair_layer(int step) const {
        std::vector<std::pair<int, int>> out;
        std::set<int> seen;
        for (const Gate& g : gates)
            if (g.kind == Gate::Kind::two_qubit && g.time == step && !seen.count(g.a)) {
                out.push_back({g.a, g.b});
                seen.insert(g.a);
                seen.insert(g.b);
            }
        return out;
    }

    std::vector<int> two_qubit_steps() const {
        std::set<int> s;
        for (const Gate& g : gates)
            if (g.kind == Gate::Kind::two_qubit) s.insert(g.time);
        return {s.begin(), s.end()};
    }

private:
    std::vector<std::vector<int>> slot_;
};

/// Two-qubit pairing of the one-dimensional layout at layer j (step 2j+2).
/// Odd j: (M,M-1),(M-2,M-3),...,(3,2), qubit 1 idles.
/// Even j: (1,2),(3,4),...,(M-2,M-1), qubit M idles.
inline std::vector<std::pair<int, int>> pairs_1d(int m, int j) {
    std::vector<std::pair<int, int>> out;
    if (j % 2 == 1) {
        for (int a = m; a >= 3; a -= 2) out.push_back({a, a - 1});
    } else {
        for (int a = 1; a <= m - 2; a += 2) out.push_back({a, a + 1});
    }
    return out;
}

/// Round-robin pairing of the all-to-all layout at layer j (step 2j+2):
/// two fixed-pivot families whose non-pivot entries shift clockwise around a
/// 2 x (M-1)/2 grid each time the family recurs.
inline std::vector<std::pair<int, int>> pairs_all_to_all(int m, int j) {
    const int cols = (m - 1) / 2;
    std::vector<int> arow(cols), brow(cols);
    if (j % 2 == 1) {
        // family rooted at step 4: A: M, M-3, M-5, ..., 4, 2; B: M-1, M-2, M-4, ..., 5, 3
        arow[0] = m;
        brow[0] = m - 1;
        for (int c = 1; c < cols; ++c) {
            arow[c] = m - 1 - 2 * c;
            brow[c] = m - 2 * c;
        }
    } else {
        // family rooted at step 6: A: 1, 3, ..., M-2; B: 2, 4, ..., M-1
        for (int c = 0; c < cols; ++c) {
            arow[c] = 2 * c + 1;
            brow[c] = 2 * c + 2;
        }
    }
    int shifts = (j % 2 == 1) ? (j - 1) / 2 : (j - 2) / 2;
    const int cycle_len = m - 2;
    shifts %= cycle_len;
    for (int s = 0; s < shifts; ++s) {
        // positions clockwise, top-left pinned: A1..A_{c-1}, B_{c-1}..B_0
        std::vector<int> cyc;
        for (int c = 1; c < cols; ++c) cyc.push_back(arow[c]);
        for (int c = cols - 1; c >= 0; --c) cyc.push_back(brow[c]);
        std::rotate(cyc.rbegin(), cyc.rbegin() + 1, cyc.rend());
        int k = 0;
        for (int c = 1; c < cols; ++c) arow[c] = cyc[k++];
        for (int c = cols - 1; c >= 0; --c) brow[c] = cyc[k++];
    }
    std::vector<std::pair<int, int>> out;
    for (int c = 0; c < cols; ++c) out.push_back({arow[c], brow[c]});
    return out;
}

inline ValidationReport validate_circuit(const Circuit& c);

namespace detail {

inline void check_generator_args(int m, int n) {
    if (m < 3 || m % 2 == 0) throw std::invalid_argument("generator: M must be odd and >= 3");
    if (n < m - 1 || n % 2 == 1) throw std::invalid_argument("generator: n must be even and >= M-1");
}

inline Eigen::MatrixXcd take_core_gate(const CoreGates& core, int step, std::vector<int> qubits,
                                       int dim, int last_real_step) {
    auto it = core.find({step, qubits});
    if (it == core.end()) return identity_u(dim);
    if (step < 3 || step > last_real_step)
        throw std::invalid_argument("core gate outside the programmable region at step " +
                                    std::to_string(step));
    if (it->second.rows() != dim || it->second.cols() != dim)
        throw std::invalid_argument("core gate has wrong dimension");
    if (!is_unitary(it->second)) throw std::invalid_argument("core gate is not unitary");
    return it->second;
}

inline Circuit build_layered(int m, int n, const CoreGates& core, Layout layout) {
    check_generator_args(m, n);
    Circuit c;
    c.m = m;
    c.n_core = n;
    c.depth = 2 * (2 * n + m) + 3;
    c.layout = layout;
    const int last_core = 2 * (2 * n + m);     // last two-qubit-layer step
    const int last_real = 2 * n + 2;           // doubled image of the underlying algorithm
    c.first_step.assign(m + 1, 0);
    c.last_step.assign(m + 1, 0);

    std::vector<std::pair<int, int>> last_pairs;  // pairing at step N-3
    for (int q = 1; q <= m; ++q) c.first_step[q] = (q % 2 == 0) ? 1 : 3;
    if (layout == Layout::one_dimensional) {
        for (int q = 1; q <= m; ++q)
            c.last_step[q] = (q % 2 == 1 && q < m) ? c.depth : c.depth - 2;
    } else {
        last_pairs = pairs_all_to_all(m, 2 * n + m - 1);
        std::set<int> extended;
        for (auto [a, b] : last_pairs) extended.insert(a);
        for (int q = 1; q <= m; ++q)
            c.last_step[q] = extended.count(q) ? c.depth : c.depth - 2;
    }

    // leading identities for even qubits
    for (int q = 2; q <= m; q += 2)
        for (int i = 1; i <= 2; ++i) c.gates.push_back({Gate::Kind::one_qubit, q, 0, i, identity_u(2)});

    for (int j = 1; j <= 2 * n + m - 1; ++j) {
        const int s1 = 2 * j + 1;  // one-qubit layer
        const int s2 = 2 * j + 2;  // two-qubit layer
        for (int q = 1; q <= m; ++q)
            c.gates.push_back({Gate::Kind::one_qubit, q, 0, s1,
                               take_core_gate(core, s1, {q}, 2, last_real)});
        auto pairs = (layout == Layout::one_dimensional) ? pairs_1d(m, j) : pairs_all_to_all(m, j);
        std::set<int> busy;
        for (auto [a, b] : pairs) {
            c.gates.push_back({Gate::Kind::two_qubit, a, b, s2,
                               take_core_gate(core, s2, {a, b}, 4, last_real)});
            busy.insert(a);
            busy.insert(b);
        }
        for (int q = 1; q <= m; ++q)
            if (!busy.count(q))
                c.gates.push_back({Gate::Kind::one_qubit, q, 0, s2, identity_u(2)});
    }

    // closing identity layer and the per-qubit two-step extensions
    for (int q = 1; q <= m; ++q)
        c.gates.push_back({Gate::Kind::one_qubit, q, 0, last_core + 1, identity_u(2)});
    for (int q = 1; q <= m; ++q)
        for (int i = last_core + 2; i <= c.last_step[q]; ++i)
            c.gates.push_back({Gate::Kind::one_qubit, q, 0, i, identity_u(2)});

    c.rebuild_index();

    // reject core gates that name a slot the layout does not provide
    for (const auto& [key, u] : core) {
        (void)u;
        const auto& [step, qs] = key;
        const Gate* g = c.gate_at(qs[0], step);
        bool ok = g && g->time == step;
        if (ok && qs.size() == 1) ok = g->kind == Gate::Kind::one_qubit;
        if (ok && qs.size() == 2) ok = g->kind == Gate::Kind::two_qubit && g->a == qs[0] && g->b == qs[1];
        if (!ok) throw std::invalid_argument("core gate does not match the layer pattern at step " +
                                             std::to_string(step));
    }
    ValidationReport rep = validate_circuit(c);
    if (!rep.ok())
        throw std::invalid_argument("core gates violate circuit invariants: " +
                                    rep.violations.front().message);
    return c;
}

}  // namespace detail

inline Circuit build_1d_circuit(int m, int n, const CoreGates& core = {}) {
    return detail::build_layered(m, n, core, Layout::one_dimensional);
}

inline Circuit build_all_to_all_circuit(int m, int n, const CoreGates& core = {}) {
    return detail::build_layered(m, n, core, Layout::all_to_all);
}

/// Checks every structural invariant; total function, returns all violations.
inline ValidationReport validate_circuit(const Circuit& c) {
    ValidationReport rep;
    auto bad = [&](int q, int i, std::string msg) { rep.violations.push_back({q, i, std::move(msg)}); };

    if (c.m < 1) bad(0, 0, "qubit count must be positive");
    for (int q = 1; q <= c.m; ++q) {
        if (c.o(q) < 1) bad(q, c.o(q), "original step o must be >= 1");
        if (c.f(q) > c.depth) bad(q, c.f(q), "final step f must be <= N");
        if (c.o(q) > c.f(q)) bad(q, c.o(q), "empty window");
    }
    for (const Gate& g : c.gates) {
        if (g.kind == Gate::Kind::two_qubit && (g.a == g.b || g.b < 1 || g.b > c.m))
            bad(g.a, g.time, "two-qubit gate must carry two distinct qubit indices");
        if (!is_unitary(g.u)) bad(g.a, g.time, "gate matrix is not unitary");
        int d = g.kind == Gate::Kind::one_qubit ? 2 : 4;
        if (g.u.rows() != d) bad(g.a, g.time, "gate matrix has wrong dimension");
    }
    // exactly one gate at each step of each window, none outside
    for (int q = 1; q <= c.m; ++q) {
        for (int i = 1; i <= c.depth; ++i) {
            int count = 0;
            for (const Gate& g : c.gates)
                if (g.time == i && g.acts_on(q)) ++count;
            bool inside = i >= c.o(q) && i <= c.f(q);
            if (inside && count != 1) bad(q, i, "window step must hold exactly one gate");
            if (!inside && count != 0) bad(q, i, "gate outside window");
        }
        const Gate* first = c.gate_at(q, c.o(q));
        if (first && !(first->kind == Gate::Kind::one_qubit && first->is_identity()))
            bad(q, c.o(q), "first gate must be a one-qubit identity");
    }
    if (c.layout == Layout::one_dimensional || c.layout == Layout::all_to_all) {
        if (c.m % 2 == 0) bad(0, 0, "layout requires odd M");
        if (c.n_core % 2 == 1 || c.n_core < c.m - 1) bad(0, 0, "layout requires even n >= M-1");
        if (c.depth != 2 * (2 * c.n_core + c.m) + 3) bad(0, 0, "depth must equal 2(2n+M)+3");
        for (const Gate& g : c.gates)
            if (g.kind == Gate::Kind::two_qubit && g.time % 2 == 1)
                bad(g.a, g.time, "no two-qubit gate may act at an odd step");
        for (int j = 1; j <= 2 * c.n_core + c.m - 1; ++j) {
            auto want = (c.layout == Layout::one_dimensional) ? pairs_1d(c.m, j)
                                                              : pairs_all_to_all(c.m, j);
            auto got = c.pair_layer(2 * j + 2);
            std::set<std::pair<int, int>> w(want.begin(), want.end()), g2(got.begin(), got.end());
            if (w != g2) bad(0, 2 * j + 2, "two-qubit layer does not match the layout pattern");
        }
    }
    return rep;
}

}  // namespace gsqc
