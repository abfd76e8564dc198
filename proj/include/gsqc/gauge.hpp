#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gsqc/basis.hpp"
#include "gsqc/circuit.hpp"
#include "gsqc/eigs.hpp"
#include "gsqc/groundstate.hpp"
#include "gsqc/hamiltonian.hpp"

namespace gsqc {

/// Bit-space unitary V(i_1,...,i_M) of the identity-gauging transform:
/// the time-ordered product of gate layers, where a gate at step j enters
/// only when every qubit it acts on has already reached step j. Evaluated
/// lazily per position tuple; positions are never touched.
class GaugeMap {
public:
    GaugeMap() = default;
    GaugeMap(const Circuit& c) : circuit_(&c) {}

    Eigen::MatrixXcd v_at(const std::vector<int>& pos) const {
        const Circuit& c = *circuit_;
        const int nb = 1 << c.m;
        Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(nb, nb);
        for (int step = 1; step <= c.depth; ++step) {
            std::set<int> done;
            for (int q = 1; q <= c.m; ++q) {
                if (done.count(q) || pos[q] < step) continue;
                const Gate* g = c.gate_at(q, step);
                if (!g || g->is_identity()) continue;
                if (g->kind == Gate::Kind::one_qubit) {
                    v = expand_one(g->u, q, c.m) * v;
                } else if (pos[g->a] >= step && pos[g->b] >= step) {
                    v = expand_two(g->u, g->a, g->b, c.m) * v;
                    done.insert(g->a);
                    done.insert(g->b);
                }
            }
        }
        return v;
    }

    /// Applies the full transform (or its adjoint) to a state: positions
    /// fixed, bit content rotated by V(i_1,...,i_M).
    StateVector apply(const StateVector& psi, bool adjoint = false) const {
        const Basis& basis = *psi.basis;
        StateVector out;
        out.basis = psi.basis;
        out.amplitudes = Eigen::VectorXcd::Zero(basis.size());
        const int nb = basis.bit_count();
        std::vector<int> pos(basis.qubits() + 1);
        int bits;
        for (std::int64_t p = 0; p < basis.position_count(); ++p) {
            basis.decode(p * nb, pos, bits);
            Eigen::MatrixXcd v = v_at(pos);
            if (adjoint) v.adjointInPlace();
            Eigen::VectorXcd block(nb);
            for (int b = 0; b < nb; ++b) block[b] = psi.amplitudes[p * nb + b];
            block = v * block;
            for (int b = 0; b < nb; ++b) out.amplitudes[p * nb + b] = block[b];
        }
        return out;
    }

    static Eigen::MatrixXcd expand_one(const Eigen::MatrixXcd& u, int q, int m) {
        const int nb = 1 << m;
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(nb, nb);
        const int bit = 1 << (q - 1);
        for (int col = 0; col < nb; ++col)
            for (int r = 0; r < 2; ++r) {
                int row = (col & ~bit) | (r ? bit : 0);
                out(row, col) += u(r, (col >> (q - 1)) & 1);
            }
        return out;
    }

    static Eigen::MatrixXcd expand_two(const Eigen::MatrixXcd& u, int a, int b, int m) {
        const int nb = 1 << m;
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(nb, nb);
        const int bit_a = 1 << (a - 1), bit_b = 1 << (b - 1);
        for (int col = 0; col < nb; ++col) {
            int cc = 2 * ((col >> (a - 1)) & 1) + ((col >> (b - 1)) & 1);
            for (int r = 0; r < 4; ++r) {
                int row = (col & ~bit_a & ~bit_b) | ((r & 2) ? bit_a : 0) | ((r & 1) ? bit_b : 0);
                out(row, col) += u(r, cc);
            }
        }
        return out;
    }

private:
    const Circuit* circuit_ = nullptr;
};

/// Replaces every gate with the identity; the returned GaugeMap conjugates
/// the original Hamiltonian into the gauged one and preserves the spectrum.
inline std::pair<Circuit, GaugeMap> identity_gauge(const Circuit& c) {
    Circuit gauged = c;
    for (Gate& g : gauged.gates) g.u = identity_u(static_cast<int>(g.u.rows()));
    gauged.rebuild_index();
    return {std::move(gauged), GaugeMap(c)};
}

/// W^+ op W where W swaps the rail contents of qubits a and b whenever both
/// sit at step k or later. Throws if a swapped configuration leaves the
/// basis (possible when the two windows differ beyond step k).
inline SparseOperator swap_conjugate(const SparseOperator& op, int a, int b, int k,
                                     const Basis& basis) {
    if (op.dim() != basis.size()) throw std::invalid_argument("swap_conjugate: dimension mismatch");
    if (a == b) throw std::invalid_argument("swap_conjugate: need two distinct qubits");
    const int nb = basis.bit_count();
    std::vector<int> perm(basis.size());
    std::vector<int> pos(basis.qubits() + 1);
    int bits;
    for (std::int64_t idx = 0; idx < basis.size(); ++idx) {
        basis.decode(idx, pos, bits);
        if (pos[a] >= k && pos[b] >= k) {
            std::swap(pos[a], pos[b]);
            int ba = (bits >> (a - 1)) & 1, bb = (bits >> (b - 1)) & 1;
            int nbits = bits & ~(1 << (a - 1)) & ~(1 << (b - 1));
            if (bb) nbits |= 1 << (a - 1);
            if (ba) nbits |= 1 << (b - 1);
            if (pos[a] < basis.position_low(a) || pos[a] > basis.position_high(a) ||
                pos[b] < basis.position_low(b) || pos[b] > basis.position_high(b))
                throw std::domain_error("swap_conjugate: swapped state leaves the basis");
            perm[idx] = static_cast<int>(basis.index_of(pos, nbits));
        } else {
            perm[idx] = static_cast<int>(idx);
        }
    }
    // (W^+ A W)_{rc} = A_{perm(r), perm(c)}
    std::vector<Triplet> ts;
    const auto& rp = op.row_ptr();
    const auto& cols = op.cols();
    const auto& vals = op.values();
    std::vector<int> inv(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
    for (int r = 0; r < op.dim(); ++r)
        for (int kk = rp[r]; kk < rp[r + 1]; ++kk) ts.push_back({inv[r], inv[cols[kk]], vals[kk]});
    return SparseOperator::from_triplets(op.dim(), std::move(ts));
}

/// Swap stages of the 1-d -> all-to-all conjugation chain. Stages act at
/// k = 6, 8, ..., N-3; stages with k = 2 (mod 4) swap pairs (3,4),(5,6),...
/// and stages with k = 0 (mod 4) swap pairs (2,3),(4,5),...
struct SwapStage {
    int k;
    std::vector<std::pair<int, int>> pairs;
};

inline std::vector<SwapStage> equivalence_stages(int m, int depth) {
    std::vector<SwapStage> out;
    for (int k = 6; k <= depth - 3; k += 2) {
        SwapStage st;
        st.k = k;
        if (k % 4 == 2)
            for (int a = 3; a + 1 <= m - 1; a += 2) st.pairs.push_back({a, a + 1});
        else
            for (int a = 2; a + 1 <= m - 2; a += 2) st.pairs.push_back({a, a + 1});
        out.push_back(st);
    }
    return out;
}

struct EquivalenceReport {
    bool tables_match = true;
    int first_mismatch_stage = -1;
    // after applying stages 0..s, the pairing rows at steps 4..(6+2s) match
    std::vector<std::vector<std::pair<int, int>>> final_table;  // transformed 1-d rows
    std::vector<double> lambda_grid;
    std::vector<double> spectral_deviation;  // per grid point
    double max_spectral_deviation = 0.0;
    bool ok(double tol) const { return tables_match && max_spectral_deviation <= tol; }
};

namespace detail {

inline std::pair<int, int> relabel_pair(std::pair<int, int> p,
                                        const std::vector<std::pair<int, int>>& swaps) {
    for (auto [x, y] : swaps) {
        auto sub = [&](int q) { return q == x ? y : (q == y ? x : q); };
        p = {sub(p.first), sub(p.second)};
    }
    return p;
}

inline std::set<std::pair<int, int>> unordered_set_of(const std::vector<std::pair<int, int>>& v) {
    std::set<std::pair<int, int>> s;
    for (auto [a, b] : v) s.insert({std::min(a, b), std::max(a, b)});
    return s;
}

inline std::vector<double> restricted_spectrum(const Circuit& c, double lambda, int k_eigs) {
    Basis basis(c);
    VertexSet vs = penalty_free_vertices(c);
    std::vector<int> idx;
    idx.reserve(vs.tuples.size());
    for (const auto& t : vs.tuples) idx.push_back(static_cast<int>(basis.index_of(t, 0)));
    std::sort(idx.begin(), idx.end());
    SparseOperator h = assemble(c, lambda, basis).restrict_to(idx);
    EigOptions opt;
    opt.k = std::min<int>(k_eigs, h.dim());
    opt.dense_cutoff = 2048;
    EigResult r = extremal_eigs(h, opt);
    std::vector<double> out;
    for (const auto& p : r.pairs) out.push_back(p.value);
    return out;
}

}  // namespace detail

/// Builds both layouts, pushes the 1-d pairing table through the swap-stage
/// relabelings (innermost stage first, as the conjugation order dictates),
/// compares every row with the round-robin table, and compares the spectra
/// of the two Hamiltonians restricted to their penalty-free subspaces.
inline EquivalenceReport verify_all_to_all_equivalence(int m, int n, double tol,
                                                       std::vector<double> lambda_grid = {0.3, 0.7, 1.0},
                                                       int k_eigs = 12) {
    Circuit c1 = build_1d_circuit(m, n);
    Circuit c2 = build_all_to_all_circuit(m, n);
    auto stages = equivalence_stages(m, c1.depth);

    EquivalenceReport rep;
    const int layers = 2 * n + m - 1;
    for (std::size_t applied = 0; applied < stages.size() + 1; ++applied) {
        bool all_rows = applied == stages.size();
        int reach = all_rows ? c1.depth : 6 + 2 * static_cast<int>(applied);
        std::vector<std::vector<std::pair<int, int>>> table(layers + 1);
        for (int j = 1; j <= layers; ++j) {
            int step = 2 * j + 2;
            auto row = pairs_1d(m, j);
            for (auto it = stages.rbegin(); it != stages.rend(); ++it) {
                std::size_t stage_idx = stages.size() - 1 - (it - stages.rbegin());
                if (stage_idx >= applied) continue;
                if (it->k + 2 <= step)
                    for (auto& p : row) p = detail::relabel_pair(p, it->pairs);
            }
            table[j] = row;
            if (step <= reach) {
                auto want = detail::unordered_set_of(pairs_all_to_all(m, j));
                auto got = detail::unordered_set_of(row);
                if (want != got && rep.tables_match) {
                    rep.tables_match = false;
                    rep.first_mismatch_stage = static_cast<int>(applied);
                }
            }
        }
        if (all_rows) rep.final_table = table;
    }

    rep.lambda_grid = lambda_grid;
    for (double lam : lambda_grid) {
        auto s1 = detail::restricted_spectrum(c1, lam, k_eigs);
        auto s2 = detail::restricted_spectrum(c2, lam, k_eigs);
        double dev = 0.0;
        for (std::size_t i = 0; i < std::min(s1.size(), s2.size()); ++i)
            dev = std::max(dev, std::abs(s1[i] - s2[i]));
        rep.spectral_deviation.push_back(dev);
        rep.max_spectral_deviation = std::max(rep.max_spectral_deviation, dev);
    }
    (void)tol;
    return rep;
}

}  // namespace gsqc
