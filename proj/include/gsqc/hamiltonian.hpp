#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "gsqc/basis.hpp"
#include "gsqc/circuit.hpp"
#include "gsqc/sparse.hpp"

namespace gsqc {

struct EnergyScale {
    double value = 1.0;
    EnergyScale() = default;
    explicit EnergyScale(double e) : value(e) {
        if (e <= 0) throw std::invalid_argument("energy scale must be positive");
    }
};

/// Quintic smoothstep ramp: 0 for x <= 0, 10x^3 - 15x^4 + 6x^5 on [0,1],
/// 1 for x >= 1. C^2 everywhere, max |F'| = 15/8.
inline double smoothstep(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return ((6.0 * x - 15.0) * x + 10.0) * x * x * x;
}

inline double smoothstep_deriv(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    double y = x * (1.0 - x);
    return 30.0 * y * y;
}

/// Per-qubit activation schedule: qubit A ramps while lambda runs through
/// [(A-1)/M, A/M], so the qubits turn on one after another. The shifted
/// convention lambda_A = F(M lambda - (A-1)) is the default; the literal
/// F(M lambda - A) variant (which leaves lambda_M = 0 at lambda = 1) stays
/// available behind a flag.
struct Schedule {
    int m = 1;
    bool literal_shift = false;

    std::vector<double> eval(double lambda) const {
        if (lambda < 0.0 || lambda > 1.0) throw std::domain_error("lambda outside [0,1]");
        std::vector<double> out(m + 1, 0.0);
        for (int a = 1; a <= m; ++a) {
            double shift = literal_shift ? a : a - 1;
            out[a] = smoothstep(m * lambda - shift);
        }
        return out;
    }
};

inline std::vector<double> schedule_eval(double lambda, int m) {
    return Schedule{m}.eval(lambda);
}

enum class TermKind { one_qubit, two_qubit, init, penalty };

/// Parameters for one Hamiltonian term. For hop terms the matrix must be
/// unitary or a scalar multiple of the identity (the lambda-scaled entry hop).
struct TermSpec {
    TermKind kind;
    int a = 0;
    int b = 0;
    int step = 0;
    Eigen::MatrixXcd matrix;
};

namespace detail {

inline bool acceptable_hop_matrix(const Eigen::MatrixXcd& w) {
    if (is_unitary(w)) return true;
    int n = static_cast<int>(w.rows());
    if (w.cols() != n) return false;
    cd s = w(0, 0);
    return (w - s * Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-12;
}

/// Emits E * [C^+_i - C^+_{i-1} W^+][C_i - W C_{i-1}] for one qubit rail:
/// identity block on position i, W^+W block on i-1, -W hop between them.
inline void emit_one_qubit_hop(const Basis& basis, int a, int i, const Eigen::MatrixXcd& w,
                               double e, std::vector<Triplet>& out) {
    const Eigen::MatrixXcd wdw = w.adjoint() * w;
    const std::int64_t dpos = basis.position_stride(a) * basis.bit_count();
    const int bit = 1 << (a - 1);
    for (std::int64_t idx = 0; idx < basis.size(); ++idx) {
        int pos_a = basis.position_of(idx, a);
        if (pos_a == i) {
            out.push_back({(int)idx, (int)idx, e});
        } else if (pos_a == i - 1) {
            int beta = basis.bit_of(idx, a);
            for (int bp = 0; bp < 2; ++bp) {
                std::int64_t idx2 = (idx & ~std::int64_t(bit)) | (bp ? bit : 0);
                if (std::abs(wdw(bp, beta)) > 0.0) out.push_back({(int)idx2, (int)idx, e * wdw(bp, beta)});
            }
            for (int bq = 0; bq < 2; ++bq) {
                std::int64_t tgt = ((idx & ~std::int64_t(bit)) | (bq ? bit : 0)) + dpos;
                cd v = -e * w(bq, beta);
                if (std::abs(v) > 0.0) {
                    out.push_back({(int)tgt, (int)idx, v});
                    out.push_back({(int)idx, (int)tgt, std::conj(v)});
                }
            }
        }
    }
}

/// Two-qubit analogue on the ordered pair (a, b); the 4x4 matrix acts on
/// bit index 2*b_a + b_b.
inline void emit_two_qubit_hop(const Basis& basis, int a, int b, int i, const Eigen::MatrixXcd& w,
                               double e, std::vector<Triplet>& out) {
    const Eigen::MatrixXcd wdw = w.adjoint() * w;
    const std::int64_t dpos = (basis.position_stride(a) + basis.position_stride(b)) * basis.bit_count();
    const int bit_a = 1 << (a - 1), bit_b = 1 << (b - 1);
    auto with_bits = [&](std::int64_t idx, int pair_bits) {
        std::int64_t x = idx & ~std::int64_t(bit_a) & ~std::int64_t(bit_b);
        if (pair_bits & 2) x |= bit_a;
        if (pair_bits & 1) x |= bit_b;
        return x;
    };
    for (std::int64_t idx = 0; idx < basis.size(); ++idx) {
        int pa = basis.position_of(idx, a), pb = basis.position_of(idx, b);
        if (pa == i && pb == i) {
            out.push_back({(int)idx, (int)idx, e});
        } else if (pa == i - 1 && pb == i - 1) {
            int beta = 2 * basis.bit_of(idx, a) + basis.bit_of(idx, b);
            for (int bp = 0; bp < 4; ++bp) {
                if (std::abs(wdw(bp, beta)) > 0.0)
                    out.push_back({(int)with_bits(idx, bp), (int)idx, e * wdw(bp, beta)});
            }
            for (int bq = 0; bq < 4; ++bq) {
                cd v = -e * w(bq, beta);
                if (std::abs(v) > 0.0) {
                    std::int64_t tgt = with_bits(idx, bq) + dpos;
                    out.push_back({(int)tgt, (int)idx, v});
                    out.push_back({(int)idx, (int)tgt, std::conj(v)});
                }
            }
        }
    }
}

inline void emit_init(const Basis& basis, int a, int i, double e, std::vector<Triplet>& out) {
    for (std::int64_t idx = 0; idx < basis.size(); ++idx)
        if (basis.position_of(idx, a) == i && basis.bit_of(idx, a) == 1)
            out.push_back({(int)idx, (int)idx, e});
}

inline void emit_penalty(const Basis& basis, int a, int b, int j, double e, std::vector<Triplet>& out) {
    for (std::int64_t idx = 0; idx < basis.size(); ++idx) {
        bool a_late = basis.position_of(idx, a) >= j;
        bool b_late = basis.position_of(idx, b) >= j;
        if (a_late != b_late) out.push_back({(int)idx, (int)idx, e});
    }
}

inline void emit_occupation(const Basis& basis, int a, int from, int to, double e,
                            std::vector<Triplet>& out) {
    for (std::int64_t idx = 0; idx < basis.size(); ++idx) {
        int p = basis.position_of(idx, a);
        if (p >= from && p <= to) out.push_back({(int)idx, (int)idx, e});
    }
}

}  // namespace detail

inline SparseOperator build_term(const TermSpec& t, const Basis& basis, const Circuit& c,
                                 EnergyScale scale = {}) {
    std::vector<Triplet> ts;
    double e = scale.value;
    switch (t.kind) {
        case TermKind::one_qubit:
            if (t.step < c.o(t.a) || t.step > c.f(t.a))
                throw std::invalid_argument("build_term: step outside qubit window");
            if (!detail::acceptable_hop_matrix(t.matrix))
                throw std::invalid_argument("build_term: matrix is not unitary");
            detail::emit_one_qubit_hop(basis, t.a, t.step, t.matrix, e, ts);
            break;
        case TermKind::two_qubit:
            if (t.step < c.o(t.a) || t.step > c.f(t.a) || t.step < c.o(t.b) || t.step > c.f(t.b))
                throw std::invalid_argument("build_term: step outside qubit window");
            if (!detail::acceptable_hop_matrix(t.matrix))
                throw std::invalid_argument("build_term: matrix is not unitary");
            detail::emit_two_qubit_hop(basis, t.a, t.b, t.step, t.matrix, e, ts);
            break;
        case TermKind::init:
            detail::emit_init(basis, t.a, t.step, e, ts);
            break;
        case TermKind::penalty:
            detail::emit_penalty(basis, t.a, t.b, t.step, e, ts);
            break;
    }
    return SparseOperator::from_triplets(static_cast<int>(basis.size()), std::move(ts));
}

/// Assembles H(lambda) over a fixed basis. The lambda-independent triplet
/// skeletons are built once and grouped by coefficient, so a lambda scan
/// costs O(nnz) per point:
///   group 0               weight 1                 gates, penalties, inits,
///                                                  entry diagonal at o_A
///   per qubit: entry_lo   weight lambda_A^2        diagonal at o_A - 1
///   per qubit: entry_hop  weight lambda_A          hop (o_A-1) <-> o_A
///   per qubit A >= 2      weight 1 - lambda_{A-1}^3  occupation of [o_A, f_A]
class HamiltonianAssembler {
public:
    HamiltonianAssembler(const Circuit& c, const Basis& basis, EnergyScale scale = {},
                         Schedule schedule = {})
        : circuit_(&c), basis_(&basis), scale_(scale), schedule_(schedule) {
        schedule_.m = c.m;
        const double e = scale.value;
        std::vector<std::vector<Triplet>> groups;
        auto group = [&]() -> std::vector<Triplet>& {
            groups.emplace_back();
            return groups.back();
        };

        auto& fixed = group();
        for (const Gate& g : c.gates) {
            if (g.kind == Gate::Kind::one_qubit) {
                if (g.time != c.o(g.a))
                    detail::emit_one_qubit_hop(basis, g.a, g.time, g.u, e, fixed);
            } else {
                detail::emit_two_qubit_hop(basis, g.a, g.b, g.time, g.u, e, fixed);
                detail::emit_penalty(basis, g.a, g.b, g.time, e, fixed);
            }
        }
        for (int q = 1; q <= c.m; ++q) {
            detail::emit_init(basis, q, c.o(q) - 1, e, fixed);
            detail::emit_occupation(basis, q, c.o(q), c.o(q), e, fixed);  // entry C^+_i C_i part
        }
        weights_.push_back([](const std::vector<double>&) { return 1.0; });

        for (int q = 1; q <= c.m; ++q) {
            auto& lo = group();
            detail::emit_occupation(basis, q, c.o(q) - 1, c.o(q) - 1, e, lo);
            weights_.push_back([q](const std::vector<double>& lam) { return lam[q] * lam[q]; });

            auto& hop = group();
            const std::int64_t dpos = basis.position_stride(q) * basis.bit_count();
            for (std::int64_t idx = 0; idx < basis.size(); ++idx)
                if (basis.position_of(idx, q) == c.o(q) - 1) {
                    out_push(hop, idx + dpos, idx, -e);
                    out_push(hop, idx, idx + dpos, -e);
                }
            weights_.push_back([q](const std::vector<double>& lam) { return lam[q]; });
        }
        for (int q = 2; q <= c.m; ++q) {
            auto& qsc = group();
            detail::emit_occupation(basis, q, c.o(q), c.f(q), e, qsc);
            weights_.push_back([q](const std::vector<double>& lam) {
                double l = lam[q - 1];
                return 1.0 - l * l * l;
            });
        }
        merge(groups);
    }

    /// H(lambda) under the single-parameter schedule.
    SparseOperator at(double lambda) const { return at_independent(schedule_.eval(lambda)); }

    /// H^independent at explicit per-qubit values (index 1..m).
    SparseOperator at_independent(const std::vector<double>& lam) const {
        std::vector<cd> vals(cols_.size(), 0.0);
        std::vector<double> w(weights_.size());
        for (std::size_t g = 0; g < weights_.size(); ++g) w[g] = weights_[g](lam);
        for (const auto& [slot, g, v] : contribs_) vals[slot] += w[g] * v;
        return SparseOperator::from_csr(static_cast<int>(basis_->size()), row_ptr_, cols_, std::move(vals));
    }

    /// The lambda-scaled entry hop h^{o_A}_A(lambda_A I) alone.
    SparseOperator entry_hop(int q, double lambda_a) const {
        TermSpec t{TermKind::one_qubit, q, 0, circuit_->o(q),
                   lambda_a * Eigen::MatrixXcd::Identity(2, 2)};
        return build_term(t, *basis_, *circuit_, scale_);
    }

    const Schedule& schedule() const { return schedule_; }
    const Basis& basis() const { return *basis_; }
    const Circuit& circuit() const { return *circuit_; }

private:
    static void out_push(std::vector<Triplet>& v, std::int64_t r, std::int64_t c, cd val) {
        v.push_back({static_cast<int>(r), static_cast<int>(c), val});
    }

    void merge(const std::vector<std::vector<Triplet>>& groups) {
        struct Entry {
            int r, c, group;
            cd v;
        };
        std::vector<Entry> all;
        for (std::size_t g = 0; g < groups.size(); ++g)
            for (const Triplet& t : groups[g]) all.push_back({t.row, t.col, static_cast<int>(g), t.value});
        std::sort(all.begin(), all.end(), [](const Entry& x, const Entry& y) {
            if (x.r != y.r) return x.r < y.r;
            if (x.c != y.c) return x.c < y.c;
            return x.group < y.group;
        });
        const int dim = static_cast<int>(basis_->size());
        row_ptr_.assign(dim + 1, 0);
        std::size_t i = 0;
        while (i < all.size()) {
            std::size_t j = i;
            while (j < all.size() && all[j].r == all[i].r && all[j].c == all[i].c) ++j;
            int slot = static_cast<int>(cols_.size());
            cols_.push_back(all[i].c);
            ++row_ptr_[all[i].r + 1];
            for (std::size_t k = i; k < j; ++k) contribs_.push_back({slot, all[k].group, all[k].v});
            i = j;
        }
        for (int r = 0; r < dim; ++r) row_ptr_[r + 1] += row_ptr_[r];
    }

    const Circuit* circuit_;
    const Basis* basis_;
    EnergyScale scale_;
    Schedule schedule_;
    std::vector<std::function<double(const std::vector<double>&)>> weights_;
    std::vector<int> row_ptr_, cols_;
    std::vector<std::tuple<int, int, cd>> contribs_;  // (entry slot, group, base value)
};

inline SparseOperator assemble(const Circuit& c, double lambda, const Basis& basis,
                               EnergyScale scale = {}, Schedule schedule = {}) {
    schedule.m = c.m;
    return HamiltonianAssembler(c, basis, scale, schedule).at(lambda);
}

}  // namespace gsqc
