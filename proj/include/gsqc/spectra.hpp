#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "gsqc/basis.hpp"
#include "gsqc/circuit.hpp"
#include "gsqc/eigs.hpp"
#include "gsqc/gauge.hpp"
#include "gsqc/groundstate.hpp"
#include "gsqc/hamiltonian.hpp"

namespace gsqc {

/// Lowest eigenvalue bound for h + dh from the ground data of h (Lemma-2
/// style): min over the supplied ground-space expectations x of
///   e0 + (e1-e0) x / ((e1-e0) + x + |dh|).
inline double sum_bound(double e0, double e1, const std::vector<double>& expectations,
                        double norm_dh) {
    if (e1 < e0) throw std::invalid_argument("sum_bound: e1 must be >= e0");
    double best = std::numeric_limits<double>::infinity();
    for (double x : expectations) {
        if (x < 0 || x > norm_dh + 1e-12)
            throw std::invalid_argument("sum_bound: expectation outside [0, |dh|]");
        double g = e1 - e0;
        best = std::min(best, e0 + g * x / (g + x + norm_dh));
    }
    if (expectations.empty()) throw std::invalid_argument("sum_bound: no expectations");
    return best;
}

/// Active qubit index for the staged schedule: A(lambda) = floor(M lambda)+1,
/// clamped to M at lambda = 1.
inline int active_qubit(double lambda, int m) {
    if (lambda >= 1.0) return m;
    return static_cast<int>(std::floor(m * lambda)) + 1;
}

/// Closed-form minimum-gap lower bound for the one-dimensional layout,
/// in units of the energy scale.
inline double gap_bound_1d(int m, int depth) {
    if (m < 3 || m % 2 == 0) throw std::invalid_argument("gap_bound_1d: M must be odd >= 3");
    int two_n = (depth - 3) / 2 - m;
    if (depth != 2 * (2 * (two_n / 2) + m) + 3 || two_n < 0 || two_n % 4 != 0 || two_n / 2 < m - 1)
        throw std::invalid_argument("gap_bound_1d: N does not come from a valid configuration");
    double d1 = 12.0 * m * (depth + 2 * m - 4) + 1.0;
    double d2 = 4.0 * (depth + 4 * m - 4) + 1.0;
    return 1.0 / (d1 * d2 * (2.0 * depth));
}

/// Expected rest-site occupation of the active qubit in the gauged ground
/// state of a generated layout (the staged-activation marginal).
inline double lemma3_expected_occupation(int a, int m, int depth, double lambda_a) {
    double l2 = lambda_a * lambda_a;
    if (a < m) return 1.0 / (1.0 + 3.0 * l2);
    return 1.0 / (1.0 + (depth - 4.0) * l2);
}

/// Shared context for spectral work on one circuit: the gauged layout, its
/// basis, the cached assembler, and the bit-sector index lists.
class SpectralContext {
public:
    explicit SpectralContext(const Circuit& c, EnergyScale scale = {}, Schedule sched = {})
        : original_(c) {
        auto [g, map] = identity_gauge(original_);
        gauged_ = std::move(g);
        map_ = map;
        basis_ = std::make_unique<Basis>(gauged_);
        sched.m = c.m;
        schedule_ = sched;
        assembler_ = std::make_unique<HamiltonianAssembler>(gauged_, *basis_, scale, sched);
        for (int bits = 0; bits < basis_->bit_count(); ++bits)
            sectors_.push_back(sector(*basis_, bits, c.m));
    }

    const Circuit& gauged() const { return gauged_; }
    const Basis& basis() const { return *basis_; }
    const HamiltonianAssembler& assembler() const { return *assembler_; }
    const Schedule& schedule() const { return schedule_; }

    /// Ground state of the gauged Hamiltonian via the history recurrence.
    StateVector ground_state(double lambda) const {
        return history_ground_state(gauged_, lambda, *basis_, schedule_);
    }

    struct GapDetail {
        double e0;       // eigensolver ground energy (zero-bit sector)
        double e1_full;  // second eigenvalue over all sectors
        double gap;
        double residual_hpsi;  // |H psi_0| for the recurrence state
    };

    /// Exact gap of H(lambda): bit sectors of the gauged operator are solved
    /// separately (k=2 on the zero sector, k=1 elsewhere) and merged.
    GapDetail gap_detail(double lambda, EigOptions opt = {}) const {
        SparseOperator h = assembler_->at(lambda);
        StateVector psi0 = ground_state(lambda);
        GapDetail d{};
        d.residual_hpsi = h.apply(psi0.amplitudes).norm();
        double second = std::numeric_limits<double>::infinity();
        for (int bits = 0; bits < basis_->bit_count(); ++bits) {
            SparseOperator hs = h.restrict_to(sectors_[bits].indices);
            EigOptions o = opt;
            o.k = bits == 0 ? 2 : 1;
            EigResult r = extremal_eigs(hs, o);
            if (bits == 0) {
                d.e0 = r.pairs[0].value;
                second = std::min(second, r.pairs[1].value);
            } else {
                second = std::min(second, r.pairs[0].value);
            }
        }
        d.e1_full = second;
        d.gap = second - d.e0;
        return d;
    }

    double gap(double lambda, EigOptions opt = {}) const { return gap_detail(lambda, opt).gap; }

    struct E1Detail {
        double value;
        double kernel_residual;  // worst |op u| over the two analytic kernel states
        int active;
    };

    /// Lowest nonzero eigenvalue of H(lambda) - h^{o_A}_A(lambda_A I) in the
    /// all-zero-bit block with qubits above A pinned quiescent. The block is
    /// lambda-independent inside each activation segment, and its kernel is
    /// spanned by two analytic states (rest slice and itinerant slice) that
    /// are verified and deflated before the eigensolve.
    E1Detail e1_thm3(double lambda, EigOptions opt = {}) const {
        int a = active_qubit(lambda, original_.m);
        auto it = e1_cache_.find(a);
        if (it != e1_cache_.end()) return it->second;

        SubBasis sub = sector(*basis_, 0, a);
        std::vector<double> lam = schedule_.eval(lambda);
        SparseOperator h = assembler_->at(lambda).restrict_to(sub.indices);
        SparseOperator entry = assembler_->entry_hop(a, lam[a]).restrict_to(sub.indices);
        SparseOperator op = h.add(entry, 1.0, -1.0);

        // analytic kernel: uniform over valid tuples with the active qubit at
        // rest, and uniform over valid tuples with it itinerant
        Eigen::VectorXcd u1 = Eigen::VectorXcd::Zero(op.dim());
        Eigen::VectorXcd u2 = Eigen::VectorXcd::Zero(op.dim());
        std::vector<int> pos(basis_->qubits() + 1);
        int bits;
        for (std::size_t i = 0; i < sub.indices.size(); ++i) {
            basis_->decode(sub.indices[i], pos, bits);
            if (!penalty_free(gauged_, pos)) continue;
            if (pos[a] == gauged_.o(a) - 1)
                u1[i] = 1.0;
            else
                u2[i] = 1.0;
        }
        u1.normalize();
        u2.normalize();
        E1Detail d{};
        d.active = a;
        d.kernel_residual = std::max(op.apply(u1).norm(), op.apply(u2).norm());
        if (d.kernel_residual > 1e-8)
            throw std::runtime_error("e1_thm3: analytic kernel states are not annihilated");
        EigOptions o = opt;
        o.k = 1;
        EigResult r = extremal_eigs(op, o, {u1, u2});
        d.value = r.pairs[0].value;
        if (d.value <= 1e-8)
            throw std::runtime_error("e1_thm3: kernel dimension exceeds the expected 2");
        e1_cache_[a] = d;
        return d;
    }

private:
    Circuit original_;
    Circuit gauged_;
    GaugeMap map_;
    std::unique_ptr<Basis> basis_;
    std::unique_ptr<HamiltonianAssembler> assembler_;
    Schedule schedule_;
    std::vector<SubBasis> sectors_;
    mutable std::map<int, E1Detail> e1_cache_;
};

inline double gap(const Circuit& c, double lambda, EigOptions opt = {}) {
    return SpectralContext(c).gap(lambda, opt);
}

inline double e1(const Circuit& c, double lambda, EigOptions opt = {}) {
    return SpectralContext(c).e1_thm3(lambda, opt).value;
}

struct GapScanRow {
    double lambda;
    double e0;
    double e1_full;
    double gap;
    double e1_thm3;
    double occupation;
    double bound_thm3;
    double bound_thm4;
    double residual_hpsi;
};

struct GapScan {
    std::vector<GapScanRow> rows;
    double g_min = 0.0;
    double bound_thm3_min = 0.0;  // min over the grid of the per-point formula
    double bound_thm4 = 0.0;
};

inline GapScan gap_scan(const Circuit& c, const std::vector<double>& grid, EigOptions opt = {},
                        bool with_exact_gap = true) {
    SpectralContext ctx(c);
    GapScan scan;
    scan.bound_thm4 = gap_bound_1d(c.m, c.depth);
    scan.g_min = std::numeric_limits<double>::infinity();
    scan.bound_thm3_min = std::numeric_limits<double>::infinity();
    for (double lam : grid) {
        GapScanRow row{};
        row.lambda = lam;
        int a = active_qubit(lam, c.m);
        auto e1d = ctx.e1_thm3(lam, opt);
        row.e1_thm3 = e1d.value;
        StateVector psi0 = ctx.ground_state(lam);
        row.occupation = occupation(psi0, a, ctx.gauged().o(a) - 1, 0);
        row.bound_thm3 = 0.25 * row.e1_thm3 * row.occupation;
        row.bound_thm4 = scan.bound_thm4;
        if (with_exact_gap) {
            auto gd = ctx.gap_detail(lam, opt);
            row.e0 = gd.e0;
            row.e1_full = gd.e1_full;
            row.gap = gd.gap;
            row.residual_hpsi = gd.residual_hpsi;
            scan.g_min = std::min(scan.g_min, row.gap);
        }
        scan.bound_thm3_min = std::min(scan.bound_thm3_min, row.bound_thm3);
        scan.rows.push_back(row);
    }
    return scan;
}

/// Minimum over the grid of the per-point Thm.-3 expression
/// (1/4) e1(lambda) <psi_0(lambda)| n_{A, o_A - 1, 0} |psi_0(lambda)>.
inline double gap_bound_thm3(const Circuit& c, const std::vector<double>& grid,
                             EigOptions opt = {}) {
    return gap_scan(c, grid, opt, false).bound_thm3_min;
}

}  // namespace gsqc
