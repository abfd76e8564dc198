#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gsqc/basis.hpp"
#include "gsqc/circuit.hpp"
#include "gsqc/hamiltonian.hpp"

namespace gsqc {

struct StateVector {
    const Basis* basis = nullptr;
    Eigen::VectorXcd amplitudes;
    double norm() const { return amplitudes.norm(); }
};

/// Zero-energy ground state of H(lambda), built by the forward recurrence:
/// starting from the all-rest all-zero-bit product state, each gate term
/// propagates amplitudes one position layer at a time (entry hops carry a
/// factor lambda_A). Penalty-violating tuples carry amplitude zero.
inline StateVector history_ground_state(const Circuit& c, double lambda, const Basis& basis,
                                        Schedule schedule = {}, bool reverse_layer_order = false) {
    schedule.m = c.m;
    const std::vector<double> lam = schedule.eval(lambda);
    const int m = c.m;
    const int nb = basis.bit_count();

    StateVector psi;
    psi.basis = &basis;
    psi.amplitudes = Eigen::VectorXcd::Zero(basis.size());

    // order position tuples by total displacement from the rest configuration
    std::vector<std::vector<std::int64_t>> layers;
    {
        std::vector<int> pos(m + 1);
        int bits_dummy;
        for (std::int64_t p = 0; p < basis.position_count(); ++p) {
            basis.decode(p * nb, pos, bits_dummy);
            int total = 0;
            for (int q = 1; q <= m; ++q) total += pos[q] - basis.position_low(q);
            if (static_cast<int>(layers.size()) <= total) layers.resize(total + 1);
            layers[total].push_back(p);
        }
        if (reverse_layer_order)
            for (auto& l : layers) std::reverse(l.begin(), l.end());
    }

    psi.amplitudes[0] = 1.0;  // all qubits at o_A - 1 with bits zero

    std::vector<int> pos(m + 1);
    int bits_dummy;
    for (std::size_t layer = 1; layer < layers.size(); ++layer) {
        for (std::int64_t p : layers[layer]) {
            basis.decode(p * nb, pos, bits_dummy);
            if (!penalty_free(c, pos)) continue;

            // pick a reducible qubit: a one-qubit gate, or a two-qubit gate
            // whose partner sits at the same step
            int qa = 0;
            const Gate* gate = nullptr;
            for (int q = 1; q <= m; ++q) {
                if (pos[q] < c.o(q)) continue;
                const Gate* g = c.gate_at(q, pos[q]);
                if (!g) continue;
                if (g->kind == Gate::Kind::one_qubit) {
                    qa = q;
                    gate = g;
                    break;
                }
                if (pos[g->partner(q)] == pos[q]) {
                    qa = q;
                    gate = g;
                    break;
                }
            }
            if (!gate) throw std::logic_error("history recurrence: no reducible qubit on a valid tuple");

            const std::int64_t base = p * nb;
            if (gate->kind == Gate::Kind::one_qubit) {
                Eigen::MatrixXcd u = gate->u;
                if (pos[qa] == c.o(qa)) u *= lam[qa];  // entry hop factor
                const std::int64_t prev = base - basis.position_stride(qa) * nb;
                const int bit = 1 << (qa - 1);
                for (int bits = 0; bits < nb; ++bits) {
                    int b = (bits >> (qa - 1)) & 1;
                    cd acc = 0.0;
                    for (int beta = 0; beta < 2; ++beta) {
                        int pbits = (bits & ~bit) | (beta ? bit : 0);
                        acc += u(b, beta) * psi.amplitudes[prev + pbits];
                    }
                    psi.amplitudes[base + bits] = acc;
                }
            } else {
                const int a = gate->a, b2 = gate->b;
                const std::int64_t prev =
                    base - (basis.position_stride(a) + basis.position_stride(b2)) * nb;
                const int bit_a = 1 << (a - 1), bit_b = 1 << (b2 - 1);
                for (int bits = 0; bits < nb; ++bits) {
                    int row = 2 * ((bits >> (a - 1)) & 1) + ((bits >> (b2 - 1)) & 1);
                    cd acc = 0.0;
                    for (int col = 0; col < 4; ++col) {
                        int pbits = (bits & ~bit_a & ~bit_b) | ((col & 2) ? bit_a : 0) | ((col & 1) ? bit_b : 0);
                        acc += gate->u(row, col) * psi.amplitudes[prev + pbits];
                    }
                    psi.amplitudes[base + bits] = acc;
                }
            }
        }
    }

    double n = psi.norm();
    if (n <= 0) throw std::logic_error("history state vanished");
    psi.amplitudes /= n;
    return psi;
}

/// Probability that qubit `a` sits at step i (optionally with bit value b).
inline double occupation(const StateVector& psi, int a, int i, std::optional<int> b = std::nullopt) {
    const Basis& basis = *psi.basis;
    if (i < basis.position_low(a) || i > basis.position_high(a))
        throw std::out_of_range("occupation: step outside window");
    double acc = 0.0;
    for (std::int64_t idx = 0; idx < basis.size(); ++idx) {
        if (basis.position_of(idx, a) != i) continue;
        if (b && basis.bit_of(idx, a) != *b) continue;
        acc += std::norm(psi.amplitudes[idx]);
    }
    return acc;
}

}  // namespace gsqc
