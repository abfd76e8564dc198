#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gsqc/circuit.hpp"

namespace gsqc {

/// Occupation basis with one particle per qubit rail: a position i_A in
/// [o_A-1, f_A] and a bit b_A per qubit. Index layout is mixed radix with
/// positions outer and bits inner; qubit 1 varies fastest in each part.
class Basis {
public:
    explicit Basis(const Circuit& c) : m_(c.m) {
        lo_.assign(m_ + 1, 0);
        range_.assign(m_ + 1, 0);
        stride_.assign(m_ + 1, 0);
        std::int64_t pos = 1;
        for (int q = 1; q <= m_; ++q) {
            lo_[q] = c.o(q) - 1;
            range_[q] = c.f(q) - c.o(q) + 2;
            stride_[q] = pos;
            pos *= range_[q];
        }
        pos_count_ = pos;
        std::int64_t total = pos * (std::int64_t(1) << m_);
        if (total > (std::int64_t(1) << 31))
            throw std::overflow_error("basis larger than 2^31 states");
        size_ = total;
    }

    int qubits() const { return m_; }
    std::int64_t size() const { return size_; }
    std::int64_t position_count() const { return pos_count_; }
    int bit_count() const { return 1 << m_; }
    int position_low(int q) const { return lo_[q]; }
    int position_high(int q) const { return lo_[q] + range_[q] - 1; }
    int position_range(int q) const { return range_[q]; }

    std::int64_t position_index(const std::vector<int>& pos) const {
        std::int64_t idx = 0;
        for (int q = 1; q <= m_; ++q) {
            int d = pos[q] - lo_[q];
            if (d < 0 || d >= range_[q]) throw std::out_of_range("position outside window");
            idx += d * stride_[q];
        }
        return idx;
    }

    std::int64_t index_of(const std::vector<int>& pos, int bits) const {
        return position_index(pos) * bit_count() + bits;
    }

    int bits_of(std::int64_t idx) const { return static_cast<int>(idx % bit_count()); }
    std::int64_t position_part(std::int64_t idx) const { return idx / bit_count(); }

    int position_of(std::int64_t idx, int q) const {
        return static_cast<int>((position_part(idx) / stride_[q]) % range_[q]) + lo_[q];
    }
    int bit_of(std::int64_t idx, int q) const { return (bits_of(idx) >> (q - 1)) & 1; }

    void decode(std::int64_t idx, std::vector<int>& pos, int& bits) const {
        bits = bits_of(idx);
        std::int64_t p = position_part(idx);
        pos.assign(m_ + 1, 0);
        for (int q = 1; q <= m_; ++q) {
            pos[q] = static_cast<int>(p % range_[q]) + lo_[q];
            p /= range_[q];
        }
    }

    std::int64_t position_stride(int q) const { return stride_[q]; }

private:
    int m_;
    std::vector<int> lo_, range_;
    std::vector<std::int64_t> stride_;
    std::int64_t pos_count_ = 0, size_ = 0;
};

inline Basis enumerate_basis(const Circuit& c) { return Basis(c); }

/// Index list into a parent basis: a bit sector with all qubits above
/// `active` pinned quiescent at (o_B - 1, 0).
struct SubBasis {
    const Basis* parent = nullptr;
    int active = 0;
    int bits = 0;
    std::vector<int> indices;  // parent indices, ascending
    std::int64_t size() const { return static_cast<std::int64_t>(indices.size()); }
};

/// Sub-basis with bit pattern `bits` (b_1 is the least significant bit) and
/// i_B = o_B - 1, b_B = 0 for all B > active. Throws if the constraints
/// conflict (a pinned qubit with bit 1).
inline SubBasis sector(const Basis& b, int bits, int active) {
    if (active < 0 || active > b.qubits()) throw std::invalid_argument("sector: bad active qubit");
    for (int q = active + 1; q <= b.qubits(); ++q)
        if ((bits >> (q - 1)) & 1)
            throw std::invalid_argument("sector: pinned qubit cannot carry bit 1");
    SubBasis s;
    s.parent = &b;
    s.active = active;
    s.bits = bits;
    std::int64_t free_count = 1;
    for (int q = 1; q <= active; ++q) free_count *= b.position_range(q);
    s.indices.reserve(free_count);
    std::vector<int> pos(b.qubits() + 1);
    for (int q = active + 1; q <= b.qubits(); ++q) pos[q] = b.position_low(q);
    std::function<void(int)> rec = [&](int q) {
        if (q == 0) {
            s.indices.push_back(static_cast<int>(b.index_of(pos, bits)));
            return;
        }
        for (int i = b.position_low(q); i <= b.position_high(q); ++i) {
            pos[q] = i;
            rec(q - 1);
        }
    };
    rec(active);
    std::sort(s.indices.begin(), s.indices.end());
    return s;
}

/// Positions of qubit rails in a penalty-free tuple set.
struct VertexSet {
    int m = 0;
    std::vector<std::vector<int>> tuples;  // each of size m+1, slot 0 unused
};

/// True iff the position tuple is annihilated by every pair penalty of the
/// circuit: no two-qubit gate at step j may see one qubit before j and its
/// partner at j or later.
inline bool penalty_free(const Circuit& c, const std::vector<int>& pos) {
    for (const Gate& g : c.gates)
        if (g.kind == Gate::Kind::two_qubit) {
            bool a_late = pos[g.a] >= g.time;
            bool b_late = pos[g.b] >= g.time;
            if (a_late != b_late) return false;
        }
    return true;
}

/// Optional per-qubit interval pins for penalty_free_vertices.
struct PositionPins {
    std::vector<std::optional<std::pair<int, int>>> range;  // index 1..m
};

/// Enumerates all penalty-free position tuples by qubit-at-a-time interval
/// propagation: once qubits above q are fixed, every pair constraint on q
/// restricts it to one interval.
inline VertexSet penalty_free_vertices(const Circuit& c, const PositionPins* pins = nullptr) {
    VertexSet vs;
    vs.m = c.m;
    std::vector<std::vector<std::pair<int, int>>> gates_with(c.m + 1);  // q -> (partner, step)
    for (const Gate& g : c.gates)
        if (g.kind == Gate::Kind::two_qubit) {
            gates_with[g.a].push_back({g.b, g.time});
            gates_with[g.b].push_back({g.a, g.time});
        }
    std::vector<int> pos(c.m + 1, 0);
    std::function<void(int)> rec = [&](int q) {
        if (q == 0) {
            vs.tuples.push_back(pos);
            return;
        }
        int lo = c.o(q) - 1, hi = c.f(q);
        if (pins && pins->range.size() > static_cast<std::size_t>(q) && pins->range[q]) {
            lo = std::max(lo, pins->range[q]->first);
            hi = std::min(hi, pins->range[q]->second);
        }
        for (auto [partner, step] : gates_with[q])
            if (partner > q) {
                if (pos[partner] >= step)
                    lo = std::max(lo, step);
                else
                    hi = std::min(hi, step - 1);
            }
        for (int i = lo; i <= hi; ++i) {
            pos[q] = i;
            rec(q - 1);
        }
    };
    rec(c.m);
    return vs;
}

}  // namespace gsqc
