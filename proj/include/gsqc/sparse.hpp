#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gsqc {

using cd = std::complex<double>;

struct Triplet {
    int row;
    int col;
    cd value;
};

/// Hermitian complex operator in compressed sparse row form. Built from
/// coordinate triplets with duplicate summation; entry order inside a row is
/// by column index, so identical triplet sets compress to identical storage.
class SparseOperator {
public:
    SparseOperator() = default;

    static SparseOperator from_triplets(int dim, std::vector<Triplet> ts, double drop_tol = 0.0) {
        SparseOperator op;
        op.dim_ = dim;
        std::sort(ts.begin(), ts.end(), [](const Triplet& a, const Triplet& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        op.row_ptr_.assign(dim + 1, 0);
        std::size_t i = 0;
        while (i < ts.size()) {
            std::size_t j = i;
            cd sum = 0.0;
            while (j < ts.size() && ts[j].row == ts[i].row && ts[j].col == ts[i].col) {
                sum += ts[j].value;
                ++j;
            }
            if (ts[i].row < 0 || ts[i].row >= dim || ts[i].col < 0 || ts[i].col >= dim)
                throw std::out_of_range("SparseOperator: triplet index out of range");
            if (std::abs(sum) > drop_tol) {
                op.col_.push_back(ts[i].col);
                op.val_.push_back(sum);
                ++op.row_ptr_[ts[i].row + 1];
            }
            i = j;
        }
        for (int r = 0; r < dim; ++r) op.row_ptr_[r + 1] += op.row_ptr_[r];
        return op;
    }

    static SparseOperator from_csr(int dim, std::vector<int> row_ptr, std::vector<int> cols,
                                   std::vector<cd> vals) {
        SparseOperator op;
        op.dim_ = dim;
        op.row_ptr_ = std::move(row_ptr);
        op.col_ = std::move(cols);
        op.val_ = std::move(vals);
        return op;
    }

    static SparseOperator identity(int dim, cd scale = 1.0) {
        std::vector<Triplet> ts;
        ts.reserve(dim);
        for (int i = 0; i < dim; ++i) ts.push_back({i, i, scale});
        return from_triplets(dim, std::move(ts));
    }

    int dim() const { return dim_; }
    std::int64_t nnz() const { return static_cast<std::int64_t>(val_.size()); }

    void apply(const cd* x, cd* y) const {
        for (int r = 0; r < dim_; ++r) {
            cd acc = 0.0;
            for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += val_[k] * x[col_[k]];
            y[r] = acc;
        }
    }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
        if (x.size() != dim_) throw std::invalid_argument("SparseOperator::apply: size mismatch");
        Eigen::VectorXcd y(dim_);
        apply(x.data(), y.data());
        return y;
    }

    cd coeff(int r, int c) const {
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            if (col_[k] == c) return val_[k];
        return 0.0;
    }

    bool is_hermitian(double tol = 1e-12) const {
        for (int r = 0; r < dim_; ++r)
            for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                if (std::abs(val_[k] - std::conj(coeff(col_[k], r))) > tol) return false;
        return true;
    }

    SparseOperator add(const SparseOperator& other, cd w_self = 1.0, cd w_other = 1.0) const {
        if (other.dim_ != dim_) throw std::invalid_argument("SparseOperator::add: size mismatch");
        std::vector<Triplet> ts;
        ts.reserve(val_.size() + other.val_.size());
        for (int r = 0; r < dim_; ++r) {
            for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) ts.push_back({r, col_[k], w_self * val_[k]});
            for (int k = other.row_ptr_[r]; k < other.row_ptr_[r + 1]; ++k)
                ts.push_back({r, other.col_[k], w_other * other.val_[k]});
        }
        return from_triplets(dim_, std::move(ts));
    }

    /// Principal submatrix on the given (sorted or unsorted) index list.
    SparseOperator restrict_to(const std::vector<int>& idx) const {
        std::vector<int> where(dim_, -1);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (idx[i] < 0 || idx[i] >= dim_) throw std::out_of_range("restrict_to: bad index");
            where[idx[i]] = static_cast<int>(i);
        }
        std::vector<Triplet> ts;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            int r = idx[i];
            for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
                int c = where[col_[k]];
                if (c >= 0) ts.push_back({static_cast<int>(i), c, val_[k]});
            }
        }
        return from_triplets(static_cast<int>(idx.size()), std::move(ts));
    }

    Eigen::MatrixXcd dense() const {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
        for (int r = 0; r < dim_; ++r)
            for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) m(r, col_[k]) += val_[k];
        return m;
    }

    /// Gershgorin upper bound on |eigenvalues|; cheap deterministic norm cap.
    double gershgorin_bound() const {
        double best = 0.0;
        for (int r = 0; r < dim_; ++r) {
            double acc = 0.0;
            for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += std::abs(val_[k]);
            best = std::max(best, acc);
        }
        return best;
    }

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& cols() const { return col_; }
    const std::vector<cd>& values() const { return val_; }

private:
    int dim_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_;
    std::vector<cd> val_;
};

inline double rayleigh_quotient(const SparseOperator& op, const Eigen::VectorXcd& v) {
    return std::real(v.dot(op.apply(v))) / std::real(v.dot(v));
}

}  // namespace gsqc
