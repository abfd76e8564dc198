#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gsqc/sparse.hpp"

namespace gsqc {

struct EigOptions {
    int k = 1;
    double tol = 1e-9;          // residual tolerance, relative to max(1, |theta|)
    std::uint64_t seed = 20240901ull;
    int max_iter = 420;         // Krylov dimension per (re)start
    int max_restarts = 10;
    int dense_cutoff = 512;     // full diagonalization below this dimension
};

struct EigPair {
    double value = 0.0;
    Eigen::VectorXcd vector;
    double residual = 0.0;
};

struct EigResult {
    std::vector<EigPair> pairs;  // ascending by value
    bool converged = true;
    double worst_residual = 0.0;
};

namespace detail {

inline Eigen::VectorXcd random_vector(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = cd(g(rng), g(rng));
    return v;
}

inline void project_out(Eigen::VectorXcd& w, const std::vector<Eigen::VectorXcd>& vs) {
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& v : vs) w -= v.dot(w) * v;
}

/// One Lanczos sweep (full reorthogonalization) on the operator deflated
/// against `locked`, starting from `start`. Returns the smallest Ritz pair.
inline bool lanczos_sweep(const SparseOperator& op, const std::vector<Eigen::VectorXcd>& locked,
                          Eigen::VectorXcd start, int m_max, EigPair& out) {
    const int dim = op.dim();
    project_out(start, locked);
    double ns = start.norm();
    if (ns < 1e-12) return false;
    start /= ns;

    std::vector<Eigen::VectorXcd> vs{start};
    std::vector<double> alpha, beta;
    m_max = std::min(m_max, dim);
    bool exhausted = false;
    for (int j = 0; j < m_max; ++j) {
        Eigen::VectorXcd w = op.apply(vs[j]);
        alpha.push_back(std::real(vs[j].dot(w)));
        w -= alpha[j] * vs[j];
        if (j > 0) w -= beta[j - 1] * vs[j - 1];
        project_out(w, locked);
        project_out(w, vs);
        double b = w.norm();
        if (b < 1e-13 || j + 1 == m_max) {
            exhausted = b < 1e-13;
            break;
        }
        beta.push_back(b);
        vs.push_back(w / b);
    }
    (void)exhausted;
    const int n = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < n) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(dim);
    for (int i = 0; i < n; ++i) y += es.eigenvectors()(i, 0) * vs[i];
    project_out(y, locked);
    double ny = y.norm();
    if (ny < 1e-12) return false;
    y /= ny;
    out.vector = y;
    out.value = std::real(y.dot(op.apply(y)));
    Eigen::VectorXcd r = op.apply(y) - out.value * y;
    project_out(r, locked);
    out.residual = r.norm();
    return true;
}

}  // namespace detail

/// k smallest eigenpairs of a Hermitian operator, restricted to the
/// orthogonal complement of the optional deflation space. Below
/// `dense_cutoff` the answer comes from full dense diagonalization; above
/// it, deflated Lanczos with warm restarts. Deterministic for a fixed seed.
inline EigResult extremal_eigs(const SparseOperator& op, EigOptions opt = {},
                               const std::vector<Eigen::VectorXcd>& deflate = {}) {
    const int dim = op.dim();
    if (opt.k < 1 || dim < opt.k) throw std::invalid_argument("extremal_eigs: bad k");
    EigResult res;

    if (dim <= opt.dense_cutoff) {
        Eigen::MatrixXcd h = op.dense();
        if (!deflate.empty()) {
            double shift = op.gershgorin_bound() + 1.0;  // push deflated directions up
            for (const auto& v : deflate) h += shift * (v * v.adjoint());
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
        for (int i = 0; i < opt.k; ++i) {
            EigPair p;
            p.value = es.eigenvalues()(i);
            p.vector = es.eigenvectors().col(i);
            Eigen::VectorXcd r = op.apply(p.vector) - p.value * p.vector;
            detail::project_out(r, deflate);
            p.residual = r.norm();
            res.worst_residual = std::max(res.worst_residual, p.residual);
            res.pairs.push_back(std::move(p));
        }
        return res;
    }

    std::mt19937_64 rng(opt.seed);
    std::vector<Eigen::VectorXcd> locked = deflate;
    for (int found = 0; found < opt.k; ++found) {
        EigPair best;
        bool have = false;
        Eigen::VectorXcd start = detail::random_vector(dim, rng);
        for (int attempt = 0; attempt < opt.max_restarts; ++attempt) {
            EigPair p;
            if (!detail::lanczos_sweep(op, locked, start, opt.max_iter, p)) break;
            if (!have || p.value < best.value + best.residual) {
                best = p;
                have = true;
            }
            if (best.residual <= opt.tol * std::max(1.0, std::abs(best.value))) break;
            start = best.vector;  // warm restart refines the Ritz vector
        }
        if (!have) {
            res.converged = false;
            break;
        }
        if (best.residual > opt.tol * std::max(1.0, std::abs(best.value))) res.converged = false;
        res.worst_residual = std::max(res.worst_residual, best.residual);
        locked.push_back(best.vector);
        res.pairs.push_back(std::move(best));
    }
    std::sort(res.pairs.begin(), res.pairs.end(),
              [](const EigPair& a, const EigPair& b) { return a.value < b.value; });
    return res;
}

/// Convenience wrapper: the k smallest eigenvalues only.
inline std::vector<double> smallest_eigenvalues(const SparseOperator& op, int k, EigOptions opt = {}) {
    opt.k = k;
    EigResult r = extremal_eigs(op, opt);
    if (!r.converged)
        throw std::runtime_error("eigensolver did not converge; worst residual " +
                                 std::to_string(r.worst_residual));
    std::vector<double> out;
    for (const auto& p : r.pairs) out.push_back(p.value);
    return out;
}

}  // namespace gsqc
