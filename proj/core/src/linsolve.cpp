#include "porehom/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace porehom {

SparseOperator::SparseOperator(int dimension) : n_(dimension) {}

void SparseOperator::add(int row, int col, double value) {
    ti_.push_back(row);
    tj_.push_back(col);
    tv_.push_back(value);
}

void SparseOperator::finalize(bool symmetric_hint) {
    // Sum duplicates through an ordered map per row so assembly order does not
    // change the stored values.
    std::vector<std::map<int, double>> rows(n_);
    for (std::size_t k = 0; k < tv_.size(); ++k)
        rows[ti_[k]][tj_[k]] += tv_[k];
    ti_.clear(); tj_.clear(); tv_.clear();

    row_ptr_.assign(n_ + 1, 0);
    std::size_t nnz = 0;
    for (int r = 0; r < n_; ++r) nnz += rows[r].size();
    col_.reserve(nnz);
    val_.reserve(nnz);
    for (int r = 0; r < n_; ++r) {
        row_ptr_[r] = col_.size();
        for (auto& [c, v] : rows[r]) {
            col_.push_back(c);
            val_.push_back(v);
        }
    }
    row_ptr_[n_] = col_.size();
    finalized_ = true;
    symmetric_ = symmetric_hint && symmetry_defect() == 0.0;
}

void SparseOperator::apply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(n_, 0.0);
    for (int r = 0; r < n_; ++r) {
        double acc = 0.0;
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            acc += val_[k] * x[col_[k]];
        y[r] = acc;
    }
}

std::vector<double> SparseOperator::diagonal() const {
    std::vector<double> d(n_, 0.0);
    for (int r = 0; r < n_; ++r)
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            if (col_[k] == r) d[r] = val_[k];
    return d;
}

double SparseOperator::symmetry_defect() const {
    double defect = 0.0;
    for (int r = 0; r < n_; ++r) {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const int c = col_[k];
            // binary search for (c, r)
            double vt = 0.0;
            std::size_t lo = row_ptr_[c], hi = row_ptr_[c + 1];
            auto it = std::lower_bound(col_.begin() + lo, col_.begin() + hi, r);
            if (it != col_.begin() + hi && *it == r)
                vt = val_[it - col_.begin()];
            defect = std::max(defect, std::abs(val_[k] - vt));
        }
    }
    return defect;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void project_mean(std::vector<double>& v) {
    double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    for (double& x : v) x -= m;
}

} // namespace

std::pair<std::vector<double>, SolveReport>
solve_spd(const SparseOperator& op, const std::vector<double>& rhs, const SolveOptions& opts) {
    const int n = op.dimension();
    SolveReport rep;
    std::vector<double> x(n, 0.0);

    const double rhs_norm = norm2(rhs);
    if (rhs_norm == 0.0) {
        rep.converged = true;
        return {x, rep};
    }

    std::vector<double> b = rhs;
    if (opts.singular) {
        const double imbalance = std::abs(std::accumulate(b.begin(), b.end(), 0.0));
        rep.rhs_imbalance = imbalance;
        if (imbalance > opts.compat_factor * rhs_norm)
            throw CompatibilityError("singular system rhs violates the compatibility condition: |sum rhs|=" +
                                     std::to_string(imbalance) + " > " +
                                     std::to_string(opts.compat_factor * rhs_norm));
        project_mean(b);
    }

    const int max_iter = opts.max_iter > 0
        ? opts.max_iter
        : std::max(200, static_cast<int>(50.0 * std::sqrt(static_cast<double>(n))));

    std::vector<double> diag = op.diagonal();
    for (double& d : diag) d = (d > 0.0) ? 1.0 / d : 1.0;

    std::vector<double> r(n), z(n), p(n), Ap(n);
    const double b_norm = norm2(b);
    const double target = opts.tol * b_norm;

    int it = 0;
    double true_res = b_norm;

    // The updated-residual recurrence can drift from ||b - A x|| near tight
    // tolerances; restart from the true residual until it agrees.
    for (int sweep = 0; sweep < 4 && it < max_iter && true_res > target; ++sweep) {
        op.apply(x, r);
        for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
        if (opts.singular) project_mean(r);
        for (int i = 0; i < n; ++i) z[i] = diag[i] * r[i];
        if (opts.singular) project_mean(z);
        p = z;
        double rz = dot(r, z);
        double rn = norm2(r);
        while (rn > target && it < max_iter) {
            op.apply(p, Ap);
            const double pAp = dot(p, Ap);
            if (pAp <= 0.0) { it = max_iter; break; } // not SPD on this subspace
            const double alpha = rz / pAp;
            for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
            for (int i = 0; i < n; ++i) r[i] -= alpha * Ap[i];
            if (opts.singular && (it % 16) == 0) project_mean(x);
            for (int i = 0; i < n; ++i) z[i] = diag[i] * r[i];
            if (opts.singular) project_mean(z);
            const double rz_new = dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
            rn = norm2(r);
            ++it;
        }
        if (opts.singular) project_mean(x);
        op.apply(x, Ap);
        for (int i = 0; i < n; ++i) Ap[i] = b[i] - Ap[i];
        true_res = norm2(Ap);
    }

    rep.iterations = it;
    rep.residual = true_res;
    rep.converged = rep.residual <= target * (1.0 + 1e-12);

    if (!rep.converged)
        throw IterationLimitError("CG failed to converge in " + std::to_string(it) +
                                  " iterations (residual " + std::to_string(rep.residual) + ")",
                                  rep);
    return {x, rep};
}

} // namespace porehom
