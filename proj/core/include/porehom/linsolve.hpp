// linsolve.hpp
// Sparse CSR operators and conjugate-gradient solves for the masked-grid
// Poisson/Stokes systems. Pure-Neumann (singular) systems are handled by
// projecting the constant kernel out of the rhs and every iterate, which
// enforces the mean-zero normalization of the cell problems.

#ifndef POREHOM_LINSOLVE_HPP
#define POREHOM_LINSOLVE_HPP

#include "porehom/errors.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace porehom {

struct SolveReport {
    int iterations = 0;
    double residual = 0.0;   // recomputed ||b - A x||_2 at exit
    bool converged = false;
    double rhs_imbalance = 0.0; // |sum(rhs)| before projection (singular systems)
};

/// Solver gave up before reaching the requested tolerance.
class IterationLimitError : public Error {
public:
    IterationLimitError(const std::string& msg, SolveReport rep)
        : Error(msg), report(rep) {}
    SolveReport report;
};

/// Right-hand side of a singular system violates the Fredholm condition.
class CompatibilityError : public Error {
public:
    explicit CompatibilityError(const std::string& msg) : Error(msg) {}
};

class SparseOperator {
public:
    SparseOperator() = default;
    explicit SparseOperator(int dimension);

    int dimension() const { return n_; }
    bool symmetric() const { return symmetric_; }

    /// Accumulate a coefficient (duplicates are summed). Only valid before
    /// finalize().
    void add(int row, int col, double value);
    /// Freeze into CSR. Checks the symmetry flag against the stored entries.
    void finalize(bool symmetric_hint = true);
    bool finalized() const { return finalized_; }

    /// y = A x. Exact accumulation of the stored entries.
    void apply(const std::vector<double>& x, std::vector<double>& y) const;

    std::vector<double> diagonal() const;

    /// max_ij |A_ij - A_ji| over stored entries (0 for symmetric operators).
    double symmetry_defect() const;

private:
    int n_ = 0;
    bool symmetric_ = false;
    bool finalized_ = false;
    // triplet storage until finalize
    std::vector<int> ti_, tj_;
    std::vector<double> tv_;
    // CSR
    std::vector<std::size_t> row_ptr_;
    std::vector<int> col_;
    std::vector<double> val_;
};

struct SolveOptions {
    double tol = 1e-10;        // relative residual target
    int max_iter = 0;          // 0 = default 50*sqrt(dimension)
    bool singular = false;     // kernel = constants; project mean each iteration
    double compat_factor = 1e-8; // |sum rhs| <= compat_factor*||rhs||_2 required
};

/// Conjugate gradients with Jacobi scaling. For singular (pure-Neumann)
/// systems the returned solution has zero mean. Throws CompatibilityError or
/// IterationLimitError; see SolveOptions.
std::pair<std::vector<double>, SolveReport>
solve_spd(const SparseOperator& op, const std::vector<double>& rhs,
          const SolveOptions& opts = {});

} // namespace porehom

#endif
