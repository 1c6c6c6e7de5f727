// microcell.hpp
// Reference-cell PDE solvers: the Laplace corrector problems that feed the
// effective tensors, and the periodic Stokes flow through the pore space.
//
// Correctors solve (finite-volume form on the fluid mask)
//     div(grad xi_k) = 0        in the fluid phase,
//     n . grad xi_k  = n_k      on fluid/solid faces,
// Y-periodic with zero mean over fluid nodes. The second corrector family
// carries the mobility-weighted source div(m (e_k - grad xi_phi_k)) scaled
// by lambda, with the matching flux condition on solid faces.
//
// The two corrector solves (k=1,2) and the Stokes solve are independent
// given a CellGeometry and may run concurrently; each solve is sequential.

#ifndef POREHOM_MICROCELL_HPP
#define POREHOM_MICROCELL_HPP

#include "porehom/field.hpp"
#include "porehom/geometry.hpp"
#include "porehom/linsolve.hpp"
#include "porehom/matrix2.hpp"

#include <array>

namespace porehom {

struct CorrectorField {
    int k = 1;               // direction index, 1-based
    ScalarField values;      // full grid, zero on solid nodes, mean-zero on fluid
    VectorField gradient;    // node gradients; solid faces use the imposed flux
    SolveReport report;
};

/// Periodic Stokes flow on a MAC layout. u lives on x-faces (i*hx,(j+.5)*hy),
/// v on y-faces ((i+.5)*hx, j*hy), pressure at cell centers (mean-zero).
/// Faces touching a solid cell carry velocity 0 (no-slip staircase walls).
struct CellFlow {
    ScalarField u, v, p;
    double mu = 1.0;
    std::array<double, 2> force{0.0, 0.0};
    double div_max = 0.0;     // max |div u| over fluid cells at exit
    bool blocked = false;     // no periodic through-flow in the force direction
    SolveReport report;       // outer (pressure Schur) solve
};

/// Options for the xi_w solve. The velocity-fluctuation source is an
/// experimental variant (off by default and unused by the pipeline).
struct CorrectorWOptions {
    bool add_velocity_fluctuation = false;
    const CellFlow* flow = nullptr;
    double pe_mic = 0.0;
};

CorrectorField solve_corrector_phi(const CellGeometry& cell, int k, double tol = 1e-12);

CorrectorField solve_corrector_w(const CellGeometry& cell, int k,
                                 const Matrix2& mobility, double lambda,
                                 const CorrectorField& xi_phi, double tol = 1e-12,
                                 const CorrectorWOptions& opts = {});

/// Node gradient of a corrector: average of the two face gradients per
/// direction, with the imposed Neumann value at solid faces. Used both after
/// a solve and when reloading corrector values from disk.
VectorField corrector_gradient(const CellGeometry& cell, int k, const ScalarField& values);

CellFlow solve_periodic_stokes(const CellGeometry& cell, double mu,
                               const std::array<double, 2>& force, double tol = 1e-11);

/// v^j = pe_mic * mean over fluid nodes of u^j (cell-center interpolation).
std::array<double, 2> drift_velocity(const CellFlow& flow, double pe_mic,
                                     const CellGeometry& cell);

/// Plain fluid mean of the cell-center interpolated velocity.
std::array<double, 2> mean_velocity(const CellFlow& flow, const CellGeometry& cell);

/// Velocity (and pressure) at cell centers for quadrature and export.
VectorField interpolate_to_centers(const CellFlow& flow, const CellGeometry& cell);

/// Multiply u, v, p by a constant factor (velocity renormalization).
void rescale_flow(CellFlow& flow, double factor);

/// max |div u| over fluid cells.
double divergence_max(const CellFlow& flow, const CellGeometry& cell);

/// Discrete Dirichlet energy mu*||grad u||^2 via the momentum operator's
/// quadratic form, and the work eta . integral(u). Equal to solver accuracy.
struct StokesEnergy {
    double dissipation = 0.0;
    double work = 0.0;
};
StokesEnergy stokes_energy(const CellFlow& flow, const CellGeometry& cell);

} // namespace porehom

#endif
