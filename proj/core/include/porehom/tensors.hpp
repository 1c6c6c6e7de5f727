// tensors.hpp
// Quadrature of the effective macroscopic coefficients from cell-problem
// outputs: geometry-corrected diffusion D, mobility corrections M_phi/M_w,
// convection/dispersion correction C, drift velocity, porosity, and the
// wetting constants. All integrals are node-wise midpoint sums over the
// fluid mask, normalized by the total cell measure |Y| = 1.
// Pure functions; safe for concurrent invocation.

#ifndef POREHOM_TENSORS_HPP
#define POREHOM_TENSORS_HPP

#include "porehom/geometry.hpp"
#include "porehom/matrix2.hpp"
#include "porehom/microcell.hpp"

#include <array>
#include <string>

namespace porehom {

struct EffectiveTensors {
    Matrix2 D;         // d_ik = (1/|Y|) int_{Y1} (delta_ik - d xi_phi_k / dy_i)
    Matrix2 C;         // c_kk = (Pe/|Y|) int_{Y1} (u_k - vbar_k) xi_phi_k; off-diag 0
    Matrix2 M_phi;     // mobility-weighted quadrature with xi_phi
    Matrix2 M_w;       // same with xi_w
    std::array<double, 2> v{0.0, 0.0}; // drift velocity Pe * fluid mean of u
    double porosity = 0.0;
    double pe_mic = 0.0;
    double g_tilde0 = 0.0;
    double h_tilde0 = 0.0;
};

/// Diffusion correction tensor from the xi_phi correctors (one per direction).
Matrix2 tensor_D(const std::array<CorrectorField, 2>& xi_phi, const CellGeometry& cell);

/// Mobility correction tensor; call with xi_phi correctors for M_phi and with
/// xi_w correctors for M_w.
Matrix2 tensor_M(const Matrix2& mobility, const std::array<CorrectorField, 2>& xi,
                 const CellGeometry& cell);

/// Convection/dispersion tensor. Diagonal by construction. The velocity
/// fluctuation inside the integrand subtracts the plain fluid mean of u; the
/// single pe_mic prefactor sits outside the integral.
Matrix2 tensor_C(const CellFlow& flow, const std::array<CorrectorField, 2>& xi_phi,
                 double pe_mic, const CellGeometry& cell);

/// The paper-level surface integrals for the wetting constants involve
/// quantities that are not computable from the mask alone, so these are
/// direct configuration inputs (default 0 = neutral wetting).
std::pair<double, double> effective_wetting(double g_tilde0, double h_tilde0);

} // namespace porehom

#endif
