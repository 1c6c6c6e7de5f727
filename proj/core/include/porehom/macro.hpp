// macro.hpp
// Finite-difference integration of the upscaled convective Cahn-Hilliard
// equation on the macroscopic domain,
//
//   p dphi/dt = div(C grad phi) + lambda div(M_phi grad f(phi))
//               - (lambda/p) div(M_w grad( div(D grad phi) - g0 ))
//
// with second-order centered stencils, every divergence in conservative
// (flux) form, and classical RK4 with step-doubling error control.
// Boundary modes: fully periodic, or inlet-driven (prescribed flux on the
// left boundary modulated at the reference-cell period, zero-gradient
// outflow on the right, periodic transversally).
//
// rhs evaluation parallelizes over grid rows (read-only phi, disjoint
// writes); the time loop is sequential. Snapshots are immutable once taken.

#ifndef POREHOM_MACRO_HPP
#define POREHOM_MACRO_HPP

#include "porehom/energy.hpp"
#include "porehom/field.hpp"
#include "porehom/tensors.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace porehom {

enum class MacroBC { FullyPeriodic, InletDriven };
enum class MacroIC { Front, Strip, Uniform };

struct MacroConfig {
    EffectiveTensors tensors;
    FreeEnergy fe;
    int NX = 200;
    int NY = 140;
    double dx = 0.01;
    MacroBC bc = MacroBC::InletDriven;
    double inlet_strength = 1.0;  // U; flux through the open inlet strips
    double cell_period = 0.04;    // macro length of one reference cell
    double rk_tol = 1e-6;         // max-norm local error target
    double dt_min = 1e-13;
    double dt_max = 0.0;          // 0 = explicit stability bound from the tensors
    double t_end = 0.1;
    double snapshot_every = 0.01; // 0 = first/last only
    MacroIC ic = MacroIC::Front;
    double ic_amplitude = 0.02;   // sinusoidal front perturbation
    double ic_x0 = 0.25;          // initial front position (fraction of NX*dx)
    double ic_value = -1.0;       // Uniform mode

    double Lx() const { return NX * dx; }
    double Ly() const { return NY * dx; }
};

struct MacroState {
    ScalarField phi;
    double time = 0.0;
    double dt = 0.0;
    double mass = 0.0;
    double energy = 0.0;
};

struct MacroWork; // internal buffers

/// Time-derivative field. Conservative flux differencing throughout; throws
/// BlowupError when the state contains NaN/Inf.
void macro_rhs(const MacroConfig& cfg, const MacroState& state, ScalarField& out);

/// Explicit upper bound on the stable step from the tensor magnitudes
/// (biharmonic and diffusive symbols on the grid, safety factor included).
double stable_dt_bound(const MacroConfig& cfg);

struct StepResult {
    double dt_used = 0.0;
    double error = 0.0;   // step-doubling estimate ||big - two halves||_inf / 15
    int rejections = 0;
};

/// One accepted adaptive step (may retry internally with smaller dt).
/// Throws StiffnessError if dt_min is reached with the error still above
/// tolerance, BlowupError on NaN/Inf or |phi| above the overshoot limit.
/// The second constructor drives an arbitrary autonomous rhs with the same
/// step-doubling controller (used for the integrator's own convergence
/// checks); the overshoot guard is disabled there.
class AdaptiveStepper {
public:
    using Rhs = std::function<void(const ScalarField&, ScalarField&)>;

    explicit AdaptiveStepper(const MacroConfig& cfg);
    AdaptiveStepper(Rhs rhs, int nx, int ny, double rk_tol, double dt_min, double dt_max);
    ~AdaptiveStepper();
    AdaptiveStepper(const AdaptiveStepper&) = delete;
    AdaptiveStepper& operator=(const AdaptiveStepper&) = delete;

    StepResult step(MacroState& state);
    /// Plain fixed-step RK4 advance without error control (convergence studies).
    void rk4_fixed(MacroState& state, double dt);
    const MacroConfig& config() const { return cfg_; }

private:
    void rk4(const ScalarField& y, const ScalarField& k1, double dt, ScalarField& out);
    MacroConfig cfg_;
    MacroWork* work_ = nullptr;
    Rhs rhs_;
    double rk_tol_ = 1e-6;
    double dt_min_ = 1e-13;
    double dt_max_ = 1.0;
    double overshoot_limit_ = 1.2;
    ScalarField k1_, k2_, k3_, k4_, tmp_, big_, mid_, half_;
};

struct DiagnosticsRow {
    double time = 0.0;
    double dt = 0.0;
    double mass = 0.0;
    double energy = 0.0;
};

struct Diagnostics {
    double mass = 0.0;
    double energy = 0.0;
    double front_mean_x = 0.0;       // mean X of the phi=0 set (NaN if empty)
    double front_amplitude = 0.0;    // max-min X of the zero set
    int crossing_count = 0;
};

Diagnostics diagnostics(const MacroState& state, const MacroConfig& cfg);

double total_mass(const ScalarField& phi, double dx);
double discrete_energy(const ScalarField& phi, const MacroConfig& cfg);

/// Zero crossings of phi along grid rows (x-direction scan), one list of
/// x-positions per row. Used by the front diagnostics.
std::vector<std::vector<double>> row_zero_crossings(const ScalarField& phi, double dx,
                                                    bool periodic_x);

using Polyline = std::vector<std::array<double, 2>>;

/// Marching-squares extraction of the phi = 0 level set with linear
/// interpolation along grid lines; returns ordered point lists per connected
/// component. Empty when phi does not change sign. Periodic flags include
/// the wraparound cell strip, with crossings reported up to x (or y) = 1 cell
/// beyond the last node.
std::vector<Polyline> interface_position(const ScalarField& phi, double dx,
                                         bool periodic_x = false, bool periodic_y = false);

struct Snapshot {
    double time = 0.0;
    ScalarField phi;
};

struct MacroRun {
    std::vector<Snapshot> snapshots;
    std::vector<DiagnosticsRow> series;
    MacroState final_state;
    bool aborted = false;
    std::string abort_reason;
};

/// Integrate from the configured initial condition to t_end. On blowup or
/// stiffness failure the partial trajectory is preserved and `aborted` set.
MacroRun run_macro(const MacroConfig& cfg);

/// The configured initial order-parameter field.
ScalarField initial_condition(const MacroConfig& cfg);

} // namespace porehom

#endif
