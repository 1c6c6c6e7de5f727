// config.hpp
// Pipeline configuration: section-based key=value text with defaults for
// every omitted field. Unknown keys and out-of-range values are rejected
// with the offending line number.

#ifndef POREHOM_CONFIG_HPP
#define POREHOM_CONFIG_HPP

#include "porehom/energy.hpp"
#include "porehom/macro.hpp"
#include "porehom/matrix2.hpp"

#include <array>
#include <string>
#include <vector>

namespace porehom {

struct PipelineConfig {
    // [geometry]
    std::string geometry_kind = "channel"; // channel | empty | import
    double amplitude = 0.27;
    double cross_section = 0.46;
    int resolution = 128;
    std::string mask_file;                 // for kind=import

    // [stokes]
    double mu = 1.0;
    std::array<double, 2> force{1.0, 0.0};
    double stokes_tol = 1e-11;
    bool normalize_velocity = true;        // rescale to unit mean speed before
                                           // the dispersion quadrature

    // [mobility]
    Matrix2 mobility = Matrix2::identity();

    // [energy]
    std::string energy_kind = "double_well"; // double_well | polynomial
    double eta = 0.02;                       // 2 macro grid spacings
    double lambda = 4e-4;                    // eta^2 by default
    int energy_r = 2;
    std::vector<double> energy_a;            // a1..a_{2r-1} for kind=polynomial

    // [transport]
    double pe_mic = 0.04;
    double g_tilde0 = 0.0;
    double h_tilde0 = 0.0;

    // [cell]
    double cell_tol = 1e-12;
    bool xi_w_velocity_source = false;       // experimental flag

    // [macro]
    int cells_x = 50;
    int cells_y = 35;
    int points_per_cell = 4;
    double dx = 0.01;
    std::string macro_bc = "inlet";          // inlet | periodic
    double inlet_strength = 1.0;
    double rk_tol = 1e-6;
    double t_end = 0.12;
    double snapshot_every = 0.02;
    std::string macro_ic = "front";          // front | strip | uniform
    double ic_amplitude = 0.02;
    double ic_x0 = 0.2;
    double ic_value = -1.0;
    double dt_min = 1e-13;
    double dt_max = 0.0;                     // 0 = stability bound

    // [output]
    bool write_vtk_files = true;

    FreeEnergy free_energy() const;
    /// Macro grid/IC settings; tensors must be filled in by the caller.
    MacroConfig macro_config() const;

    /// Canonical serialization of every effective value (fixed key order).
    std::string serialize() const;
    /// FNV-1a hash of serialize().
    std::string hash() const;
};

/// Parse a config text. Empty text yields the full default configuration.
/// Throws ConfigError naming the line for syntax errors, unknown keys, or
/// out-of-range values.
PipelineConfig parse_config(const std::string& text);

/// Convenience: read a file (empty path = defaults) and parse it.
PipelineConfig load_config(const std::string& path);

} // namespace porehom

#endif
