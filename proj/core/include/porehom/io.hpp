// io.hpp
// File formats for the pipeline stages. All numeric output is decimal text
// with 17 significant digits so regression diffs are lossless, and every
// file starts with a comment line carrying the config hash.

#ifndef POREHOM_IO_HPP
#define POREHOM_IO_HPP

#include "porehom/field.hpp"
#include "porehom/geometry.hpp"
#include "porehom/macro.hpp"
#include "porehom/microcell.hpp"
#include "porehom/tensors.hpp"

#include <string>
#include <vector>

namespace porehom {

/// "%.17g" formatting used by every writer.
std::string format_g17(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path); // throws DependencyError-free Error
bool file_exists(const std::string& path);

// --- mask -----------------------------------------------------------------
void write_mask(const std::string& path, const CellGeometry& cell,
                const std::string& config_hash);
CellGeometry read_mask(const std::string& path);

// --- grid-sampled fields ----------------------------------------------------
/// CSV rows "x,y,value" at pixel centers (solid nodes included, value 0).
void write_field_csv(const std::string& path, const ScalarField& f,
                     double hx, double hy, const std::string& config_hash,
                     const std::string& value_name = "value");
/// Reads a field written by write_field_csv; grid shape inferred.
ScalarField read_field_csv(const std::string& path);

/// Legacy ASCII VTK structured points with one or more scalar fields.
void write_vtk(const std::string& path, const std::string& title,
               const std::vector<std::pair<std::string, const ScalarField*>>& fields,
               double hx, double hy);

// --- tensor report ----------------------------------------------------------
struct TensorReport {
    EffectiveTensors tensors;
    std::string config_hash;
    std::string geometry_hash;
    double velocity_scale = 1.0;    // factor applied to the raw Stokes flow
    double xi_residual[2] = {0.0, 0.0};
    double xi_w_residual[2] = {0.0, 0.0};
    double stokes_div_max = 0.0;
    double stokes_residual = 0.0;
    bool stokes_blocked = false;
};

/// Key,value CSV; the scientific regression artifact of the pipeline.
void write_tensor_report(const std::string& path, const TensorReport& rep);
TensorReport read_tensor_report(const std::string& path);

// --- macro outputs ----------------------------------------------------------
void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRow>& rows,
                           const std::string& config_hash);
void write_polylines_csv(const std::string& path, const std::vector<Polyline>& lines,
                         const std::string& config_hash);

/// FNV-1a hash of a string, hex-formatted; used for config pinning.
std::string fnv1a_hex(const std::string& text);

} // namespace porehom

#endif
