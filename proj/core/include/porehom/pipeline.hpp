// pipeline.hpp
// File-based orchestration of the full cell -> Stokes -> tensors -> macro
// chain. Stages communicate through files only, so any stage can be re-run
// (or its inputs hand-edited) independently; every stage writes its outputs
// before the next begins and is deterministic given the config.

#ifndef POREHOM_PIPELINE_HPP
#define POREHOM_PIPELINE_HPP

#include "porehom/config.hpp"
#include "porehom/io.hpp"

#include <string>

namespace porehom {

/// File names inside the output directory.
namespace artifacts {
inline constexpr const char* mask = "mask.txt";
inline constexpr const char* cell_summary = "cell_summary.csv";
inline const std::string xi_phi_csv(int k) { return "xi_phi_" + std::to_string(k) + ".csv"; }
inline const std::string xi_w_csv(int k) { return "xi_w_" + std::to_string(k) + ".csv"; }
inline constexpr const char* flow_u = "flow_u.csv";
inline constexpr const char* flow_v = "flow_v.csv";
inline constexpr const char* flow_p = "flow_p.csv";
inline constexpr const char* stokes_summary = "stokes_summary.csv";
inline constexpr const char* tensor_report = "tensor_report.csv";
inline constexpr const char* diagnostics = "diagnostics.csv";
inline const std::string snapshot_csv(int n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "phi_%04d.csv", n);
    return buf;
}
inline const std::string interface_csv(int n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "interface_%04d.csv", n);
    return buf;
}
} // namespace artifacts

/// Geometry + both corrector families; writes mask, corrector fields, and a
/// cell summary with porosity and solver residuals.
void run_stage_cell(const PipelineConfig& cfg, const std::string& out_dir);

/// Periodic Stokes flow from the pinned mask; writes staggered velocity
/// components, pressure, and a summary (divergence, energy identity, flags).
void run_stage_stokes(const PipelineConfig& cfg, const std::string& out_dir);

/// Effective-tensor assembly from the corrector and flow files; writes the
/// tensor report (the pipeline's primary regression artifact).
void run_stage_tensors(const PipelineConfig& cfg, const std::string& out_dir);

/// Macro integration using the tensors read back from the report file (so
/// hand-edited reports are honored); writes snapshots, interface polylines,
/// and the diagnostics series.
void run_stage_macro(const PipelineConfig& cfg, const std::string& out_dir);

/// All stages in order. Failures abort with the stage name in the message;
/// artifacts of completed stages are retained.
void run_pipeline(const PipelineConfig& cfg, const std::string& out_dir);

} // namespace porehom

#endif
