#include "porehom/pipeline.hpp"

#include "porehom/errors.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

namespace porehom {

namespace {

std::string joined(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
}

void require(const std::string& stage, const std::string& dir, const std::string& name) {
    if (!file_exists(joined(dir, name)))
        throw DependencyError(stage, joined(dir, name));
}

CellGeometry build_geometry(const PipelineConfig& cfg) {
    if (cfg.geometry_kind == "empty") return build_empty_cell(cfg.resolution);
    if (cfg.geometry_kind == "import") return read_mask(cfg.mask_file);
    return build_channel_cell(cfg.amplitude, cfg.cross_section, cfg.resolution);
}

void write_kv_csv(const std::string& path, const std::string& config_hash,
                  const std::vector<std::pair<std::string, std::string>>& rows) {
    std::string out = "# config=" + config_hash + "\nkey,value\n";
    for (auto& [k, v] : rows) out += k + "," + v + "\n";
    write_text_file(path, out);
}

std::map<std::string, std::string> read_kv_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    std::map<std::string, std::string> kv;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto c = line.find(',');
        if (c == std::string::npos) continue;
        kv[line.substr(0, c)] = line.substr(c + 1);
    }
    return kv;
}

} // namespace

void run_stage_cell(const PipelineConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const std::string hash = cfg.hash();
    const CellGeometry cell = build_geometry(cfg);
    write_mask(joined(out_dir, artifacts::mask), cell, hash);

    std::vector<std::pair<std::string, std::string>> summary;
    summary.emplace_back("geometry_hash", cell.mask_hash());
    summary.emplace_back("porosity", format_g17(cell.porosity()));

    const FreeEnergy fe = cfg.free_energy();
    for (int k = 1; k <= 2; ++k) {
        CorrectorField xi = solve_corrector_phi(cell, k, cfg.cell_tol);
        write_field_csv(joined(out_dir, artifacts::xi_phi_csv(k)), xi.values,
                        cell.hx(), cell.hy(), hash, "xi_phi");
        if (cfg.write_vtk_files)
            write_vtk(joined(out_dir, "xi_phi_" + std::to_string(k) + ".vtk"),
                      "corrector xi_phi_" + std::to_string(k),
                      {{"xi_phi", &xi.values}}, cell.hx(), cell.hy());
        summary.emplace_back("xi" + std::to_string(k) + "_residual", format_g17(xi.report.residual));
        summary.emplace_back("xi" + std::to_string(k) + "_iterations",
                             std::to_string(xi.report.iterations));

        CorrectorField xw = solve_corrector_w(cell, k, cfg.mobility, fe.lambda, xi, cfg.cell_tol);
        write_field_csv(joined(out_dir, artifacts::xi_w_csv(k)), xw.values,
                        cell.hx(), cell.hy(), hash, "xi_w");
        if (cfg.write_vtk_files)
            write_vtk(joined(out_dir, "xi_w_" + std::to_string(k) + ".vtk"),
                      "corrector xi_w_" + std::to_string(k),
                      {{"xi_w", &xw.values}}, cell.hx(), cell.hy());
        summary.emplace_back("xiw" + std::to_string(k) + "_residual", format_g17(xw.report.residual));
        summary.emplace_back("xiw" + std::to_string(k) + "_iterations",
                             std::to_string(xw.report.iterations));
    }
    write_kv_csv(joined(out_dir, artifacts::cell_summary), hash, summary);
}

void run_stage_stokes(const PipelineConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const std::string hash = cfg.hash();
    require("stokes", out_dir, artifacts::mask);
    const CellGeometry cell = read_mask(joined(out_dir, artifacts::mask));

    CellFlow flow;
    bool skipped = false;
    if (cell.fluid_count() == cell.nx() * cell.ny() &&
        (cfg.force[0] != 0.0 || cfg.force[1] != 0.0)) {
        // Empty cell: a nonzero body force has no steady balance without
        // walls. Emit a quiescent flow and record the condition.
        flow.mu = cfg.mu;
        flow.force = cfg.force;
        flow.u = ScalarField(cell.nx(), cell.ny(), 0.0);
        flow.v = ScalarField(cell.nx(), cell.ny(), 0.0);
        flow.p = ScalarField(cell.nx(), cell.ny(), 0.0);
        flow.blocked = true;
        skipped = true;
    } else {
        flow = solve_periodic_stokes(cell, cfg.mu, cfg.force, cfg.stokes_tol);
    }

    write_field_csv(joined(out_dir, artifacts::flow_u), flow.u, cell.hx(), cell.hy(), hash, "u");
    write_field_csv(joined(out_dir, artifacts::flow_v), flow.v, cell.hx(), cell.hy(), hash, "v");
    write_field_csv(joined(out_dir, artifacts::flow_p), flow.p, cell.hx(), cell.hy(), hash, "p");
    if (cfg.write_vtk_files) {
        const VectorField uc = interpolate_to_centers(flow, cell);
        write_vtk(joined(out_dir, "flow.vtk"), "periodic stokes flow",
                  {{"u", &uc.x}, {"v", &uc.y}, {"p", &flow.p}}, cell.hx(), cell.hy());
    }

    const StokesEnergy en = skipped ? StokesEnergy{} : stokes_energy(flow, cell);
    write_kv_csv(joined(out_dir, artifacts::stokes_summary), hash,
                 {{"mu", format_g17(flow.mu)},
                  {"force_x", format_g17(flow.force[0])},
                  {"force_y", format_g17(flow.force[1])},
                  {"div_max", format_g17(flow.div_max)},
                  {"blocked", flow.blocked ? "1" : "0"},
                  {"skipped_no_walls", skipped ? "1" : "0"},
                  {"schur_residual", format_g17(flow.report.residual)},
                  {"schur_iterations", std::to_string(flow.report.iterations)},
                  {"dissipation", format_g17(en.dissipation)},
                  {"work", format_g17(en.work)}});
}

void run_stage_tensors(const PipelineConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const std::string hash = cfg.hash();
    for (const char* f : {artifacts::mask, artifacts::cell_summary,
                          artifacts::flow_u, artifacts::flow_v, artifacts::flow_p,
                          artifacts::stokes_summary})
        require("tensors", out_dir, f);
    require("tensors", out_dir, artifacts::xi_phi_csv(1));
    require("tensors", out_dir, artifacts::xi_phi_csv(2));
    require("tensors", out_dir, artifacts::xi_w_csv(1));
    require("tensors", out_dir, artifacts::xi_w_csv(2));

    const CellGeometry cell = read_mask(joined(out_dir, artifacts::mask));
    auto cell_summary = read_kv_csv(joined(out_dir, artifacts::cell_summary));
    auto stokes_summary = read_kv_csv(joined(out_dir, artifacts::stokes_summary));

    std::array<CorrectorField, 2> xi_phi, xi_w;
    for (int k = 1; k <= 2; ++k) {
        CorrectorField f;
        f.k = k;
        f.values = read_field_csv(joined(out_dir, artifacts::xi_phi_csv(k)));
        f.gradient = corrector_gradient(cell, k, f.values);
        xi_phi[k - 1] = std::move(f);
        CorrectorField w;
        w.k = k;
        w.values = read_field_csv(joined(out_dir, artifacts::xi_w_csv(k)));
        w.gradient = corrector_gradient(cell, k, w.values);
        xi_w[k - 1] = std::move(w);
    }

    CellFlow flow;
    flow.mu = cfg.mu;
    flow.force = cfg.force;
    flow.u = read_field_csv(joined(out_dir, artifacts::flow_u));
    flow.v = read_field_csv(joined(out_dir, artifacts::flow_v));
    flow.p = read_field_csv(joined(out_dir, artifacts::flow_p));

    // Normalize the cell flow to unit mean speed before the dispersion
    // quadrature: pe_mic carries the physical velocity magnitude, the cell
    // field only its shape.
    double scale = 1.0;
    if (cfg.normalize_velocity) {
        const auto vbar = mean_velocity(flow, cell);
        const double speed = std::hypot(vbar[0], vbar[1]);
        if (speed > 1e-14) scale = 1.0 / speed;
        rescale_flow(flow, scale);
    }

    TensorReport rep;
    rep.config_hash = hash;
    rep.geometry_hash = cell.mask_hash();
    rep.velocity_scale = scale;
    auto& T = rep.tensors;
    T.porosity = cell.porosity();
    T.pe_mic = cfg.pe_mic;
    T.D = tensor_D(xi_phi, cell);
    T.M_phi = tensor_M(cfg.mobility, xi_phi, cell);
    T.M_w = tensor_M(cfg.mobility, xi_w, cell);
    T.C = tensor_C(flow, xi_phi, cfg.pe_mic, cell);
    T.v = drift_velocity(flow, cfg.pe_mic, cell);
    std::tie(T.g_tilde0, T.h_tilde0) = effective_wetting(cfg.g_tilde0, cfg.h_tilde0);

    auto opt = [&](std::map<std::string, std::string>& kv, const char* k) {
        return kv.count(k) ? std::strtod(kv[k].c_str(), nullptr) : 0.0;
    };
    rep.xi_residual[0] = opt(cell_summary, "xi1_residual");
    rep.xi_residual[1] = opt(cell_summary, "xi2_residual");
    rep.xi_w_residual[0] = opt(cell_summary, "xiw1_residual");
    rep.xi_w_residual[1] = opt(cell_summary, "xiw2_residual");
    rep.stokes_div_max = opt(stokes_summary, "div_max");
    rep.stokes_residual = opt(stokes_summary, "schur_residual");
    rep.stokes_blocked = opt(stokes_summary, "blocked") != 0.0;

    write_tensor_report(joined(out_dir, artifacts::tensor_report), rep);
}

void run_stage_macro(const PipelineConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const std::string hash = cfg.hash();
    require("macro", out_dir, artifacts::tensor_report);
    const TensorReport rep = read_tensor_report(joined(out_dir, artifacts::tensor_report));

    MacroConfig mc = cfg.macro_config();
    mc.tensors = rep.tensors;

    const MacroRun run = run_macro(mc);

    write_diagnostics_csv(joined(out_dir, artifacts::diagnostics), run.series, hash);
    for (std::size_t n = 0; n < run.snapshots.size(); ++n) {
        const auto& snap = run.snapshots[n];
        std::string path = joined(out_dir, artifacts::snapshot_csv(static_cast<int>(n)));
        {
            // field csv plus the snapshot time in the header comment
            std::string body = "# config=" + hash + " time=" + format_g17(snap.time) +
                               " nx=" + std::to_string(snap.phi.nx()) +
                               " ny=" + std::to_string(snap.phi.ny()) + "\n";
            body += "x,y,phi\n";
            for (int j = 0; j < snap.phi.ny(); ++j)
                for (int i = 0; i < snap.phi.nx(); ++i)
                    body += format_g17((i + 0.5) * mc.dx) + "," +
                            format_g17((j + 0.5) * mc.dx) + "," +
                            format_g17(snap.phi(i, j)) + "\n";
            write_text_file(path, body);
        }
        const auto lines = interface_position(snap.phi, mc.dx,
                                              mc.bc == MacroBC::FullyPeriodic, true);
        write_polylines_csv(joined(out_dir, artifacts::interface_csv(static_cast<int>(n))),
                            lines, hash);
    }
    if (run.aborted)
        throw Error("macro: integration aborted (" + run.abort_reason +
                    "); partial trajectory written to " + out_dir);
}

void run_pipeline(const PipelineConfig& cfg, const std::string& out_dir) {
    struct Stage {
        const char* name;
        void (*fn)(const PipelineConfig&, const std::string&);
    };
    const Stage stages[] = {
        {"cell", run_stage_cell},
        {"stokes", run_stage_stokes},
        {"tensors", run_stage_tensors},
        {"macro", run_stage_macro},
    };
    for (const auto& st : stages) {
        try {
            st.fn(cfg, out_dir);
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw Error(std::string(st.name) + ": " + e.what());
        }
    }
}

} // namespace porehom
