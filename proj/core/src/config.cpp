#include "porehom/config.hpp"

#include "porehom/errors.hpp"
#include "porehom/io.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace porehom {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || trim(end) != "")
        throw ConfigError("expected a number, got '" + v + "'", line);
    return d;
}

int parse_int(const std::string& v, int line) {
    const double d = parse_double(v, line);
    if (d != std::floor(d))
        throw ConfigError("expected an integer, got '" + v + "'", line);
    return static_cast<int>(d);
}

bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("expected a boolean, got '" + v + "'", line);
}

std::vector<double> parse_list(const std::string& v, int line) {
    std::vector<double> out;
    std::string item;
    std::istringstream ss(v);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_double(item, line));
    }
    return out;
}

} // namespace

FreeEnergy PipelineConfig::free_energy() const {
    FreeEnergy fe;
    if (energy_kind == "double_well") {
        fe = double_well(eta);
    } else {
        std::vector<double> a(2 * energy_r, 0.0);
        for (std::size_t i = 0; i < energy_a.size() && i + 1 < a.size(); ++i)
            a[i + 1] = energy_a[i];
        fe = make_free_energy(energy_r, a, lambda, eta);
    }
    fe.lambda = lambda;
    fe.eta = eta;
    return fe;
}

MacroConfig PipelineConfig::macro_config() const {
    MacroConfig mc;
    mc.fe = free_energy();
    mc.NX = cells_x * points_per_cell;
    mc.NY = cells_y * points_per_cell;
    mc.dx = dx;
    mc.cell_period = points_per_cell * dx;
    mc.bc = (macro_bc == "periodic") ? MacroBC::FullyPeriodic : MacroBC::InletDriven;
    mc.inlet_strength = inlet_strength;
    mc.rk_tol = rk_tol;
    mc.dt_min = dt_min;
    mc.dt_max = dt_max;
    mc.t_end = t_end;
    mc.snapshot_every = snapshot_every;
    mc.ic = macro_ic == "strip" ? MacroIC::Strip
          : macro_ic == "uniform" ? MacroIC::Uniform : MacroIC::Front;
    mc.ic_amplitude = ic_amplitude;
    mc.ic_x0 = ic_x0;
    mc.ic_value = ic_value;
    return mc;
}

std::string PipelineConfig::serialize() const {
    std::string s;
    auto kv = [&](const char* k, const std::string& v) { s += std::string(k) + "=" + v + "\n"; };
    auto kd = [&](const char* k, double v) { kv(k, format_g17(v)); };
    auto ki = [&](const char* k, int v) { kv(k, std::to_string(v)); };
    kv("geometry.kind", geometry_kind);
    kd("geometry.amplitude", amplitude);
    kd("geometry.cross_section", cross_section);
    ki("geometry.resolution", resolution);
    kv("geometry.mask_file", mask_file);
    kd("stokes.mu", mu);
    kd("stokes.force_x", force[0]);
    kd("stokes.force_y", force[1]);
    kd("stokes.tol", stokes_tol);
    kv("stokes.normalize_velocity", normalize_velocity ? "true" : "false");
    kd("mobility.m11", mobility.a11);
    kd("mobility.m12", mobility.a12);
    kd("mobility.m22", mobility.a22);
    kv("energy.kind", energy_kind);
    kd("energy.eta", eta);
    kd("energy.lambda", lambda);
    ki("energy.r", energy_r);
    {
        std::string list;
        for (double v : energy_a) list += (list.empty() ? "" : ",") + format_g17(v);
        kv("energy.a", list);
    }
    kd("transport.pe_mic", pe_mic);
    kd("transport.g_tilde0", g_tilde0);
    kd("transport.h_tilde0", h_tilde0);
    kd("cell.tol", cell_tol);
    kv("cell.xi_w_velocity_source", xi_w_velocity_source ? "true" : "false");
    ki("macro.cells_x", cells_x);
    ki("macro.cells_y", cells_y);
    ki("macro.points_per_cell", points_per_cell);
    kd("macro.dx", dx);
    kv("macro.bc", macro_bc);
    kd("macro.inlet_strength", inlet_strength);
    kd("macro.rk_tol", rk_tol);
    kd("macro.t_end", t_end);
    kd("macro.snapshot_every", snapshot_every);
    kv("macro.ic", macro_ic);
    kd("macro.ic_amplitude", ic_amplitude);
    kd("macro.ic_x0", ic_x0);
    kd("macro.ic_value", ic_value);
    kd("macro.dt_min", dt_min);
    kd("macro.dt_max", dt_max);
    kv("output.write_vtk", write_vtk_files ? "true" : "false");
    return s;
}

std::string PipelineConfig::hash() const { return fnv1a_hex(serialize()); }

PipelineConfig parse_config(const std::string& text) {
    PipelineConfig cfg;

    using Setter = std::function<void(PipelineConfig&, const std::string&, int)>;
    static const std::map<std::string, Setter> setters = {
        {"geometry.kind", [](PipelineConfig& c, const std::string& v, int ln) {
             if (v != "channel" && v != "empty" && v != "import")
                 throw ConfigError("geometry kind must be channel|empty|import", ln);
             c.geometry_kind = v;
         }},
        {"geometry.amplitude", [](PipelineConfig& c, const std::string& v, int ln) {
             c.amplitude = parse_double(v, ln);
             if (c.amplitude < 0.0) throw ConfigError("amplitude must be >= 0", ln);
         }},
        {"geometry.cross_section", [](PipelineConfig& c, const std::string& v, int ln) {
             c.cross_section = parse_double(v, ln);
             if (c.cross_section <= 0.0 || c.cross_section > 1.0)
                 throw ConfigError("cross_section must lie in (0,1]", ln);
         }},
        {"geometry.resolution", [](PipelineConfig& c, const std::string& v, int ln) {
             c.resolution = parse_int(v, ln);
             if (c.resolution < 16) throw ConfigError("resolution must be >= 16", ln);
         }},
        {"geometry.mask_file", [](PipelineConfig& c, const std::string& v, int) {
             c.mask_file = v;
         }},
        {"stokes.mu", [](PipelineConfig& c, const std::string& v, int ln) {
             c.mu = parse_double(v, ln);
             if (c.mu <= 0.0) throw ConfigError("mu must be positive", ln);
         }},
        {"stokes.force_x", [](PipelineConfig& c, const std::string& v, int ln) {
             c.force[0] = parse_double(v, ln);
         }},
        {"stokes.force_y", [](PipelineConfig& c, const std::string& v, int ln) {
             c.force[1] = parse_double(v, ln);
         }},
        {"stokes.tol", [](PipelineConfig& c, const std::string& v, int ln) {
             c.stokes_tol = parse_double(v, ln);
             if (c.stokes_tol <= 0.0) throw ConfigError("stokes tol must be positive", ln);
         }},
        {"stokes.normalize_velocity", [](PipelineConfig& c, const std::string& v, int ln) {
             c.normalize_velocity = parse_bool(v, ln);
         }},
        {"mobility.m11", [](PipelineConfig& c, const std::string& v, int ln) {
             c.mobility.a11 = parse_double(v, ln);
         }},
        {"mobility.m12", [](PipelineConfig& c, const std::string& v, int ln) {
             c.mobility.a12 = c.mobility.a21 = parse_double(v, ln);
         }},
        {"mobility.m22", [](PipelineConfig& c, const std::string& v, int ln) {
             c.mobility.a22 = parse_double(v, ln);
         }},
        {"energy.kind", [](PipelineConfig& c, const std::string& v, int ln) {
             if (v != "double_well" && v != "polynomial")
                 throw ConfigError("energy kind must be double_well|polynomial", ln);
             c.energy_kind = v;
         }},
        {"energy.eta", [](PipelineConfig& c, const std::string& v, int ln) {
             c.eta = parse_double(v, ln);
             if (c.eta <= 0.0) throw ConfigError("eta must be positive", ln);
         }},
        {"energy.lambda", [](PipelineConfig& c, const std::string& v, int ln) {
             c.lambda = parse_double(v, ln);
             if (c.lambda <= 0.0) throw ConfigError("lambda must be positive", ln);
         }},
        {"energy.r", [](PipelineConfig& c, const std::string& v, int ln) {
             c.energy_r = parse_int(v, ln);
             if (c.energy_r < 2) throw ConfigError("energy r must be >= 2", ln);
         }},
        {"energy.a", [](PipelineConfig& c, const std::string& v, int ln) {
             c.energy_a = parse_list(v, ln);
         }},
        {"transport.pe_mic", [](PipelineConfig& c, const std::string& v, int ln) {
             c.pe_mic = parse_double(v, ln);
             if (c.pe_mic < 0.0) throw ConfigError("pe_mic must be >= 0", ln);
         }},
        {"transport.g_tilde0", [](PipelineConfig& c, const std::string& v, int ln) {
             c.g_tilde0 = parse_double(v, ln);
         }},
        {"transport.h_tilde0", [](PipelineConfig& c, const std::string& v, int ln) {
             c.h_tilde0 = parse_double(v, ln);
         }},
        {"cell.tol", [](PipelineConfig& c, const std::string& v, int ln) {
             c.cell_tol = parse_double(v, ln);
             if (c.cell_tol <= 0.0) throw ConfigError("cell tol must be positive", ln);
         }},
        {"cell.xi_w_velocity_source", [](PipelineConfig& c, const std::string& v, int ln) {
             c.xi_w_velocity_source = parse_bool(v, ln);
         }},
        {"macro.cells_x", [](PipelineConfig& c, const std::string& v, int ln) {
             c.cells_x = parse_int(v, ln);
             if (c.cells_x < 1) throw ConfigError("cells_x must be >= 1", ln);
         }},
        {"macro.cells_y", [](PipelineConfig& c, const std::string& v, int ln) {
             c.cells_y = parse_int(v, ln);
             if (c.cells_y < 1) throw ConfigError("cells_y must be >= 1", ln);
         }},
        {"macro.points_per_cell", [](PipelineConfig& c, const std::string& v, int ln) {
             c.points_per_cell = parse_int(v, ln);
             if (c.points_per_cell < 2) throw ConfigError("points_per_cell must be >= 2", ln);
         }},
        {"macro.dx", [](PipelineConfig& c, const std::string& v, int ln) {
             c.dx = parse_double(v, ln);
             if (c.dx <= 0.0) throw ConfigError("dx must be positive", ln);
         }},
        {"macro.bc", [](PipelineConfig& c, const std::string& v, int ln) {
             if (v != "inlet" && v != "periodic")
                 throw ConfigError("macro bc must be inlet|periodic", ln);
             c.macro_bc = v;
         }},
        {"macro.inlet_strength", [](PipelineConfig& c, const std::string& v, int ln) {
             c.inlet_strength = parse_double(v, ln);
         }},
        {"macro.rk_tol", [](PipelineConfig& c, const std::string& v, int ln) {
             c.rk_tol = parse_double(v, ln);
             if (c.rk_tol <= 0.0) throw ConfigError("rk_tol must be positive", ln);
         }},
        {"macro.t_end", [](PipelineConfig& c, const std::string& v, int ln) {
             c.t_end = parse_double(v, ln);
             if (c.t_end < 0.0) throw ConfigError("t_end must be >= 0", ln);
         }},
        {"macro.snapshot_every", [](PipelineConfig& c, const std::string& v, int ln) {
             c.snapshot_every = parse_double(v, ln);
             if (c.snapshot_every < 0.0) throw ConfigError("snapshot_every must be >= 0", ln);
         }},
        {"macro.ic", [](PipelineConfig& c, const std::string& v, int ln) {
             if (v != "front" && v != "strip" && v != "uniform")
                 throw ConfigError("macro ic must be front|strip|uniform", ln);
             c.macro_ic = v;
         }},
        {"macro.ic_amplitude", [](PipelineConfig& c, const std::string& v, int ln) {
             c.ic_amplitude = parse_double(v, ln);
         }},
        {"macro.ic_x0", [](PipelineConfig& c, const std::string& v, int ln) {
             c.ic_x0 = parse_double(v, ln);
             if (c.ic_x0 < 0.0 || c.ic_x0 > 1.0)
                 throw ConfigError("ic_x0 is a fraction of the domain length", ln);
         }},
        {"macro.ic_value", [](PipelineConfig& c, const std::string& v, int ln) {
             c.ic_value = parse_double(v, ln);
         }},
        {"macro.dt_min", [](PipelineConfig& c, const std::string& v, int ln) {
             c.dt_min = parse_double(v, ln);
             if (c.dt_min <= 0.0) throw ConfigError("dt_min must be positive", ln);
         }},
        {"macro.dt_max", [](PipelineConfig& c, const std::string& v, int ln) {
             c.dt_max = parse_double(v, ln);
             if (c.dt_max < 0.0) throw ConfigError("dt_max must be >= 0 (0 = auto)", ln);
         }},
        {"output.write_vtk", [](PipelineConfig& c, const std::string& v, int ln) {
             c.write_vtk_files = parse_bool(v, ln);
         }},
    };

    std::istringstream in(text);
    std::string line, section;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("malformed section header '" + line + "'", ln);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError("empty section name", ln);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value, got '" + line + "'", ln);
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", ln);
        const std::string full = section.empty() ? key : section + "." + key;
        auto it = setters.find(full);
        if (it == setters.end())
            throw ConfigError("unknown key '" + full + "'", ln);
        it->second(cfg, value, ln);
    }

    // cross-field checks
    if (cfg.geometry_kind == "channel" && cfg.amplitude + cfg.cross_section > 1.0 + 1e-12)
        throw ConfigError("geometry: amplitude + cross_section must not exceed 1");
    if (cfg.geometry_kind == "import" && cfg.mask_file.empty())
        throw ConfigError("geometry kind=import requires mask_file");
    if (!cfg.mobility.spd())
        throw ConfigError("mobility tensor must be symmetric positive definite");
    if (auto bad = validate_pf(cfg.free_energy()))
        throw ConfigError("free energy violates the polynomial assumptions: " + *bad);
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    if (path.empty()) return parse_config("");
    return parse_config(read_text_file(path));
}

} // namespace porehom
