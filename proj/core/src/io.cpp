#include "porehom/io.hpp"

#include "porehom/errors.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace porehom {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool file_exists(const std::string& path) {
    std::ifstream in(path);
    return in.good();
}

std::string fnv1a_hex(const std::string& text) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// --- mask -------------------------------------------------------------------

void write_mask(const std::string& path, const CellGeometry& cell,
                const std::string& config_hash) {
    std::string out = "# porehom mask nx=" + std::to_string(cell.nx()) +
                      " ny=" + std::to_string(cell.ny()) +
                      " config=" + config_hash + "\n";
    out += cell.to_text();
    write_text_file(path, out);
}

CellGeometry read_mask(const std::string& path) {
    return CellGeometry::from_text(read_text_file(path));
}

// --- fields ------------------------------------------------------------------

void write_field_csv(const std::string& path, const ScalarField& f,
                     double hx, double hy, const std::string& config_hash,
                     const std::string& value_name) {
    std::string out;
    out.reserve(f.size() * 40);
    out += "# config=" + config_hash + " nx=" + std::to_string(f.nx()) +
           " ny=" + std::to_string(f.ny()) + "\n";
    out += "x,y," + value_name + "\n";
    for (int j = 0; j < f.ny(); ++j)
        for (int i = 0; i < f.nx(); ++i) {
            out += format_g17((i + 0.5) * hx);
            out += ',';
            out += format_g17((j + 0.5) * hy);
            out += ',';
            out += format_g17(f(i, j));
            out += '\n';
        }
    write_text_file(path, out);
}

ScalarField read_field_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    int nx = -1, ny = -1;
    std::vector<double> vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            // header comment may carry the grid shape
            auto grab = [&](const std::string& key) -> int {
                auto p = line.find(key + "=");
                if (p == std::string::npos) return -1;
                return std::atoi(line.c_str() + p + key.size() + 1);
            };
            int a = grab("nx"), b = grab("ny");
            if (a > 0) nx = a;
            if (b > 0) ny = b;
            continue;
        }
        if (line.compare(0, 2, "x,") == 0) continue; // column header
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw Error("malformed field csv row in '" + path + "': " + line);
        vals.push_back(std::strtod(line.c_str() + c2 + 1, nullptr));
    }
    if (nx <= 0 || ny <= 0 || static_cast<std::size_t>(nx) * ny != vals.size())
        throw Error("field csv '" + path + "' missing or inconsistent grid shape");
    ScalarField f(nx, ny);
    f.data() = std::move(vals);
    return f;
}

void write_vtk(const std::string& path, const std::string& title,
               const std::vector<std::pair<std::string, const ScalarField*>>& fields,
               double hx, double hy) {
    if (fields.empty()) throw Error("write_vtk: no fields");
    const int nx = fields.front().second->nx();
    const int ny = fields.front().second->ny();
    std::string out;
    out += "# vtk DataFile Version 3.0\n";
    out += title + "\n";
    out += "ASCII\nDATASET STRUCTURED_POINTS\n";
    out += "DIMENSIONS " + std::to_string(nx) + " " + std::to_string(ny) + " 1\n";
    out += "ORIGIN " + format_g17(0.5 * hx) + " " + format_g17(0.5 * hy) + " 0\n";
    out += "SPACING " + format_g17(hx) + " " + format_g17(hy) + " 1\n";
    out += "POINT_DATA " + std::to_string(static_cast<long>(nx) * ny) + "\n";
    for (auto& [name, f] : fields) {
        out += "SCALARS " + name + " double 1\nLOOKUP_TABLE default\n";
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                out += format_g17((*f)(i, j));
                out += '\n';
            }
    }
    write_text_file(path, out);
}

// --- tensor report -----------------------------------------------------------

void write_tensor_report(const std::string& path, const TensorReport& rep) {
    const auto& T = rep.tensors;
    std::string out;
    out += "# porehom tensor report, config=" + rep.config_hash + "\n";
    out += "# convention: the drift inside the dispersion integrand is the plain\n";
    out += "# fluid mean of u; the single pe_mic prefactor sits outside the integral.\n";
    out += "# g_tilde0/h_tilde0 are configuration inputs, not surface quadratures.\n";
    out += "key,value\n";
    auto kv = [&](const std::string& k, double v) { out += k + "," + format_g17(v) + "\n"; };
    out += "config_hash," + rep.config_hash + "\n";
    out += "geometry_hash," + rep.geometry_hash + "\n";
    kv("porosity", T.porosity);
    kv("pe_mic", T.pe_mic);
    kv("d11", T.D.a11); kv("d12", T.D.a12); kv("d21", T.D.a21); kv("d22", T.D.a22);
    kv("c11", T.C.a11); kv("c12", T.C.a12); kv("c21", T.C.a21); kv("c22", T.C.a22);
    kv("mphi11", T.M_phi.a11); kv("mphi12", T.M_phi.a12);
    kv("mphi21", T.M_phi.a21); kv("mphi22", T.M_phi.a22);
    kv("mw11", T.M_w.a11); kv("mw12", T.M_w.a12);
    kv("mw21", T.M_w.a21); kv("mw22", T.M_w.a22);
    kv("v1", T.v[0]); kv("v2", T.v[1]);
    kv("g_tilde0", T.g_tilde0);
    kv("h_tilde0", T.h_tilde0);
    kv("velocity_scale", rep.velocity_scale);
    kv("xi1_residual", rep.xi_residual[0]);
    kv("xi2_residual", rep.xi_residual[1]);
    kv("xiw1_residual", rep.xi_w_residual[0]);
    kv("xiw2_residual", rep.xi_w_residual[1]);
    kv("stokes_div_max", rep.stokes_div_max);
    kv("stokes_residual", rep.stokes_residual);
    kv("stokes_blocked", rep.stokes_blocked ? 1.0 : 0.0);
    write_text_file(path, out);
}

TensorReport read_tensor_report(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    std::map<std::string, std::string> kv;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto c = line.find(',');
        if (c == std::string::npos) continue;
        kv[line.substr(0, c)] = line.substr(c + 1);
    }
    auto num = [&](const std::string& k) -> double {
        auto it = kv.find(k);
        if (it == kv.end()) throw Error("tensor report '" + path + "' missing key '" + k + "'");
        return std::strtod(it->second.c_str(), nullptr);
    };
    TensorReport rep;
    rep.config_hash = kv.count("config_hash") ? kv["config_hash"] : "";
    rep.geometry_hash = kv.count("geometry_hash") ? kv["geometry_hash"] : "";
    auto& T = rep.tensors;
    T.porosity = num("porosity");
    T.pe_mic = num("pe_mic");
    T.D = {num("d11"), num("d12"), num("d21"), num("d22")};
    T.C = {num("c11"), num("c12"), num("c21"), num("c22")};
    T.M_phi = {num("mphi11"), num("mphi12"), num("mphi21"), num("mphi22")};
    T.M_w = {num("mw11"), num("mw12"), num("mw21"), num("mw22")};
    T.v = {num("v1"), num("v2")};
    T.g_tilde0 = num("g_tilde0");
    T.h_tilde0 = num("h_tilde0");
    rep.velocity_scale = num("velocity_scale");
    rep.xi_residual[0] = num("xi1_residual");
    rep.xi_residual[1] = num("xi2_residual");
    rep.xi_w_residual[0] = num("xiw1_residual");
    rep.xi_w_residual[1] = num("xiw2_residual");
    rep.stokes_div_max = num("stokes_div_max");
    rep.stokes_residual = num("stokes_residual");
    rep.stokes_blocked = num("stokes_blocked") != 0.0;
    return rep;
}

// --- macro outputs -------------------------------------------------------------

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRow>& rows,
                           const std::string& config_hash) {
    std::string out = "# config=" + config_hash + "\n";
    out += "time,dt,mass,energy\n";
    for (const auto& r : rows) {
        out += format_g17(r.time);
        out += ',';
        out += format_g17(r.dt);
        out += ',';
        out += format_g17(r.mass);
        out += ',';
        out += format_g17(r.energy);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_polylines_csv(const std::string& path, const std::vector<Polyline>& lines,
                         const std::string& config_hash) {
    std::string out = "# config=" + config_hash + "\n";
    out += "component,x,y\n";
    for (std::size_t c = 0; c < lines.size(); ++c)
        for (const auto& pt : lines[c]) {
            out += std::to_string(c);
            out += ',';
            out += format_g17(pt[0]);
            out += ',';
            out += format_g17(pt[1]);
            out += '\n';
        }
    write_text_file(path, out);
}

} // namespace porehom
