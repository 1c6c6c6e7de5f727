#include "porehom/geometry.hpp"

#include "porehom/errors.hpp"

#include <cmath>
#include <cstdio>
#include <queue>
#include <sstream>

namespace porehom {

CellGeometry::CellGeometry(int nx, int ny, std::vector<uint8_t> fluid_mask)
    : nx_(nx), ny_(ny), mask_(std::move(fluid_mask)) {
    if (nx_ < 2 || ny_ < 2)
        throw GeometryError("cell resolution must be at least 2x2");
    if (mask_.size() != static_cast<std::size_t>(nx_) * ny_)
        throw GeometryError("mask size does not match nx*ny");

    fluid_id_.assign(mask_.size(), -1);
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i)
            if (mask_[idx(i, j)]) {
                fluid_id_[idx(i, j)] = fluid_count_++;
                fluid_nodes_.emplace_back(i, j);
            }
    porosity_ = static_cast<double>(fluid_count_) / (static_cast<double>(nx_) * ny_);
    validate();
}

bool CellGeometry::fluid_wrapped(int i, int j) const {
    i = (i % nx_ + nx_) % nx_;
    j = (j % ny_ + ny_) % ny_;
    return fluid(i, j);
}

void CellGeometry::validate() const {
    if (fluid_count_ == 0)
        throw GeometryError("all-solid mask: no fluid phase");
    if (fluid_count_ == nx_ * ny_)
        return; // empty cell, nothing to check

    // Fluid must be edge-connected under periodic wraparound.
    std::vector<uint8_t> seen(mask_.size(), 0);
    std::queue<std::pair<int, int>> q;
    q.push(fluid_nodes_.front());
    seen[idx(fluid_nodes_.front().first, fluid_nodes_.front().second)] = 1;
    int reached = 1;
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    while (!q.empty()) {
        auto [i, j] = q.front();
        q.pop();
        for (int d = 0; d < 4; ++d) {
            int ii = (i + di[d] + nx_) % nx_;
            int jj = (j + dj[d] + ny_) % ny_;
            if (mask_[idx(ii, jj)] && !seen[idx(ii, jj)]) {
                seen[idx(ii, jj)] = 1;
                ++reached;
                q.push({ii, jj});
            }
        }
    }
    if (reached != fluid_count_)
        throw GeometryError("fluid phase is disconnected");

    // The pore space must span the cell in the flow (y1) direction: every
    // column needs at least one fluid node, otherwise the channel is walled off.
    for (int i = 0; i < nx_; ++i) {
        bool any = false;
        for (int j = 0; j < ny_; ++j)
            if (mask_[idx(i, j)]) { any = true; break; }
        if (!any)
            throw GeometryError("fluid phase does not wrap in the flow direction (solid column at i=" +
                                std::to_string(i) + ")");
    }
}

std::vector<BoundaryFace> CellGeometry::boundary_faces() const {
    std::vector<BoundaryFace> faces;
    const double dx = hx(), dy = hy();
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i < nx_; ++i) {
            if (!mask_[idx(i, j)]) continue;
            const double xc = (i + 0.5) * dx, yc = (j + 0.5) * dy;
            for (int d = 0; d < 4; ++d) {
                int ii = (i + di[d] + nx_) % nx_;
                int jj = (j + dj[d] + ny_) % ny_;
                if (mask_[idx(ii, jj)]) continue;
                BoundaryFace f;
                f.i = i;
                f.j = j;
                f.nx = di[d];
                f.ny = dj[d];
                f.x = xc + 0.5 * di[d] * dx;
                f.y = yc + 0.5 * dj[d] * dy;
                f.length = (d < 2) ? dy : dx;
                faces.push_back(f);
            }
        }
    }
    return faces;
}

std::string CellGeometry::mask_hash() const {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](uint8_t byte) {
        h ^= byte;
        h *= 1099511628211ull;
    };
    mix(static_cast<uint8_t>(nx_ & 0xff));
    mix(static_cast<uint8_t>((nx_ >> 8) & 0xff));
    mix(static_cast<uint8_t>(ny_ & 0xff));
    mix(static_cast<uint8_t>((ny_ >> 8) & 0xff));
    for (uint8_t b : mask_) mix(b);
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string CellGeometry::to_text() const {
    std::string out;
    out.reserve(static_cast<std::size_t>(ny_) * (nx_ + 1));
    for (int j = ny_ - 1; j >= 0; --j) {
        for (int i = 0; i < nx_; ++i)
            out.push_back(mask_[idx(i, j)] ? '1' : '0');
        out.push_back('\n');
    }
    return out;
}

CellGeometry CellGeometry::from_text(const std::string& text) {
    std::vector<std::string> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        if (line.empty()) continue;
        rows.push_back(line);
    }
    if (rows.empty())
        throw GeometryError("mask text contains no rows");
    const int ny = static_cast<int>(rows.size());
    const int nx = static_cast<int>(rows.front().size());
    std::vector<uint8_t> mask(static_cast<std::size_t>(nx) * ny, 0);
    for (int r = 0; r < ny; ++r) {
        if (static_cast<int>(rows[r].size()) != nx)
            throw GeometryError("mask rows have inconsistent length");
        const int j = ny - 1 - r; // first text row is the top of the cell
        for (int i = 0; i < nx; ++i) {
            char c = rows[r][i];
            if (c != '0' && c != '1')
                throw GeometryError(std::string("mask contains invalid character '") + c + "'");
            mask[static_cast<std::size_t>(j) * nx + i] = (c == '1');
        }
    }
    return CellGeometry(nx, ny, std::move(mask));
}

CellGeometry build_channel_cell(double amplitude, double cross_section, int resolution,
                                double skew) {
    if (amplitude < 0.0)
        throw GeometryError("channel amplitude must be >= 0");
    if (cross_section <= 0.0 || cross_section > 1.0)
        throw GeometryError("channel cross_section must lie in (0,1]");
    if (amplitude + cross_section > 1.0 + 1e-12)
        throw GeometryError("amplitude + cross_section must not exceed the cell height");
    if (resolution < 16)
        throw GeometryError("channel resolution must be at least 16");

    // A pure sine centerline is mirror-symmetric about x=1/4 and any zero-
    // phase harmonic sum is inversion-symmetric through (0, 1/2); both
    // symmetries force the dispersion integrals to cancel exactly. The
    // phase-shifted second harmonic removes them.
    const int n = resolution;
    std::vector<uint8_t> mask(static_cast<std::size_t>(n) * n, 0);
    const double half = 0.5 * cross_section;
    for (int i = 0; i < n; ++i) {
        const double x = (i + 0.5) / n;
        const double yc = 0.5 + amplitude * (std::sin(2.0 * M_PI * x) +
                                             skew * std::sin(4.0 * M_PI * x + 0.25 * M_PI));
        for (int j = 0; j < n; ++j) {
            const double y = (j + 0.5) / n;
            double dy = y - yc;
            dy -= std::floor(dy + 0.5); // periodic distance in y
            if (std::abs(dy) <= half)
                mask[static_cast<std::size_t>(j) * n + i] = 1;
        }
    }
    return CellGeometry(n, n, std::move(mask));
}

CellGeometry build_empty_cell(int resolution) {
    return CellGeometry(resolution, resolution,
                        std::vector<uint8_t>(static_cast<std::size_t>(resolution) * resolution, 1));
}

} // namespace porehom
