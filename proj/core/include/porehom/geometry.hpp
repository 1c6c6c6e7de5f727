// geometry.hpp
// Periodic reference-cell geometry as a Cartesian fluid/solid mask.
//
// The cell is nondimensionalized to [0,1]^2. Node (i,j) is the pixel with
// center ((i+0.5)*hx, (j+0.5)*hy); the mask is periodic in both directions.
// Geometry objects are immutable after construction and safe to share
// read-only across concurrent solver runs.

#ifndef POREHOM_GEOMETRY_HPP
#define POREHOM_GEOMETRY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace porehom {

/// Axis-aligned face between a fluid node and a solid neighbor.
/// The normal points from fluid into solid (outward normal of the pore space).
struct BoundaryFace {
    int i, j;            // fluid node owning the face
    double x, y;         // face midpoint
    int nx, ny;          // unit normal, one of (+-1,0),(0,+-1)
    double length;       // face length (hy for x-normal faces, hx for y-normal)
};

class CellGeometry {
public:
    /// Build from an explicit mask (true = fluid). Throws GeometryError if the
    /// fluid phase is empty, disconnected, or does not wrap in the flow
    /// (y1) direction. An all-fluid mask is allowed (empty cell).
    CellGeometry(int nx, int ny, std::vector<uint8_t> fluid_mask);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double hx() const { return 1.0 / nx_; }
    double hy() const { return 1.0 / ny_; }
    double cell_volume() const { return hx() * hy(); }

    bool fluid(int i, int j) const { return mask_[idx(i, j)] != 0; }
    /// Periodic-wraparound query.
    bool fluid_wrapped(int i, int j) const;

    int fluid_count() const { return fluid_count_; }
    double porosity() const { return porosity_; }

    /// Dense index of a fluid node in [0, fluid_count), or -1 for solid nodes.
    int fluid_id(int i, int j) const { return fluid_id_[idx(i, j)]; }
    /// Inverse map: (i,j) of the n-th fluid node.
    std::pair<int, int> fluid_node(int n) const { return fluid_nodes_[n]; }

    /// All fluid->solid faces with outward (into solid) unit normals.
    std::vector<BoundaryFace> boundary_faces() const;

    /// FNV-1a hash of the mask bytes; pins the geometry in reports.
    std::string mask_hash() const;

    /// Plain-text mask: ny rows of 0/1 characters, top row = j=ny-1.
    std::string to_text() const;
    static CellGeometry from_text(const std::string& text);

private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(j) * nx_ + i;
    }
    void validate() const;

    int nx_ = 0, ny_ = 0;
    std::vector<uint8_t> mask_;
    std::vector<int> fluid_id_;
    std::vector<std::pair<int, int>> fluid_nodes_;
    int fluid_count_ = 0;
    double porosity_ = 0.0;
};

/// Wavy channel of constant vertical cross-section (one sinusoid period).
/// Centerline y = 0.5 + amplitude*(sin(2 pi x) + skew*sin(4 pi x + pi/4));
/// porosity ~= cross_section. amplitude = 0 gives a straight channel;
/// cross_section = 1 the empty cell. The phase-shifted second harmonic keeps
/// the channel free of the mirror and inversion symmetries a plain sine has;
/// either symmetry would cancel the dispersion integrals identically.
CellGeometry build_channel_cell(double amplitude, double cross_section, int resolution,
                                double skew = 0.5);

/// All-fluid cell (no obstacle).
CellGeometry build_empty_cell(int resolution);

} // namespace porehom

#endif
