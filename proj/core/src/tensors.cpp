#include "porehom/tensors.hpp"

#include "porehom/errors.hpp"

namespace porehom {

namespace {
void check_match(const CorrectorField& xi, const CellGeometry& cell, int expect_k) {
    if (xi.values.nx() != cell.nx() || xi.values.ny() != cell.ny())
        throw Error("corrector grid does not match the cell resolution");
    if (xi.k != expect_k)
        throw Error("corrector direction index mismatch: expected k=" +
                    std::to_string(expect_k) + ", got k=" + std::to_string(xi.k));
}
} // namespace

Matrix2 tensor_D(const std::array<CorrectorField, 2>& xi_phi, const CellGeometry& cell) {
    check_match(xi_phi[0], cell, 1);
    check_match(xi_phi[1], cell, 2);
    const double vol = cell.cell_volume();
    Matrix2 D;
    double acc[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (int m = 0; m < cell.fluid_count(); ++m) {
        auto [i, j] = cell.fluid_node(m);
        for (int k = 0; k < 2; ++k) {
            const double gx = xi_phi[k].gradient.x(i, j);
            const double gy = xi_phi[k].gradient.y(i, j);
            acc[0][k] += ((k == 0 ? 1.0 : 0.0) - gx);
            acc[1][k] += ((k == 1 ? 1.0 : 0.0) - gy);
        }
    }
    D.a11 = acc[0][0] * vol;
    D.a12 = acc[0][1] * vol;
    D.a21 = acc[1][0] * vol;
    D.a22 = acc[1][1] * vol;
    return D;
}

Matrix2 tensor_M(const Matrix2& mobility, const std::array<CorrectorField, 2>& xi,
                 const CellGeometry& cell) {
    check_match(xi[0], cell, 1);
    check_match(xi[1], cell, 2);
    if (mobility.symmetry_defect() != 0.0 || !mobility.spd())
        throw Error("mobility tensor must be symmetric positive definite");
    const double vol = cell.cell_volume();
    double acc[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (int m = 0; m < cell.fluid_count(); ++m) {
        auto [i, j] = cell.fluid_node(m);
        for (int k = 0; k < 2; ++k) {
            const double g[2] = {xi[k].gradient.x(i, j), xi[k].gradient.y(i, j)};
            for (int i2 = 0; i2 < 2; ++i2) {
                double term = mobility(i2, k);
                for (int j2 = 0; j2 < 2; ++j2) term -= mobility(i2, j2) * g[j2];
                acc[i2][k] += term;
            }
        }
    }
    Matrix2 M;
    M.a11 = acc[0][0] * vol;
    M.a12 = acc[0][1] * vol;
    M.a21 = acc[1][0] * vol;
    M.a22 = acc[1][1] * vol;
    return M;
}

Matrix2 tensor_C(const CellFlow& flow, const std::array<CorrectorField, 2>& xi_phi,
                 double pe_mic, const CellGeometry& cell) {
    check_match(xi_phi[0], cell, 1);
    check_match(xi_phi[1], cell, 2);
    if (flow.u.nx() != cell.nx() || flow.u.ny() != cell.ny())
        throw Error("flow grid does not match the cell resolution");

    const VectorField uc = interpolate_to_centers(flow, cell);
    const auto vbar = mean_velocity(flow, cell);
    const double vol = cell.cell_volume();

    double c11 = 0.0, c22 = 0.0;
    for (int m = 0; m < cell.fluid_count(); ++m) {
        auto [i, j] = cell.fluid_node(m);
        c11 += (uc.x(i, j) - vbar[0]) * xi_phi[0].values(i, j);
        c22 += (uc.y(i, j) - vbar[1]) * xi_phi[1].values(i, j);
    }
    Matrix2 C;
    C.a11 = pe_mic * c11 * vol;
    C.a22 = pe_mic * c22 * vol;
    C.a12 = C.a21 = 0.0; // definitional: delta_ik factor in the integrand
    return C;
}

std::pair<double, double> effective_wetting(double g_tilde0, double h_tilde0) {
    return {g_tilde0, h_tilde0};
}

} // namespace porehom
