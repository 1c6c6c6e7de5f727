#include "porehom/microcell.hpp"

#include "porehom/errors.hpp"

#include <cmath>
#include <functional>

namespace porehom {

namespace {

// Face gradient of a corrector in direction d (0=x,1=y) on the face between
// node (i,j) and its neighbor one step s=+-1 along d. Solid faces carry the
// imposed Neumann value d(xi_k)/dy_d = delta_dk regardless of orientation.
double face_gradient(const CellGeometry& cell, const ScalarField& xi, int k,
                     int i, int j, int d, int s) {
    const int nx = cell.nx(), ny = cell.ny();
    const double h = (d == 0) ? cell.hx() : cell.hy();
    const int ii = d == 0 ? ScalarField::mod(i + s, nx) : i;
    const int jj = d == 1 ? ScalarField::mod(j + s, ny) : j;
    if (!cell.fluid(ii, jj))
        return (d == k - 1) ? 1.0 : 0.0;
    return s > 0 ? (xi.wrap(ii, jj) - xi.wrap(i, j)) / h
                 : (xi.wrap(i, j) - xi.wrap(ii, jj)) / h;
}

SparseOperator assemble_fluid_laplacian(const CellGeometry& cell) {
    const int n = cell.fluid_count();
    const double ihx2 = 1.0 / (cell.hx() * cell.hx());
    const double ihy2 = 1.0 / (cell.hy() * cell.hy());
    SparseOperator A(n);
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int m = 0; m < n; ++m) {
        auto [i, j] = cell.fluid_node(m);
        for (int d = 0; d < 4; ++d) {
            const int ii = ScalarField::mod(i + di[d], cell.nx());
            const int jj = ScalarField::mod(j + dj[d], cell.ny());
            if (!cell.fluid(ii, jj)) continue;
            const double w = (d < 2) ? ihx2 : ihy2;
            A.add(m, m, w);
            A.add(m, cell.fluid_id(ii, jj), -w);
        }
    }
    A.finalize(true);
    return A;
}

ScalarField scatter_to_grid(const CellGeometry& cell, const std::vector<double>& x) {
    ScalarField out(cell.nx(), cell.ny(), 0.0);
    for (int m = 0; m < cell.fluid_count(); ++m) {
        auto [i, j] = cell.fluid_node(m);
        out(i, j) = x[m];
    }
    return out;
}

} // namespace

VectorField corrector_gradient(const CellGeometry& cell, int k, const ScalarField& values) {
    VectorField g(cell.nx(), cell.ny());
    for (int m = 0; m < cell.fluid_count(); ++m) {
        auto [i, j] = cell.fluid_node(m);
        const double gx = 0.5 * (face_gradient(cell, values, k, i, j, 0, +1) +
                                 face_gradient(cell, values, k, i, j, 0, -1));
        const double gy = 0.5 * (face_gradient(cell, values, k, i, j, 1, +1) +
                                 face_gradient(cell, values, k, i, j, 1, -1));
        g.x(i, j) = gx;
        g.y(i, j) = gy;
    }
    return g;
}

CorrectorField solve_corrector_phi(const CellGeometry& cell, int k, double tol) {
    if (k != 1 && k != 2) throw Error("corrector direction k must be 1 or 2");

    CorrectorField out;
    out.k = k;
    const int n = cell.fluid_count();

    // rhs: sum over solid faces of n_k / h (per unit cell volume)
    std::vector<double> b(n, 0.0);
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int m = 0; m < n; ++m) {
        auto [i, j] = cell.fluid_node(m);
        for (int d = 0; d < 4; ++d) {
            const int ii = ScalarField::mod(i + di[d], cell.nx());
            const int jj = ScalarField::mod(j + dj[d], cell.ny());
            if (cell.fluid(ii, jj)) continue;
            const double nk = (k == 1) ? di[d] : dj[d];
            const double h = (d < 2) ? cell.hx() : cell.hy();
            b[m] += nk / h;
        }
    }

    SparseOperator A = assemble_fluid_laplacian(cell);
    SolveOptions opts;
    opts.tol = tol;
    opts.singular = true;
    auto [x, rep] = solve_spd(A, b, opts);
    out.report = rep;
    out.values = scatter_to_grid(cell, x);
    out.gradient = corrector_gradient(cell, k, out.values);
    return out;
}

CorrectorField solve_corrector_w(const CellGeometry& cell, int k,
                                 const Matrix2& mobility, double lambda,
                                 const CorrectorField& xi_phi, double tol,
                                 const CorrectorWOptions& opts) {
    if (k != 1 && k != 2) throw Error("corrector direction k must be 1 or 2");
    if (xi_phi.k != k) throw Error("xi_w solve requires the xi_phi corrector for the same k");
    if (xi_phi.values.nx() != cell.nx() || xi_phi.values.ny() != cell.ny())
        throw Error("xi_phi corrector does not match the cell resolution");
    if (mobility.symmetry_defect() != 0.0 || !mobility.spd())
        throw Error("mobility tensor must be symmetric positive definite");

    const int n = cell.fluid_count();
    const int nx = cell.nx(), ny = cell.ny();
    const double ek[2] = {k == 1 ? 1.0 : 0.0, k == 2 ? 1.0 : 0.0};

    // Source field lambda * m (e_k - grad xi_phi) evaluated per face; the
    // normal part uses the face gradient, the tangential part averages the
    // adjacent node gradients.
    auto g_tilde_dot_n = [&](int i, int j, int d, int s) -> double {
        const int ii = d == 0 ? ScalarField::mod(i + s, nx) : i;
        const int jj = d == 1 ? ScalarField::mod(j + s, ny) : j;
        const double gn = face_gradient(cell, xi_phi.values, k, i, j, d, s);
        double gt;
        const int t = 1 - d;
        const double gt_c = (t == 0) ? xi_phi.gradient.x(i, j) : xi_phi.gradient.y(i, j);
        if (cell.fluid(ii, jj)) {
            const double gt_nb = (t == 0) ? xi_phi.gradient.x(ii, jj) : xi_phi.gradient.y(ii, jj);
            gt = 0.5 * (gt_c + gt_nb);
        } else {
            gt = gt_c;
        }
        double v[2];
        v[d] = ek[d] - gn;
        v[t] = ek[t] - gt;
        const std::array<double, 2> mv = mobility.apply({v[0], v[1]});
        return s * lambda * mv[d];
    };

    std::vector<double> b(n, 0.0);
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};

    std::array<double, 2> vbar{0.0, 0.0};
    VectorField uc;
    if (opts.add_velocity_fluctuation) {
        if (!opts.flow) throw Error("velocity fluctuation source requires a solved CellFlow");
        uc = interpolate_to_centers(*opts.flow, cell);
        vbar = mean_velocity(*opts.flow, cell);
    }

    for (int m = 0; m < n; ++m) {
        auto [i, j] = cell.fluid_node(m);
        for (int d = 0; d < 4; ++d) {
            const int ii = ScalarField::mod(i + di[d], nx);
            const int jj = ScalarField::mod(j + dj[d], ny);
            const int dir = (d < 2) ? 0 : 1;
            const int s = (d < 2) ? di[d] : dj[d];
            const double h = (dir == 0) ? cell.hx() : cell.hy();
            if (!cell.fluid(ii, jj)) {
                const double nk = (k == 1) ? di[d] : dj[d];
                b[m] += nk / h;   // delta_dk part of the matching flux
            } else {
                b[m] -= g_tilde_dot_n(i, j, dir, s) / h;
            }
        }
        if (opts.add_velocity_fluctuation)
            b[m] += opts.pe_mic * ((uc.x(i, j) - vbar[0]) + (uc.y(i, j) - vbar[1]));
    }

    SparseOperator A = assemble_fluid_laplacian(cell);
    SolveOptions sopts;
    sopts.tol = tol;
    sopts.singular = true;
    // The experimental source is not flux-balanced; let the projection absorb it.
    if (opts.add_velocity_fluctuation) sopts.compat_factor = 1e30;
    auto [x, rep] = solve_spd(A, b, sopts);

    CorrectorField out;
    out.k = k;
    out.report = rep;
    out.values = scatter_to_grid(cell, x);
    out.gradient = corrector_gradient(cell, k, out.values);
    return out;
}

// ---------------------------------------------------------------------------
// Periodic Stokes on the MAC layout
// ---------------------------------------------------------------------------

namespace {

struct MacMaps {
    std::vector<int> uid, vid;   // size nx*ny, -1 for inactive faces
    std::vector<std::pair<int, int>> unodes, vnodes;
    int nu = 0, nv = 0;

    static MacMaps build(const CellGeometry& cell) {
        const int nx = cell.nx(), ny = cell.ny();
        MacMaps m;
        m.uid.assign(static_cast<std::size_t>(nx) * ny, -1);
        m.vid.assign(static_cast<std::size_t>(nx) * ny, -1);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                if (cell.fluid(i, j) && cell.fluid_wrapped(i - 1, j)) {
                    m.uid[static_cast<std::size_t>(j) * nx + i] = m.nu++;
                    m.unodes.emplace_back(i, j);
                }
                if (cell.fluid(i, j) && cell.fluid_wrapped(i, j - 1)) {
                    m.vid[static_cast<std::size_t>(j) * nx + i] = m.nv++;
                    m.vnodes.emplace_back(i, j);
                }
            }
        return m;
    }

    int u_at(int i, int j, int nx, int ny) const {
        return uid[static_cast<std::size_t>(ScalarField::mod(j, ny)) * nx + ScalarField::mod(i, nx)];
    }
    int v_at(int i, int j, int nx, int ny) const {
        return vid[static_cast<std::size_t>(ScalarField::mod(j, ny)) * nx + ScalarField::mod(i, nx)];
    }
};

// Momentum operator -mu*Lap on one velocity component. Normal-direction
// neighbors that sit on a wall face hold value 0 (Dirichlet on the face);
// tangential neighbors across a wall edge use ghost reflection.
SparseOperator assemble_momentum(const CellGeometry& cell, const MacMaps& maps,
                                 bool x_component, double mu) {
    const int nx = cell.nx(), ny = cell.ny();
    const double ihx2 = mu / (cell.hx() * cell.hx());
    const double ihy2 = mu / (cell.hy() * cell.hy());
    const auto& nodes = x_component ? maps.unodes : maps.vnodes;
    SparseOperator A(static_cast<int>(nodes.size()));
    for (int m = 0; m < static_cast<int>(nodes.size()); ++m) {
        auto [i, j] = nodes[m];
        const int nbi[4] = {i + 1, i - 1, i, i};
        const int nbj[4] = {j, j, j + 1, j - 1};
        for (int d = 0; d < 4; ++d) {
            const bool along_x = (d < 2);
            const double w = along_x ? ihx2 : ihy2;
            const int id = x_component ? maps.u_at(nbi[d], nbj[d], nx, ny)
                                       : maps.v_at(nbi[d], nbj[d], nx, ny);
            const bool normal_dir = (x_component == along_x);
            if (id >= 0) {
                A.add(m, m, w);
                A.add(m, id, -w);
            } else if (normal_dir) {
                A.add(m, m, w);        // neighbor face sits on the wall, value 0
            } else {
                A.add(m, m, 2.0 * w);  // ghost reflection across the wall edge
            }
        }
    }
    A.finalize(true);
    return A;
}

struct StokesWork {
    const CellGeometry& cell;
    MacMaps maps;
    SparseOperator Au, Av;
    double inner_tol;

    // gradient of a cell-center field onto active faces
    void grad(const std::vector<double>& q, std::vector<double>& gu, std::vector<double>& gv) const {
        const int nx = cell.nx(), ny = cell.ny();
        gu.assign(maps.nu, 0.0);
        gv.assign(maps.nv, 0.0);
        for (int m = 0; m < maps.nu; ++m) {
            auto [i, j] = maps.unodes[m];
            const int cl = cell.fluid_id(ScalarField::mod(i - 1, nx), j);
            const int cr = cell.fluid_id(i, j);
            gu[m] = (q[cr] - q[cl]) / cell.hx();
        }
        for (int m = 0; m < maps.nv; ++m) {
            auto [i, j] = maps.vnodes[m];
            const int cd = cell.fluid_id(i, ScalarField::mod(j - 1, ny));
            const int cu = cell.fluid_id(i, j);
            gv[m] = (q[cu] - q[cd]) / cell.hy();
        }
    }

    // divergence of active-face velocities at fluid cells
    void div(const std::vector<double>& uu, const std::vector<double>& vv,
             std::vector<double>& out) const {
        const int nx = cell.nx(), ny = cell.ny();
        out.assign(cell.fluid_count(), 0.0);
        for (int m = 0; m < cell.fluid_count(); ++m) {
            auto [i, j] = cell.fluid_node(m);
            const int uw = maps.u_at(i, j, nx, ny);
            const int ue = maps.u_at(i + 1, j, nx, ny);
            const int vs = maps.v_at(i, j, nx, ny);
            const int vn = maps.v_at(i, j + 1, nx, ny);
            double dv = 0.0;
            dv += ((ue >= 0 ? uu[ue] : 0.0) - (uw >= 0 ? uu[uw] : 0.0)) / cell.hx();
            dv += ((vn >= 0 ? vv[vn] : 0.0) - (vs >= 0 ? vv[vs] : 0.0)) / cell.hy();
            out[m] = dv;
        }
    }

    std::vector<double> inv_A(const SparseOperator& A, const std::vector<double>& rhs,
                              double tol) const {
        if (rhs.empty()) return {};
        SolveOptions o;
        // keep the request above the attainable CG floor on large grids
        const double floor = 8.0 * 2.220446049250313e-16 * std::sqrt(double(A.dimension()) + 1.0);
        o.tol = std::max(tol, floor);
        o.max_iter = std::max(2000, 120 * static_cast<int>(std::sqrt(double(A.dimension()) + 1.0)));
        return solve_spd(A, rhs, o).first;
    }
};

// Matrix-free CG on the pressure Schur complement G^T A^{-1} G (SPD on the
// mean-zero subspace).
std::pair<std::vector<double>, SolveReport>
schur_cg(const StokesWork& W, const std::vector<double>& rhs, double tol, int max_iter) {
    const int n = static_cast<int>(rhs.size());
    std::vector<double> p(n, 0.0), r(rhs), z(n), q(n), Sq(n);
    std::vector<double> gu, gv, du;

    auto project = [&](std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= n;
        for (double& x : v) x -= mean;
    };
    auto apply_S = [&](const std::vector<double>& in, std::vector<double>& out) {
        W.grad(in, gu, gv);
        std::vector<double> zu = W.inv_A(W.Au, gu, W.inner_tol);
        std::vector<double> zv = W.inv_A(W.Av, gv, W.inner_tol);
        W.div(zu, zv, out);
        for (double& x : out) x = -x;  // S = -D A^{-1} G  is SPD
    };

    project(r);
    double rr = 0.0;
    for (double x : r) rr += x * x;
    const double target = tol * std::sqrt(rr);
    SolveReport rep;
    if (std::sqrt(rr) == 0.0) {
        rep.converged = true;
        return {p, rep};
    }
    q = r;
    double rz = rr;
    int it = 0;
    while (std::sqrt(rr) > target && it < max_iter) {
        apply_S(q, Sq);
        project(Sq);
        double qSq = 0.0;
        for (int i = 0; i < n; ++i) qSq += q[i] * Sq[i];
        if (qSq <= 0.0) break;
        const double alpha = rz / qSq;
        for (int i = 0; i < n; ++i) p[i] += alpha * q[i];
        for (int i = 0; i < n; ++i) r[i] -= alpha * Sq[i];
        project(r);
        double rz_new = 0.0;
        for (double x : r) rz_new += x * x;
        const double beta = rz_new / rz;
        rz = rz_new;
        rr = rz_new;
        for (int i = 0; i < n; ++i) q[i] = r[i] + beta * q[i];
        ++it;
    }
    project(p);
    rep.iterations = it;
    rep.residual = std::sqrt(rr);
    rep.converged = std::sqrt(rr) <= target * (1.0 + 1e-12);
    return {p, rep};
}

} // namespace

CellFlow solve_periodic_stokes(const CellGeometry& cell, double mu,
                               const std::array<double, 2>& force, double tol) {
    if (mu <= 0.0) throw Error("viscosity must be positive");

    CellFlow flow;
    flow.mu = mu;
    flow.force = force;
    flow.u = ScalarField(cell.nx(), cell.ny(), 0.0);
    flow.v = ScalarField(cell.nx(), cell.ny(), 0.0);
    flow.p = ScalarField(cell.nx(), cell.ny(), 0.0);

    const double fmag = std::sqrt(force[0] * force[0] + force[1] * force[1]);
    if (fmag == 0.0) {
        flow.report.converged = true;
        return flow;
    }
    if (cell.fluid_count() == cell.nx() * cell.ny())
        throw GeometryError("periodic Stokes flow with nonzero force needs solid walls "
                            "to balance the forcing (empty cell has no steady state)");

    StokesWork W{cell, MacMaps::build(cell),
                 SparseOperator(), SparseOperator(), std::min(1e-13, tol * 1e-2)};
    W.Au = assemble_momentum(cell, W.maps, true, mu);
    W.Av = assemble_momentum(cell, W.maps, false, mu);

    const std::vector<double> fu(W.maps.nu, force[0]);
    const std::vector<double> fv(W.maps.nv, force[1]);

    // rhs of the Schur system: G^T A^{-1} f = -D A^{-1} f
    std::vector<double> au = W.inv_A(W.Au, fu, W.inner_tol);
    std::vector<double> av = W.inv_A(W.Av, fv, W.inner_tol);
    std::vector<double> rhs;
    W.div(au, av, rhs);
    for (double& x : rhs) x = -x;

    auto [pvec, rep] = schur_cg(W, rhs, tol, 400);
    flow.report = rep;
    if (!rep.converged)
        throw IterationLimitError("pressure Schur iteration failed to converge (residual " +
                                  std::to_string(rep.residual) + ")", rep);

    // velocity from the converged pressure
    std::vector<double> gu, gv;
    W.grad(pvec, gu, gv);
    std::vector<double> ru(W.maps.nu), rv(W.maps.nv);
    for (int m = 0; m < W.maps.nu; ++m) ru[m] = force[0] - gu[m];
    for (int m = 0; m < W.maps.nv; ++m) rv[m] = force[1] - gv[m];
    std::vector<double> uu = W.inv_A(W.Au, ru, std::min(1e-13, tol * 1e-2));
    std::vector<double> vv = W.inv_A(W.Av, rv, std::min(1e-13, tol * 1e-2));

    for (int m = 0; m < W.maps.nu; ++m) {
        auto [i, j] = W.maps.unodes[m];
        flow.u(i, j) = uu[m];
    }
    for (int m = 0; m < W.maps.nv; ++m) {
        auto [i, j] = W.maps.vnodes[m];
        flow.v(i, j) = vv[m];
    }
    for (int m = 0; m < cell.fluid_count(); ++m) {
        auto [i, j] = cell.fluid_node(m);
        flow.p(i, j) = pvec[m];
    }

    flow.div_max = divergence_max(flow, cell);

    const auto vbar = mean_velocity(flow, cell);
    const double along = (vbar[0] * force[0] + vbar[1] * force[1]) / fmag;
    flow.blocked = std::abs(along) < 1e-10 * fmag / mu;
    return flow;
}

std::array<double, 2> mean_velocity(const CellFlow& flow, const CellGeometry& cell) {
    double su = 0.0, sv = 0.0;
    int n = 0;
    for (int m = 0; m < cell.fluid_count(); ++m) {
        auto [i, j] = cell.fluid_node(m);
        su += 0.5 * (flow.u(i, j) + flow.u.wrap(i + 1, j));
        sv += 0.5 * (flow.v(i, j) + flow.v.wrap(i, j + 1));
        ++n;
    }
    if (n == 0) return {0.0, 0.0};
    return {su / n, sv / n};
}

std::array<double, 2> drift_velocity(const CellFlow& flow, double pe_mic,
                                     const CellGeometry& cell) {
    auto m = mean_velocity(flow, cell);
    return {pe_mic * m[0], pe_mic * m[1]};
}

VectorField interpolate_to_centers(const CellFlow& flow, const CellGeometry& cell) {
    VectorField out(cell.nx(), cell.ny());
    for (int m = 0; m < cell.fluid_count(); ++m) {
        auto [i, j] = cell.fluid_node(m);
        out.x(i, j) = 0.5 * (flow.u(i, j) + flow.u.wrap(i + 1, j));
        out.y(i, j) = 0.5 * (flow.v(i, j) + flow.v.wrap(i, j + 1));
    }
    return out;
}

void rescale_flow(CellFlow& flow, double factor) {
    for (double& x : flow.u.data()) x *= factor;
    for (double& x : flow.v.data()) x *= factor;
    for (double& x : flow.p.data()) x *= factor;
}

double divergence_max(const CellFlow& flow, const CellGeometry& cell) {
    double dmax = 0.0;
    for (int m = 0; m < cell.fluid_count(); ++m) {
        auto [i, j] = cell.fluid_node(m);
        const double d = (flow.u.wrap(i + 1, j) - flow.u(i, j)) / cell.hx() +
                         (flow.v.wrap(i, j + 1) - flow.v(i, j)) / cell.hy();
        dmax = std::max(dmax, std::abs(d));
    }
    return dmax;
}

StokesEnergy stokes_energy(const CellFlow& flow, const CellGeometry& cell) {
    MacMaps maps = MacMaps::build(cell);
    SparseOperator Au = assemble_momentum(cell, maps, true, flow.mu);
    SparseOperator Av = assemble_momentum(cell, maps, false, flow.mu);

    std::vector<double> uu(maps.nu), vv(maps.nv);
    for (int m = 0; m < maps.nu; ++m) {
        auto [i, j] = maps.unodes[m];
        uu[m] = flow.u(i, j);
    }
    for (int m = 0; m < maps.nv; ++m) {
        auto [i, j] = maps.vnodes[m];
        vv[m] = flow.v(i, j);
    }

    const double vol = cell.cell_volume();
    std::vector<double> tmp;
    StokesEnergy e;
    Au.apply(uu, tmp);
    for (int m = 0; m < maps.nu; ++m) e.dissipation += uu[m] * tmp[m] * vol;
    Av.apply(vv, tmp);
    for (int m = 0; m < maps.nv; ++m) e.dissipation += vv[m] * tmp[m] * vol;
    for (int m = 0; m < maps.nu; ++m) e.work += flow.force[0] * uu[m] * vol;
    for (int m = 0; m < maps.nv; ++m) e.work += flow.force[1] * vv[m] * vol;
    return e;
}

} // namespace porehom
