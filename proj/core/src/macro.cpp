#include "porehom/macro.hpp"

#include "porehom/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace porehom {

// ---------------------------------------------------------------------------
// Flux-form stencils
// ---------------------------------------------------------------------------

namespace {

inline int wrapi(int i, int n) { return ScalarField::mod(i, n); }

// y-gradient of s averaged onto the x-face between columns (il, ir) at row j.
inline double face_gy(const ScalarField& s, int il, int ir, int j, double dx) {
    const int ny = s.ny();
    const int jm = wrapi(j - 1, ny), jp = wrapi(j + 1, ny);
    const double gl = (s(il, jp) - s(il, jm)) / (2.0 * dx);
    const double gr = (s(ir, jp) - s(ir, jm)) / (2.0 * dx);
    return 0.5 * (gl + gr);
}

// x-gradient of s averaged onto the y-face between rows (jd, ju) at column i.
// periodic_x controls the column wraparound for the centered differences.
inline double face_gx(const ScalarField& s, int i, int jd, int ju, double dx, bool periodic_x) {
    const int nx = s.nx();
    int im = i - 1, ip = i + 1;
    if (periodic_x) {
        im = wrapi(im, nx);
        ip = wrapi(ip, nx);
    } else {
        im = std::max(im, 0);
        ip = std::min(ip, nx - 1);
    }
    const double denom = (ip - im) != 0 ? (ip - im) : 1;
    const double gd = (s(ip, jd) - s(im, jd)) / (denom * dx);
    const double gu = (s(ip, ju) - s(im, ju)) / (denom * dx);
    return 0.5 * (gd + gu);
}

} // namespace

// Work buffers so the rhs can fuse several tensor fluxes into one face array
// without repeated allocation.
struct MacroWork {
    explicit MacroWork(int nx, int ny)
        : w(nx, ny), fphi(nx, ny), fx(nx + 1, ny), fy(nx, ny + 1) {}
    ScalarField w;     // div(D grad phi)
    ScalarField fphi;  // f(phi)
    ScalarField fx;    // x-face flux accumulator
    ScalarField fy;    // y-face flux accumulator
};

namespace {

// Add scale * [T grad s] to the face accumulators.
void add_tensor_flux(const ScalarField& s, const Matrix2& T, double scale,
                     double dx, bool periodic_x, double bnd_grad, MacroWork& W) {
    const int nx = s.nx(), ny = s.ny();
    if (T.a11 == 0.0 && T.a12 == 0.0 && T.a21 == 0.0 && T.a22 == 0.0) return;
    const bool has_offdiag = (T.a12 != 0.0 || T.a21 != 0.0);

    // x-faces: face index i in [0, nx], between columns i-1 and i
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            double flux;
            if (periodic_x) {
                const int il = wrapi(i - 1, nx), ir = wrapi(i, nx);
                flux = T.a11 * (s(ir, j) - s(il, j)) / dx;
                if (has_offdiag) flux += T.a12 * face_gy(s, il, ir, j, dx);
            } else if (i == 0) {
                flux = T.a11 * (-bnd_grad);
            } else if (i == nx) {
                flux = T.a11 * (+bnd_grad);
            } else {
                flux = T.a11 * (s(i, j) - s(i - 1, j)) / dx;
                if (has_offdiag) flux += T.a12 * face_gy(s, i - 1, i, j, dx);
            }
            W.fx(i, j) += scale * flux;
        }
    }

    // y-faces: face index j in [0, ny], between rows j-1 and j (periodic)
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int j = 0; j < ny; ++j) { // face ny equals face 0; fill 0..ny-1 and mirror
        for (int i = 0; i < nx; ++i) {
            const int jd = wrapi(j - 1, ny), ju = j;
            double flux = T.a22 * (s(i, ju) - s(i, jd)) / dx;
            if (has_offdiag) flux += T.a21 * face_gx(s, i, jd, ju, dx, periodic_x);
            W.fy(i, j) += scale * flux;
        }
    }
    for (int i = 0; i < nx; ++i) W.fy(i, ny) = W.fy(i, 0);
}

void clear_faces(MacroWork& W) {
    W.fx.fill(0.0);
    W.fy.fill(0.0);
}

// out = div(faces); exact telescoping on periodic grids.
void face_divergence(const MacroWork& W, double dx, ScalarField& out) {
    const int nx = out.nx(), ny = out.ny();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            out(i, j) = (W.fx(i + 1, j) - W.fx(i, j)) / dx +
                        (W.fy(i, j + 1) - W.fy(i, j)) / dx;
}

double inlet_gate(double y, double cell_period) {
    if (cell_period <= 0.0) return 1.0;
    const double frac = y / cell_period - std::floor(y / cell_period);
    return frac < 0.5 ? 1.0 : 0.0;
}

void rhs_core(const MacroConfig& cfg, const ScalarField& phi, ScalarField& out, MacroWork& W) {
    const int nx = cfg.NX, ny = cfg.NY;
    const double dx = cfg.dx;
    const bool periodic_x = (cfg.bc == MacroBC::FullyPeriodic);
    const double p = cfg.tensors.porosity;
    const double lambda = cfg.fe.lambda;
    const double h0 = cfg.tensors.h_tilde0;

    // stage 1: w = div(D grad phi)
    clear_faces(W);
    add_tensor_flux(phi, cfg.tensors.D, 1.0, dx, periodic_x, h0, W);
    face_divergence(W, dx, W.w);

    // f(phi)
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            W.fphi(i, j) = cfg.fe.f(phi(i, j));

    // stage 2: total flux C grad phi + lambda M_phi grad f - (lambda/p) M_w grad(w - g0)
    clear_faces(W);
    add_tensor_flux(phi, cfg.tensors.C, 1.0, dx, periodic_x, h0, W);
    add_tensor_flux(W.fphi, cfg.tensors.M_phi, lambda, dx, periodic_x, 0.0, W);
    add_tensor_flux(W.w, cfg.tensors.M_w, -lambda / p, dx, periodic_x, 0.0, W);
    // grad(w - g0) = grad w for constant g0; the subtraction is a no-op here.

    if (!periodic_x) {
        // prescribed influx on the left boundary, gated at the cell period
        const double U = cfg.inlet_strength;
        for (int j = 0; j < ny; ++j) {
            const double y = (j + 0.5) * dx;
            W.fx(0, j) = -U * inlet_gate(y, cfg.cell_period);
        }
        for (int j = 0; j < ny; ++j) W.fx(nx, j) = 0.0; // zero-flux outflow
    }

    face_divergence(W, dx, out);
    const double ip = 1.0 / p;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            out(i, j) *= ip;
}

bool all_finite(const ScalarField& s) {
    for (double v : s.data())
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace

void macro_rhs(const MacroConfig& cfg, const MacroState& state, ScalarField& out) {
    if (!all_finite(state.phi))
        throw BlowupError("non-finite order parameter in rhs evaluation", state.time);
    if (out.nx() != cfg.NX || out.ny() != cfg.NY) out = ScalarField(cfg.NX, cfg.NY);
    MacroWork W(cfg.NX, cfg.NY);
    rhs_core(cfg, state.phi, out, W);
}

double stable_dt_bound(const MacroConfig& cfg) {
    const double dx2 = cfg.dx * cfg.dx;
    const double qmax = 4.0 / dx2; // largest symbol of -d^2/dx^2 per direction
    const auto& T = cfg.tensors;
    const double p = T.porosity;
    const double lambda = cfg.fe.lambda;

    // conservative bound on max over grid symbols of the quadratic form M q.q
    auto quad_bound = [&](const Matrix2& M) {
        const double mxx = std::abs(M.a11) + std::abs(M.a12);
        const double myy = std::abs(M.a22) + std::abs(M.a21);
        return (mxx + myy) * qmax;
    };

    const double s4 = lambda / (p * p) * quad_bound(T.M_w) * quad_bound(T.D);
    const double fpmax = cfg.fe.max_f_prime(1.2);
    const double s2 = (lambda * fpmax * quad_bound(T.M_phi) + quad_bound(T.C)) / p;
    const double total = s4 + s2;
    if (total <= 0.0) return 1.0;
    return 2.5 / total;
}

// ---------------------------------------------------------------------------
// Adaptive RK4
// ---------------------------------------------------------------------------

AdaptiveStepper::AdaptiveStepper(const MacroConfig& cfg)
    : cfg_(cfg), work_(new MacroWork(cfg.NX, cfg.NY)),
      rk_tol_(cfg.rk_tol), dt_min_(cfg.dt_min), dt_max_(cfg.dt_max),
      k1_(cfg.NX, cfg.NY), k2_(cfg.NX, cfg.NY), k3_(cfg.NX, cfg.NY), k4_(cfg.NX, cfg.NY),
      tmp_(cfg.NX, cfg.NY), big_(cfg.NX, cfg.NY), mid_(cfg.NX, cfg.NY), half_(cfg.NX, cfg.NY) {
    if (dt_max_ <= 0.0) dt_max_ = stable_dt_bound(cfg_);
    cfg_.dt_max = dt_max_;
    rhs_ = [this](const ScalarField& y, ScalarField& out) { rhs_core(cfg_, y, out, *work_); };
}

AdaptiveStepper::AdaptiveStepper(Rhs rhs, int nx, int ny, double rk_tol, double dt_min,
                                 double dt_max)
    : rhs_(std::move(rhs)), rk_tol_(rk_tol), dt_min_(dt_min), dt_max_(dt_max),
      overshoot_limit_(std::numeric_limits<double>::infinity()),
      k1_(nx, ny), k2_(nx, ny), k3_(nx, ny), k4_(nx, ny),
      tmp_(nx, ny), big_(nx, ny), mid_(nx, ny), half_(nx, ny) {}

AdaptiveStepper::~AdaptiveStepper() { delete work_; }

void AdaptiveStepper::rk4(const ScalarField& y, const ScalarField& k1, double dt, ScalarField& out) {
    const std::size_t n = y.size();
    const double* yd = y.data().data();
    const double* k1d = k1.data().data();

    for (std::size_t m = 0; m < n; ++m) tmp_.data()[m] = yd[m] + 0.5 * dt * k1d[m];
    rhs_(tmp_, k2_);
    for (std::size_t m = 0; m < n; ++m) tmp_.data()[m] = yd[m] + 0.5 * dt * k2_.data()[m];
    rhs_(tmp_, k3_);
    for (std::size_t m = 0; m < n; ++m) tmp_.data()[m] = yd[m] + dt * k3_.data()[m];
    rhs_(tmp_, k4_);
    if (out.size() != n) out = ScalarField(y.nx(), y.ny());
    for (std::size_t m = 0; m < n; ++m)
        out.data()[m] = yd[m] + dt / 6.0 * (k1d[m] + 2.0 * k2_.data()[m] +
                                            2.0 * k3_.data()[m] + k4_.data()[m]);
}

void AdaptiveStepper::rk4_fixed(MacroState& state, double dt) {
    rhs_(state.phi, k1_);
    rk4(state.phi, k1_, dt, big_);
    state.phi = big_;
    state.time += dt;
}

StepResult AdaptiveStepper::step(MacroState& state) {
    if (!all_finite(state.phi))
        throw BlowupError("non-finite order parameter entering step", state.time);

    double dt = state.dt;
    if (dt <= 0.0) dt = dt_max_ * 0.25;
    dt = std::min(dt, dt_max_);

    StepResult res;
    rhs_(state.phi, k1_); // shared between the full and first half step

    for (;;) {
        rk4(state.phi, k1_, dt, big_);
        rk4(state.phi, k1_, 0.5 * dt, mid_);
        rhs_(mid_, k2_); // stage-1 slope of the second half step
        {
            const std::size_t n = state.phi.size();
            const double* yd = mid_.data().data();
            const double hdt = 0.5 * dt;
            for (std::size_t m = 0; m < n; ++m) tmp_.data()[m] = yd[m] + 0.5 * hdt * k2_.data()[m];
            rhs_(tmp_, k3_);
            for (std::size_t m = 0; m < n; ++m) tmp_.data()[m] = yd[m] + 0.5 * hdt * k3_.data()[m];
            rhs_(tmp_, k4_);
            for (std::size_t m = 0; m < n; ++m) tmp_.data()[m] = yd[m] + hdt * k4_.data()[m];
            rhs_(tmp_, half_); // half_ temporarily holds the stage-4 slope
            for (std::size_t m = 0; m < n; ++m)
                half_.data()[m] = yd[m] + hdt / 6.0 * (k2_.data()[m] + 2.0 * k3_.data()[m] +
                                                       2.0 * k4_.data()[m] + half_.data()[m]);
        }

        double err = 0.0;
        bool finite = true;
        for (std::size_t m = 0; m < state.phi.size(); ++m) {
            const double d = big_.data()[m] - half_.data()[m];
            if (!std::isfinite(d)) { finite = false; break; }
            err = std::max(err, std::abs(d));
        }
        err /= 15.0;

        if (finite && err <= rk_tol_) {
            state.phi = half_;
            state.time += dt;
            res.dt_used = dt;
            res.error = err;
            double grow = (err > 0.0) ? 0.9 * std::pow(rk_tol_ / err, 0.2) : 5.0;
            grow = std::clamp(grow, 0.2, 5.0);
            state.dt = std::clamp(dt * grow, dt_min_, dt_max_);

            double mx = 0.0;
            for (double v : state.phi.data()) {
                if (!std::isfinite(v))
                    throw BlowupError("non-finite order parameter after step", state.time);
                mx = std::max(mx, std::abs(v));
            }
            if (mx > overshoot_limit_)
                throw BlowupError("order parameter overshoot |phi|=" + std::to_string(mx) +
                                  " exceeds " + std::to_string(overshoot_limit_), state.time);
            return res;
        }

        ++res.rejections;
        double shrink = finite && err > 0.0 ? 0.9 * std::pow(rk_tol_ / err, 0.2) : 0.1;
        shrink = std::clamp(shrink, 0.1, 0.7);
        dt *= shrink;
        if (dt < dt_min_)
            throw StiffnessError("adaptive step underflow: error " + std::to_string(err) +
                                 " above tolerance at dt_min", state.time, dt);
    }
}

// ---------------------------------------------------------------------------
// Diagnostics and interface extraction
// ---------------------------------------------------------------------------

double total_mass(const ScalarField& phi, double dx) {
    // Kahan summation: the mass-conservation check compares runs over many steps
    double sum = 0.0, comp = 0.0;
    for (double v : phi.data()) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum * dx * dx;
}

double discrete_energy(const ScalarField& phi, const MacroConfig& cfg) {
    const int nx = phi.nx(), ny = phi.ny();
    const double dx = cfg.dx;
    const double dbar = 0.5 * (cfg.tensors.D.a11 + cfg.tensors.D.a22);
    const double coef = cfg.fe.lambda * dbar / (2.0 * cfg.tensors.porosity);
    const bool periodic_x = (cfg.bc == MacroBC::FullyPeriodic);

    double sum = 0.0, comp = 0.0;
    auto acc = [&](double v) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    };

    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            acc(cfg.fe.lambda * cfg.fe.F(phi(i, j)));
    for (int j = 0; j < ny; ++j) {
        const int jp = wrapi(j + 1, ny);
        for (int i = 0; i < nx; ++i) {
            const double gy = (phi(i, jp) - phi(i, j)) / dx;
            acc(coef * gy * gy);
            const int ip = i + 1;
            if (ip < nx) {
                const double gx = (phi(ip, j) - phi(i, j)) / dx;
                acc(coef * gx * gx);
            } else if (periodic_x) {
                const double gx = (phi(0, j) - phi(i, j)) / dx;
                acc(coef * gx * gx);
            }
        }
    }
    return sum * dx * dx;
}

std::vector<std::vector<double>> row_zero_crossings(const ScalarField& phi, double dx,
                                                    bool periodic_x) {
    const int nx = phi.nx(), ny = phi.ny();
    std::vector<std::vector<double>> rows(ny);
    for (int j = 0; j < ny; ++j) {
        const int last = periodic_x ? nx : nx - 1;
        for (int i = 0; i < last; ++i) {
            const double a = phi(i, j);
            const double b = phi.wrap(i + 1, j);
            if ((a >= 0.0) == (b >= 0.0)) continue;
            const double t = a / (a - b);
            rows[j].push_back(((i + 0.5) + t) * dx);
        }
    }
    return rows;
}

Diagnostics diagnostics(const MacroState& state, const MacroConfig& cfg) {
    Diagnostics d;
    d.mass = total_mass(state.phi, cfg.dx);
    d.energy = discrete_energy(state.phi, cfg);
    auto rows = row_zero_crossings(state.phi, cfg.dx, cfg.bc == MacroBC::FullyPeriodic);
    double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
    int n = 0;
    for (auto& r : rows)
        for (double x : r) {
            sum += x;
            lo = std::min(lo, x);
            hi = std::max(hi, x);
            ++n;
        }
    d.crossing_count = n;
    if (n > 0) {
        d.front_mean_x = sum / n;
        d.front_amplitude = hi - lo;
    } else {
        d.front_mean_x = std::numeric_limits<double>::quiet_NaN();
        d.front_amplitude = 0.0;
    }
    return d;
}

// ---------------------------------------------------------------------------
// Marching squares
// ---------------------------------------------------------------------------

namespace {

// Edge key: horizontal edges (between (i,j)-(i+1,j)) get id 2*(j*nx+i),
// vertical edges (between (i,j)-(i,j+1)) get id 2*(j*nx+i)+1.
struct SegmentSoup {
    std::vector<std::array<long, 2>> segs; // pairs of edge ids
    std::map<long, std::array<double, 2>> points;
};

} // namespace

std::vector<Polyline> interface_position(const ScalarField& phi, double dx,
                                         bool periodic_x, bool periodic_y) {
    const int nx = phi.nx(), ny = phi.ny();
    SegmentSoup soup;

    auto node = [&](int i, int j) { return phi.wrap(i, j); };
    auto pos = [&](int i, int j) -> std::array<double, 2> {
        // unwrapped coordinates so wrap crossings land just outside the last node
        return {(i + 0.5) * dx, (j + 0.5) * dx};
    };
    auto hedge = [&](int i, int j) {
        return 2L * (static_cast<long>(wrapi(j, ny)) * nx + wrapi(i, nx));
    };
    auto vedge = [&](int i, int j) {
        return 2L * (static_cast<long>(wrapi(j, ny)) * nx + wrapi(i, nx)) + 1;
    };

    auto crossing = [&](double a, double b, std::array<double, 2> pa,
                        std::array<double, 2> pb) -> std::array<double, 2> {
        const double t = a / (a - b);
        return {pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])};
    };

    const int imax = periodic_x ? nx : nx - 1;
    const int jmax = periodic_y ? ny : ny - 1;
    for (int j = 0; j + 1 <= jmax; ++j) {
        for (int i = 0; i + 1 <= imax; ++i) {
            const double v00 = node(i, j), v10 = node(i + 1, j);
            const double v11 = node(i + 1, j + 1), v01 = node(i, j + 1);
            auto sgn = [](double v) { return v >= 0.0; };
            const bool s00 = sgn(v00), s10 = sgn(v10), s11 = sgn(v11), s01 = sgn(v01);
            if (s00 == s10 && s10 == s11 && s11 == s01) continue;

            struct Hit { long id; std::array<double, 2> pt; };
            std::vector<Hit> hits;
            if (s00 != s10) hits.push_back({hedge(i, j), crossing(v00, v10, pos(i, j), pos(i + 1, j))});
            if (s10 != s11) hits.push_back({vedge(i + 1, j), crossing(v10, v11, pos(i + 1, j), pos(i + 1, j + 1))});
            if (s01 != s11) hits.push_back({hedge(i, j + 1), crossing(v01, v11, pos(i, j + 1), pos(i + 1, j + 1))});
            if (s00 != s01) hits.push_back({vedge(i, j), crossing(v00, v01, pos(i, j), pos(i, j + 1))});

            for (auto& h : hits) soup.points[h.id] = h.pt;

            if (hits.size() == 2) {
                soup.segs.push_back({hits[0].id, hits[1].id});
            } else if (hits.size() == 4) {
                // saddle: disambiguate with the cell-center average
                const double c = 0.25 * (v00 + v10 + v11 + v01);
                // hits order: bottom, right, top, left
                if ((c >= 0.0) == s00) {
                    soup.segs.push_back({hits[0].id, hits[1].id}); // bottom-right
                    soup.segs.push_back({hits[2].id, hits[3].id}); // top-left
                } else {
                    soup.segs.push_back({hits[0].id, hits[3].id}); // bottom-left
                    soup.segs.push_back({hits[1].id, hits[2].id}); // top-right
                }
            }
        }
    }

    // chain segments into polylines via shared edge ids
    std::multimap<long, std::size_t> by_edge;
    for (std::size_t s = 0; s < soup.segs.size(); ++s) {
        by_edge.insert({soup.segs[s][0], s});
        by_edge.insert({soup.segs[s][1], s});
    }
    std::vector<char> used(soup.segs.size(), 0);
    std::vector<Polyline> out;

    auto next_unused_at = [&](long edge, std::size_t except) -> long {
        auto range = by_edge.equal_range(edge);
        for (auto it = range.first; it != range.second; ++it)
            if (!used[it->second] && it->second != except) return static_cast<long>(it->second);
        return -1;
    };

    for (std::size_t s0 = 0; s0 < soup.segs.size(); ++s0) {
        if (used[s0]) continue;
        // walk both directions from s0
        std::vector<long> edges;
        edges.push_back(soup.segs[s0][0]);
        edges.push_back(soup.segs[s0][1]);
        used[s0] = 1;
        // extend forward
        for (;;) {
            long nxt = next_unused_at(edges.back(), static_cast<std::size_t>(-1));
            if (nxt < 0) break;
            const auto& sg = soup.segs[nxt];
            used[nxt] = 1;
            edges.push_back(sg[0] == edges.back() ? sg[1] : sg[0]);
        }
        // extend backward
        for (;;) {
            long nxt = next_unused_at(edges.front(), static_cast<std::size_t>(-1));
            if (nxt < 0) break;
            const auto& sg = soup.segs[nxt];
            used[nxt] = 1;
            edges.insert(edges.begin(), sg[0] == edges.front() ? sg[1] : sg[0]);
        }
        Polyline pl;
        pl.reserve(edges.size());
        for (long e : edges) pl.push_back(soup.points[e]);
        out.push_back(std::move(pl));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

ScalarField initial_condition(const MacroConfig& cfg) {
    ScalarField phi(cfg.NX, cfg.NY);
    const double s = std::sqrt(2.0) * cfg.fe.eta;
    const double Lx = cfg.Lx();
    switch (cfg.ic) {
    case MacroIC::Uniform:
        phi.fill(cfg.ic_value);
        break;
    case MacroIC::Front: {
        const double x0 = cfg.ic_x0 * Lx;
        for (int j = 0; j < cfg.NY; ++j) {
            const double y = (j + 0.5) * cfg.dx;
            const double shift = cfg.ic_amplitude * std::sin(2.0 * M_PI * y / cfg.cell_period);
            for (int i = 0; i < cfg.NX; ++i) {
                const double x = (i + 0.5) * cfg.dx;
                phi(i, j) = -std::tanh((x - x0 - shift) / s);
            }
        }
        break;
    }
    case MacroIC::Strip: {
        const double a = 0.25 * Lx, b = 0.75 * Lx;
        for (int j = 0; j < cfg.NY; ++j) {
            const double y = (j + 0.5) * cfg.dx;
            const double shift = cfg.ic_amplitude * std::sin(2.0 * M_PI * y / cfg.cell_period);
            for (int i = 0; i < cfg.NX; ++i) {
                const double x = (i + 0.5) * cfg.dx;
                phi(i, j) = std::tanh((x - a - shift) / s) - std::tanh((x - b - shift) / s) - 1.0;
            }
        }
        break;
    }
    }
    return phi;
}

MacroRun run_macro(const MacroConfig& cfg) {
    MacroRun run;
    MacroState st;
    st.phi = initial_condition(cfg);
    st.time = 0.0;
    st.dt = 0.0;

    auto record = [&](const MacroState& s, double dt_used) {
        DiagnosticsRow row;
        row.time = s.time;
        row.dt = dt_used;
        row.mass = total_mass(s.phi, cfg.dx);
        row.energy = discrete_energy(s.phi, cfg);
        run.series.push_back(row);
    };

    run.snapshots.push_back({st.time, st.phi});
    record(st, 0.0);

    AdaptiveStepper stepper(cfg);
    double next_snap = cfg.snapshot_every > 0.0 ? cfg.snapshot_every
                                                : std::numeric_limits<double>::infinity();
    try {
        while (st.time < cfg.t_end) {
            // do not overshoot t_end
            if (st.dt > 0.0) st.dt = std::min(st.dt, cfg.t_end - st.time);
            else st.dt = 0.0;
            StepResult r = stepper.step(st);
            record(st, r.dt_used);
            if (st.time >= next_snap - 1e-12) {
                run.snapshots.push_back({st.time, st.phi});
                while (next_snap <= st.time + 1e-12) next_snap += cfg.snapshot_every;
            }
        }
    } catch (const BlowupError& e) {
        run.aborted = true;
        run.abort_reason = e.what();
    } catch (const StiffnessError& e) {
        run.aborted = true;
        run.abort_reason = e.what();
    }

    if (run.snapshots.empty() || run.snapshots.back().time != st.time)
        run.snapshots.push_back({st.time, st.phi});
    st.mass = total_mass(st.phi, cfg.dx);
    st.energy = discrete_energy(st.phi, cfg);
    run.final_state = st;
    return run;
}

} // namespace porehom
