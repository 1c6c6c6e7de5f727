#include "doctest.h"

#include "porehom/errors.hpp"
#include "porehom/macro.hpp"

#include <cmath>
#include <random>

using namespace porehom;

namespace {

// scalar-tensor periodic setup used across these tests
MacroConfig scalar_config(int nx, int ny, double dx, double d = 1.0, double m = 1.0,
                          double porosity = 1.0, double eta = 0.02) {
    MacroConfig cfg;
    cfg.NX = nx;
    cfg.NY = ny;
    cfg.dx = dx;
    cfg.bc = MacroBC::FullyPeriodic;
    cfg.fe = double_well(eta);
    cfg.fe.lambda = eta * eta;
    cfg.tensors.D = Matrix2::scaled_identity(d);
    cfg.tensors.M_phi = Matrix2::scaled_identity(m);
    cfg.tensors.M_w = Matrix2::scaled_identity(m);
    cfg.tensors.C = Matrix2{};
    cfg.tensors.porosity = porosity;
    return cfg;
}

ScalarField random_smooth_field(int nx, int ny, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    ScalarField f(nx, ny);
    for (int modes = 0; modes < 5; ++modes) {
        const double ax = uni(rng), ay = uni(rng), amp = 0.15 * uni(rng);
        const int kx = 1 + modes, ky = 1 + (modes * 2) % 4;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                f(i, j) += amp * std::sin(2.0 * M_PI * (kx * (i + 0.5) / nx + ax)) *
                           std::cos(2.0 * M_PI * (ky * (j + 0.5) / ny + ay));
    }
    return f;
}

} // namespace

TEST_CASE("rhs of a constant field vanishes") {
    MacroConfig cfg = scalar_config(32, 16, 0.01);
    MacroState st;
    st.phi = ScalarField(32, 16, 0.37);
    ScalarField out;
    macro_rhs(cfg, st, out);
    for (double v : out.data()) CHECK(v == 0.0);
}

TEST_CASE("rhs sums to zero on a fully periodic grid (flux form telescopes)") {
    MacroConfig cfg = scalar_config(48, 32, 0.01, 0.7, 1.3, 0.46);
    cfg.tensors.C = Matrix2::diag(0.015, 0.023);
    MacroState st;
    st.phi = random_smooth_field(48, 32, 99u);
    ScalarField out;
    macro_rhs(cfg, st, out);
    double sum = 0.0, mag = 0.0;
    for (double v : out.data()) {
        sum += v;
        mag = std::max(mag, std::abs(v));
    }
    CHECK(std::abs(sum) <= 1e-12 * std::max(1.0, mag * out.size()));
}

TEST_CASE("rhs is translation-equivariant on periodic grids") {
    MacroConfig cfg = scalar_config(40, 24, 0.01, 0.4, 1.0, 0.46);
    MacroState st;
    st.phi = random_smooth_field(40, 24, 3u);
    ScalarField out;
    macro_rhs(cfg, st, out);

    const int si = 7, sj = 5;
    MacroState shifted;
    shifted.phi = ScalarField(40, 24);
    for (int j = 0; j < 24; ++j)
        for (int i = 0; i < 40; ++i)
            shifted.phi(i, j) = st.phi.wrap(i + si, j + sj);
    ScalarField out_shifted;
    macro_rhs(cfg, shifted, out_shifted);
    for (int j = 0; j < 24; ++j)
        for (int i = 0; i < 40; ++i)
            CHECK(out_shifted(i, j) == out.wrap(i + si, j + sj));
}

TEST_CASE("linear dispersion matches the analytic growth rate") {
    // sigma(q) = (lambda m / p) (-f'(0) q^2 - (d/p) q^4)
    const int nx = 256, ny = 4;
    const double dx = 0.01;
    MacroConfig cfg = scalar_config(nx, ny, dx, 0.8, 1.1, 0.46);
    const double L = nx * dx;
    const double lambda = cfg.fe.lambda, m = 1.1, d = 0.8, p = 0.46;
    const double fp0 = cfg.fe.f_prime(0.0);

    for (int n : {2, 3, 4, 5, 6}) {
        const double q = 2.0 * M_PI * n / L;
        REQUIRE(q * dx <= 0.3);
        const double eps = 1e-6;
        MacroState plus, minus;
        plus.phi = ScalarField(nx, ny);
        minus.phi = ScalarField(nx, ny);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double s = eps * std::sin(q * (i + 0.5) * dx);
                plus.phi(i, j) = s;
                minus.phi(i, j) = -s;
            }
        ScalarField rp, rm;
        macro_rhs(cfg, plus, rp);
        macro_rhs(cfg, minus, rm);
        // antisymmetrized projection onto the mode kills even nonlinear terms
        double num = 0.0, den = 0.0;
        for (int i = 0; i < nx; ++i) {
            const double s = std::sin(q * (i + 0.5) * dx);
            num += 0.5 * (rp(i, 0) - rm(i, 0)) * s;
            den += eps * s * s;
        }
        const double sigma_measured = num / den;
        const double sigma_analytic = lambda * m / p * (-fp0 * q * q - (d / p) * q * q * q * q);
        CHECK(std::abs(sigma_measured - sigma_analytic) <= 0.01 * std::abs(sigma_analytic));
    }
}

TEST_CASE("adaptive RK4 integrates y' = -y to 1e-7 accuracy") {
    AdaptiveStepper stepper(
        [](const ScalarField& y, ScalarField& out) {
            if (out.size() != y.size()) out = ScalarField(y.nx(), y.ny());
            for (std::size_t m = 0; m < y.size(); ++m) out.data()[m] = -y.data()[m];
        },
        1, 1, 1e-8, 1e-12, 0.5);
    MacroState st;
    st.phi = ScalarField(1, 1, 1.0);
    while (st.time < 1.0) {
        st.dt = st.dt > 0.0 ? std::min(st.dt, 1.0 - st.time) : 0.0;
        stepper.step(st);
    }
    CHECK(st.time == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(st.phi(0, 0) - std::exp(-1.0)) <= 1e-7);
}

TEST_CASE("rhs == 0 keeps the state and grows dt to dt_max") {
    AdaptiveStepper stepper(
        [](const ScalarField& y, ScalarField& out) {
            if (out.size() != y.size()) out = ScalarField(y.nx(), y.ny());
            out.fill(0.0);
        },
        4, 4, 1e-8, 1e-12, 0.125);
    MacroState st;
    st.phi = ScalarField(4, 4, 0.5);
    for (int k = 0; k < 6; ++k) stepper.step(st);
    CHECK(st.dt == doctest::Approx(0.125));
    for (double v : st.phi.data()) CHECK(v == 0.5);
}

TEST_CASE("RK4 self-convergence order on a linear diffusion mode is >= 3.8") {
    // mode k=5 on a 16-point grid: growth rate sigma ~ 85, so dt*sigma ~ 0.4
    // at 8 steps gives a measurable (far-from-roundoff) one-step error
    const int nx = 16;
    MacroConfig cfg = scalar_config(nx, 4, 0.1, 1.0, 1.0, 1.0, 0.05);
    MacroState ref;
    ref.phi = ScalarField(nx, 4);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < nx; ++i)
            ref.phi(i, j) = 1e-4 * std::sin(2.0 * M_PI * 5.0 * (i + 0.5) / nx);

    const double T = 0.04;
    auto integrate = [&](int steps) {
        AdaptiveStepper stepper(cfg);
        MacroState st = ref;
        const double dt = T / steps;
        for (int k = 0; k < steps; ++k) stepper.rk4_fixed(st, dt);
        return st.phi;
    };
    ScalarField exact = integrate(512); // reference at tiny dt
    auto err = [&](const ScalarField& a) {
        double e = 0.0;
        for (std::size_t m = 0; m < a.size(); ++m)
            e = std::max(e, std::abs(a.data()[m] - exact.data()[m]));
        return e;
    };
    const double e1 = err(integrate(16));
    const double e2 = err(integrate(32));
    REQUIRE(e1 > 1e-13); // test validity: errors above roundoff
    CHECK(std::log2(e1 / e2) >= 3.8);
}

TEST_CASE("fully periodic strip run: mass conserved, energy non-increasing") {
    MacroConfig cfg = scalar_config(64, 32, 0.01, 1.0, 1.0, 0.46);
    cfg.ic = MacroIC::Strip;
    cfg.ic_amplitude = 0.01;
    cfg.cell_period = 0.08;
    cfg.rk_tol = 1e-7;
    cfg.t_end = 2e-3;
    cfg.snapshot_every = 0.0;
    MacroRun run = run_macro(cfg);
    REQUIRE(!run.aborted);
    REQUIRE(run.series.size() > 5);
    const double m0 = run.series.front().mass;
    double e_prev = run.series.front().energy;
    for (const auto& row : run.series) {
        CHECK(std::abs(row.mass - m0) <= 1e-9 * std::abs(m0) + 1e-12);
        CHECK(row.energy <= e_prev + 1e-12 * std::abs(e_prev));
        e_prev = row.energy;
    }
}

TEST_CASE("t_end = 0 returns the initial condition") {
    MacroConfig cfg = scalar_config(16, 8, 0.01);
    cfg.ic = MacroIC::Uniform;
    cfg.ic_value = 0.25;
    cfg.t_end = 0.0;
    MacroRun run = run_macro(cfg);
    CHECK(run.snapshots.size() == 1);
    for (double v : run.snapshots.front().phi.data()) CHECK(v == 0.25);
}

TEST_CASE("blowup in the state is reported with a time stamp") {
    MacroConfig cfg = scalar_config(8, 8, 0.01);
    MacroState st;
    st.phi = ScalarField(8, 8, 0.1);
    st.phi(3, 3) = std::numeric_limits<double>::quiet_NaN();
    st.time = 0.375;
    ScalarField out;
    try {
        macro_rhs(cfg, st, out);
        FAIL("expected BlowupError");
    } catch (const BlowupError& e) {
        CHECK(e.time() == 0.375);
    }
}

// --- interface extraction ----------------------------------------------------

TEST_CASE("interface: vertical line at x=0.5") {
    const int n = 40;
    ScalarField phi(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            phi(i, j) = (i + 0.5) / n - 0.5;
    auto lines = interface_position(phi, 1.0 / n);
    REQUIRE(lines.size() == 1);
    CHECK(lines.front().size() >= static_cast<std::size_t>(n - 1));
    for (const auto& pt : lines.front())
        CHECK(std::abs(pt[0] - 0.5) <= 1e-12);
}

TEST_CASE("interface: sin(2 pi x) crosses at 0.5 and at the periodic seam") {
    const int n = 64;
    ScalarField phi(n, 4);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < n; ++i)
            phi(i, j) = std::sin(2.0 * M_PI * (i + 0.5) / n);
    auto rows = row_zero_crossings(phi, 1.0 / n, true);
    for (const auto& r : rows) {
        REQUIRE(r.size() == 2);
        // each crossing near 0.5 or near 1.0 (the seam), O(dx^2) accurate
        for (double x : r) {
            const bool near_half = std::abs(x - 0.5) <= 1e-3;
            const bool near_seam = std::abs(x - 1.0) <= 1e-3;
            CHECK((near_half || near_seam));
        }
    }
}

TEST_CASE("interface: single-phase field yields nothing") {
    ScalarField phi(16, 16, 0.8);
    CHECK(interface_position(phi, 0.1).empty());
    auto rows = row_zero_crossings(phi, 0.1, true);
    for (auto& r : rows) CHECK(r.empty());
}

// --- diagnostics ---------------------------------------------------------------

TEST_CASE("diagnostics: uniform phi=1 has zero double-well energy") {
    MacroConfig cfg = scalar_config(24, 12, 0.01);
    MacroState st;
    st.phi = ScalarField(24, 12, 1.0);
    Diagnostics d = diagnostics(st, cfg);
    CHECK(std::abs(d.energy) <= 1e-14);
    CHECK(d.crossing_count == 0);
}

TEST_CASE("diagnostics: flat and sinusoidal front amplitudes") {
    MacroConfig cfg = scalar_config(128, 32, 0.01);
    cfg.bc = MacroBC::InletDriven;
    const double dx = cfg.dx;

    SUBCASE("flat tanh front") {
        MacroState st;
        st.phi = ScalarField(cfg.NX, cfg.NY);
        for (int j = 0; j < cfg.NY; ++j)
            for (int i = 0; i < cfg.NX; ++i)
                st.phi(i, j) = -std::tanh(((i + 0.5) * dx - 0.6) / 0.05);
        Diagnostics d = diagnostics(st, cfg);
        CHECK(d.front_amplitude <= dx);
        CHECK(std::abs(d.front_mean_x - 0.6) <= dx);
    }
    SUBCASE("sinusoidal front of amplitude A has modulation 2A") {
        const double A = 0.04;
        MacroState st;
        st.phi = ScalarField(cfg.NX, cfg.NY);
        for (int j = 0; j < cfg.NY; ++j) {
            const double shift = A * std::sin(2.0 * M_PI * (j + 0.5) / cfg.NY);
            for (int i = 0; i < cfg.NX; ++i)
                st.phi(i, j) = -std::tanh(((i + 0.5) * dx - 0.6 - shift) / 0.05);
        }
        Diagnostics d = diagnostics(st, cfg);
        CHECK(std::abs(d.front_amplitude - 2.0 * A) <= 2.0 * dx);
    }
}

// --- reduction to the standard Cahn-Hilliard equation ---------------------------

namespace {

// independent reference: plain nested 5-point Laplacians, scalar coefficients
void reference_ch_rhs(const ScalarField& phi, const FreeEnergy& fe, double d, double m,
                      double p, double dx, ScalarField& out) {
    const int nx = phi.nx(), ny = phi.ny();
    ScalarField lap(nx, ny), f(nx, ny);
    auto L = [&](const ScalarField& s, int i, int j) {
        return (s.wrap(i + 1, j) + s.wrap(i - 1, j) + s.wrap(i, j + 1) + s.wrap(i, j - 1) -
                4.0 * s(i, j)) / (dx * dx);
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            lap(i, j) = d * L(phi, i, j);
            f(i, j) = fe.f(phi(i, j));
        }
    out = ScalarField(nx, ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            out(i, j) = (fe.lambda * m * L(f, i, j) -
                         fe.lambda / p * m * L(lap, i, j)) / p;
}

} // namespace

TEST_CASE("empty-cell tensors reduce the macro rhs to standard Cahn-Hilliard") {
    const int nx = 48, ny = 40;
    MacroConfig cfg = scalar_config(nx, ny, 0.01, 1.0, 1.0, 1.0, 0.1);
    MacroState st;
    st.phi = random_smooth_field(nx, ny, 2024u);
    ScalarField ours, ref;
    macro_rhs(cfg, st, ours);
    reference_ch_rhs(st.phi, cfg.fe, 1.0, 1.0, 1.0, cfg.dx, ref);
    double md = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < ours.size(); ++k) {
        md = std::max(md, std::abs(ours.data()[k] - ref.data()[k]));
        scale = std::max(scale, std::abs(ref.data()[k]));
    }
    CHECK(md <= 1e-12 * std::max(1.0, scale));
}

TEST_CASE("setting C to zero isolates exactly the dispersion flux term") {
    const int nx = 40, ny = 24;
    MacroConfig with = scalar_config(nx, ny, 0.01, 0.4, 1.0, 0.46);
    with.tensors.C = Matrix2::diag(0.015, 0.023);
    MacroConfig without = with;
    without.tensors.C = Matrix2{};

    MacroState st;
    st.phi = random_smooth_field(nx, ny, 77u);
    ScalarField a, b;
    macro_rhs(with, st, a);
    macro_rhs(without, st, b);

    // difference must equal div(C grad phi)/p computed on its own
    MacroConfig only_c = without;
    only_c.tensors.M_phi = Matrix2{};
    only_c.tensors.M_w = Matrix2{};
    only_c.tensors.D = Matrix2{};
    only_c.tensors.C = Matrix2::diag(0.015, 0.023);
    ScalarField c_term;
    macro_rhs(only_c, st, c_term);

    for (std::size_t k = 0; k < a.size(); ++k)
        CHECK(std::abs((a.data()[k] - b.data()[k]) - c_term.data()[k]) <=
              1e-12 * std::max(1.0, std::abs(c_term.data()[k])));
}
