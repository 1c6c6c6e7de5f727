#include "porehom/energy.hpp"

#include "porehom/errors.hpp"

#include <cmath>

namespace porehom {

namespace {
double horner(const std::vector<double>& c, double u) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * u + c[k];
    return acc;
}
} // namespace

double FreeEnergy::f(double u) const { return horner(a, u); }

double FreeEnergy::f_prime(double u) const {
    double acc = 0.0;
    for (std::size_t k = a.size(); k-- > 1;) acc = acc * u + k * a[k];
    return acc;
}

double FreeEnergy::F(double u) const { return horner(b, u); }

double FreeEnergy::max_f_prime(double bound) const {
    double m = 0.0;
    const int samples = 512;
    for (int i = 0; i <= samples; ++i) {
        const double u = -bound + 2.0 * bound * i / samples;
        m = std::max(m, std::abs(f_prime(u)));
    }
    return m;
}

FreeEnergy make_free_energy(int r, std::vector<double> a_coeffs, double lambda, double eta) {
    if (r < 2) throw Error("free energy requires r >= 2");
    if (eta <= 0.0) throw Error("capillary width eta must be positive");
    FreeEnergy fe;
    fe.r = r;
    fe.lambda = lambda;
    fe.eta = eta;
    fe.a = std::move(a_coeffs);
    fe.a.resize(2 * r, 0.0); // powers 0 .. 2r-1
    fe.a[0] = 0.0;           // f vanishes at 0 by construction
    fe.b.assign(2 * r + 1, 0.0);
    for (int i = 2; i <= 2 * r; ++i) fe.b[i] = fe.a[i - 1] / i;
    return fe;
}

FreeEnergy double_well(double eta) {
    if (eta <= 0.0) throw Error("double_well: eta must be positive");
    const double s = 1.0 / (eta * eta);
    FreeEnergy fe = make_free_energy(2, {0.0, -s, 0.0, s}, 1.0, eta);
    fe.b[0] = 0.25 * s; // offset so the wells sit at F(+-1) = 0
    return fe;
}

std::optional<std::string> validate_pf(const FreeEnergy& fe) {
    if (fe.r < 2) return "order parameter r must be >= 2";
    if (fe.a.size() != static_cast<std::size_t>(2 * fe.r))
        return "f coefficient vector must have size 2r";
    if (fe.b.size() != static_cast<std::size_t>(2 * fe.r + 1))
        return "F coefficient vector must have size 2r+1";
    if (fe.a[0] != 0.0) return "f(0) must vanish (constant term of f is nonzero)";
    if (fe.b[1] != 0.0) return "F must not contain a linear term";
    for (int i = 2; i <= 2 * fe.r; ++i) {
        const double lhs = i * fe.b[i];
        const double rhs = fe.a[i - 1];
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        if (std::abs(lhs - rhs) > 1e-14 * scale)
            return "coefficient linkage i*b_i = a_{i-1} broken at i=" + std::to_string(i);
    }
    if (!(fe.a[2 * fe.r - 1] > 0.0))
        return "leading coefficient of f must be positive";
    return std::nullopt;
}

} // namespace porehom
