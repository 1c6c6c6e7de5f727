// energy.hpp
// Polynomial homogeneous free energies: f of degree 2r-1 with f(0)=0, F the
// antiderivative with linked coefficients i*b_i = a_{i-1} and positive
// leading term. Immutable value type; freely shareable.

#ifndef POREHOM_ENERGY_HPP
#define POREHOM_ENERGY_HPP

#include <optional>
#include <string>
#include <vector>

namespace porehom {

struct FreeEnergy {
    int r = 2;                 // polynomial order parameter, f has degree 2r-1
    std::vector<double> a;     // f(u) = sum a[i] u^i, a[0] = 0, size 2r
    std::vector<double> b;     // F(u) = b[0] + sum_{i>=2} b[i] u^i, size 2r+1
    double lambda = 1.0;       // interfacial parameter
    double eta = 1.0;          // capillary width

    double f(double u) const;        // Horner on a
    double f_prime(double u) const;  // analytic derivative of f
    double F(double u) const;        // Horner on b

    /// Largest |f'| over [-bound, bound]; used for explicit step-size limits.
    double max_f_prime(double bound) const;
};

/// Scaled double well F(u) = (u^2-1)^2/(4 eta^2), f = F' = (u^3-u)/eta^2.
/// The constant offset puts the minima at F(+-1) = 0.
FreeEnergy double_well(double eta);

/// Build a free energy from f-coefficients; derives b via the linkage.
FreeEnergy make_free_energy(int r, std::vector<double> a_coeffs,
                            double lambda, double eta);

/// Checks the coefficient linkage, leading positivity, and f(0)=0.
/// Returns the first violation found, or nullopt when all hold.
std::optional<std::string> validate_pf(const FreeEnergy& fe);

} // namespace porehom

#endif
