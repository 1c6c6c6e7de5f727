// matrix2.hpp
// 2x2 tensors for mobilities and effective coefficients (d is fixed at 2).

#ifndef POREHOM_MATRIX2_HPP
#define POREHOM_MATRIX2_HPP

#include <array>
#include <cmath>

namespace porehom {

struct Matrix2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    static Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Matrix2 scaled_identity(double m) { return {m, 0.0, 0.0, m}; }
    static Matrix2 diag(double m1, double m2) { return {m1, 0.0, 0.0, m2}; }

    double operator()(int i, int j) const {
        return i == 0 ? (j == 0 ? a11 : a12) : (j == 0 ? a21 : a22);
    }

    std::array<double, 2> apply(const std::array<double, 2>& v) const {
        return {a11 * v[0] + a12 * v[1], a21 * v[0] + a22 * v[1]};
    }

    double symmetry_defect() const { return std::abs(a12 - a21); }

    bool spd() const {
        return symmetry_defect() == 0.0 && a11 > 0.0 && (a11 * a22 - a12 * a21) > 0.0;
    }

    double max_abs() const {
        return std::max(std::max(std::abs(a11), std::abs(a12)),
                        std::max(std::abs(a21), std::abs(a22)));
    }
};

} // namespace porehom

#endif
