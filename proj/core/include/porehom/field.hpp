// field.hpp
// Dense 2D grid containers. Row-major, index (i,j) = x- and y-position.

#ifndef POREHOM_FIELD_HPP
#define POREHOM_FIELD_HPP

#include <cassert>
#include <cstddef>
#include <vector>

namespace porehom {

/// Grid-sampled scalar values. Periodic index helpers wrap both directions.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(int nx, int ny, double init = 0.0)
        : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx) * ny, init) {}

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(int i, int j) {
        assert(i >= 0 && i < nx_ && j >= 0 && j < ny_);
        return data_[static_cast<std::size_t>(j) * nx_ + i];
    }
    double operator()(int i, int j) const {
        assert(i >= 0 && i < nx_ && j >= 0 && j < ny_);
        return data_[static_cast<std::size_t>(j) * nx_ + i];
    }

    /// Access with periodic wraparound in both directions.
    double wrap(int i, int j) const {
        i = mod(i, nx_);
        j = mod(j, ny_);
        return data_[static_cast<std::size_t>(j) * nx_ + i];
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    void fill(double v) { data_.assign(data_.size(), v); }

    static int mod(int a, int n) {
        int r = a % n;
        return r < 0 ? r + n : r;
    }

private:
    int nx_ = 0;
    int ny_ = 0;
    std::vector<double> data_;
};

/// Two scalar components sharing one grid layout.
struct VectorField {
    ScalarField x;
    ScalarField y;

    VectorField() = default;
    VectorField(int nx, int ny) : x(nx, ny), y(nx, ny) {}
};

} // namespace porehom

#endif
