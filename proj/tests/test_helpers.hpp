#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "attractor/linalg.hpp"
#include "attractor/rng.hpp"

namespace testutil {

using attractor::SplitMix64;
using attractor::linalg::Grid;
using attractor::linalg::GridPtr;
using attractor::linalg::Matrix;
using attractor::linalg::UnitVector;

inline Matrix rotation2d(double radians) {
    const double c = std::cos(radians);
    const double s = std::sin(radians);
    return Matrix(2, {c, -s, s, c});
}

inline Matrix random_matrix(SplitMix64& rng, int dim) {
    std::vector<double> entries(static_cast<std::size_t>(dim) * dim);
    for (double& e : entries) e = rng.uniform(-1.0, 1.0);
    return Matrix(dim, std::move(entries));
}

/// Random invertible matrix rescaled so its spectral radius lands in
/// [rho_min, rho_max].
inline Matrix random_contraction(SplitMix64& rng, int dim, double rho_min, double rho_max) {
    while (true) {
        Matrix m = random_matrix(rng, dim);
        const auto rep = attractor::linalg::spectral_report(m);
        if (!(rep.spectral_radius > 1e-3)) continue;
        const double target = rng.uniform(rho_min, rho_max);
        Matrix scaled = m * (target / rep.spectral_radius);
        if (attractor::linalg::spectral_report(scaled).invertible) return scaled;
    }
}

inline UnitVector random_direction(SplitMix64& rng, int dim) {
    while (true) {
        std::vector<double> v(static_cast<std::size_t>(dim));
        for (double& c : v) c = rng.gaussian();
        if (attractor::linalg::norm2(v) > 1e-8)
            return UnitVector::normalized(std::move(v));
    }
}

inline GridPtr shared_grid(int m, int k, std::uint64_t seed = 42) {
    return std::make_shared<const Grid>(attractor::linalg::sphere_grid(m, k, seed));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

} // namespace testutil
