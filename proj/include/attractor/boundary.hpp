#pragma once

#include <utility>
#include <vector>

#include "attractor/convexgeom.hpp"
#include "attractor/linalg.hpp"

namespace attractor::boundary {

/// A point of the unit normal bundle R^m x S^{m-1}.
struct NormalPoint {
    std::vector<double> x;
    linalg::UnitVector n;
};

/// Truncation data for one evaluated boundary-point series.
struct SeriesMeta {
    int truncation_order = 0;        // highest term index summed
    double tail_bound = 0.0;         // certified bound on the dropped tail
    std::vector<double> terms_norms; // magnitude of each summed term
};

/// Action induced on outward unit normals by the matrix: the normalized
/// solution of M^T w = n.
linalg::UnitVector l_perp(const linalg::Matrix& m, const linalg::UnitVector& n);

/// Inverse of l_perp: the normalized M^T n.
linalg::UnitVector l_perp_inv(const linalg::Matrix& m, const linalg::UnitVector& n);

/// The boundary map (x, n) -> (M x + eps * l_perp(n), l_perp(n)). Its normal
/// component is by construction the same function call as l_perp, so the two
/// agree bitwise.
NormalPoint boundary_map(const linalg::Matrix& m, double epsilon, const NormalPoint& p);

/// Inverse boundary map (x, n) -> (M^{-1}(x - eps n), l_perp_inv(n)).
NormalPoint boundary_map_inv(const linalg::Matrix& m, double epsilon, const NormalPoint& p);

/// The boundary point with outward normal n, via the series
///   x(n) = eps * sum_{k>=0} M^k P((M^T)^k n),
/// truncated once the certified tail is <= tol/2 (the other tol/2 is the
/// compensated-summation rounding budget). The support value of the result
/// in direction n telescopes to the setmap partial sum.
std::pair<std::vector<double>, SeriesMeta> series_boundary_point(
    const linalg::Matrix& m, double epsilon, const linalg::UnitVector& n, double tol);

/// One series evaluation per grid direction, sharing one matrix-power cache.
/// truncation_order and tail_bound are the (uniform) worst-direction values.
convexgeom::BoundaryAtlas build_atlas(const linalg::Matrix& m, double epsilon,
                                      linalg::GridPtr grid, double tol);

/// Distances ||first component of b^k(p0) - x(n_k)||, k = 0..steps, where
/// n_k is the k-fold normal image of p0's normal and x(.) is the series
/// point at tolerance tol.
std::vector<double> bundle_attraction_trace(const linalg::Matrix& m, double epsilon,
                                            const NormalPoint& p0, int steps, double tol);

} // namespace attractor::boundary
