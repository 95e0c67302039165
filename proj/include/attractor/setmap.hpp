#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "attractor/convexgeom.hpp"
#include "attractor/linalg.hpp"

namespace attractor::setmap {

/// Iteration cap for the certified fixed-point computation.
inline constexpr int kDefaultMaxIter = 100000;

/// Ratio window used by the geometric tail certification.
inline constexpr int kRatioWindow = 8;

/// History of the nested iteration from the singleton {0}.
struct IterationTrace {
    linalg::GridPtr grid;
    /// partial_values[i][j] = support value of the i-th iterate in grid
    /// direction j (row 0 is the singleton, identically zero).
    std::vector<std::vector<double>> partial_values;
    /// residuals[i] = sup-norm distance between iterates i and i+1.
    std::vector<double> residuals;
    std::optional<int> converged_at;
};

/// Exact support function of a body's image under one application of the
/// map C -> closed eps-neighborhood of M(C), sampled on `grid`:
///   h'(n) = ||M^T n|| * h(P(M^T n)) + eps.
/// `support_fn` must evaluate the input body's support at arbitrary unit
/// directions (closed-form inputs only; the grid iteration goes through
/// support_partial_sum, which needs no interpolation).
convexgeom::SupportSample support_step(
    const linalg::Matrix& m, double epsilon,
    const std::function<double(const linalg::UnitVector&)>& support_fn,
    linalg::GridPtr grid);

/// Support value in direction n of the i-th iterate started from {0}:
///   h_i(n) = eps * sum_{k < i} ||(M^T)^k n||.
double support_partial_sum(const linalg::Matrix& m, double epsilon,
                           const linalg::UnitVector& n, int iterations);

/// Same partial sum without the contraction gate; grows without bound in i
/// whenever the spectral radius is >= 1 and n sees the expanding part.
double divergence_probe(const linalg::Matrix& m, double epsilon,
                        const linalg::UnitVector& n, int iterations);

/// Iterate the nested sequence to its fixed support function, stopping at
/// the first index whose certified geometric tail bound is <= tol.
/// Throws eigenvalue_gate_error when the spectral radius is >= 1,
/// singular_matrix_error when M is degenerate, and non_convergence_error
/// when max_iter is hit before certification.
std::pair<convexgeom::SupportSample, IterationTrace> iterate_to_fixed_point(
    const linalg::Matrix& m, double epsilon, linalg::GridPtr grid, double tol,
    int max_iter = kDefaultMaxIter);

namespace detail {

/// Smallest K with windowed power-norm ratio r < 1 and
/// eps * ||A^K|| * r / (1 - r) <= tol, together with the norms ||A^k||,
/// k = 0..K, and the certified bound. Throws non_convergence_error when the
/// cap is hit first.
struct TailCertificate {
    int order;                     // K
    double bound;                  // certified tail after summing terms 0..K
    std::vector<double> norms;     // ||A^k|| for k = 0..K
    std::vector<linalg::Matrix> powers; // A^k for k = 0..K (when requested)
};

TailCertificate certify_tail(const linalg::Matrix& a, double epsilon, double tol,
                             int max_iter, bool keep_powers);

} // namespace detail

} // namespace attractor::setmap
