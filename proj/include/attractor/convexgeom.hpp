#pragma once

#include <vector>

#include "attractor/linalg.hpp"

namespace attractor::convexgeom {

/// Default cross-product tolerance factor for planar convexity checks.
inline constexpr double kGeomTol = 1e-9;

// ---------------------------------------------------------------------------
// SupportSample
// ---------------------------------------------------------------------------

/// A convex body sampled through its support function: one value
/// h(n) = sup_{y in C} <y, n> per direction of a shared grid.
struct SupportSample {
    linalg::GridPtr grid;
    std::vector<double> values;

    SupportSample(linalg::GridPtr g, std::vector<double> v);

    int dim() const { return grid->empty() ? 0 : (*grid)[0].dim(); }
    std::size_t size() const { return values.size(); }
};

/// True when two samples may be compared pointwise (same grid object or
/// identical directions).
bool same_grid(const SupportSample& a, const SupportSample& b);

// ---------------------------------------------------------------------------
// BoundaryAtlas
// ---------------------------------------------------------------------------

struct AtlasRecord {
    linalg::UnitVector n;   // outward unit normal
    std::vector<double> x;  // boundary point with that normal
    double h;               // support value <x, n>
};

/// The computed attractor boundary: one (n, x(n), h(n)) record per grid
/// direction, plus the data needed to reproduce and re-verify it.
struct BoundaryAtlas {
    std::vector<AtlasRecord> records;
    linalg::Matrix matrix;
    double epsilon;
    int truncation_order;
    double tail_bound;

    /// Support-function view of the records (grid = the record normals).
    SupportSample support_sample() const;

    /// The boundary points as a flat list (row-major, records order).
    std::vector<std::vector<double>> points() const;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Hausdorff distance of two convex bodies given over one grid:
/// max over directions of |h1 - h2|.
double hausdorff(const SupportSample& s1, const SupportSample& s2);

/// True iff <p, n> <= h(n) + tol for every grid direction.
bool contains_point(const SupportSample& s, const std::vector<double>& p, double tol);

/// True iff the closed polyline (ordered by generating normal angle) turns
/// consistently counterclockwise up to kGeomTol * scale^2.
bool convexity_check_2d(const std::vector<std::vector<double>>& points);

/// Least-squares algebraic conic fit a x^2 + b xy + c y^2 + d x + e y + f = 0
/// with a + c = 1; returns the RMS algebraic residual normalized by the
/// squared mean radius (translation and scale invariant).
double ellipse_fit_residual_2d(const std::vector<std::vector<double>>& points);

} // namespace attractor::convexgeom
