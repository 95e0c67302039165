#include "attractor/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "attractor/boundary.hpp"
#include "attractor/errors.hpp"
#include "attractor/setmap.hpp"

namespace attractor::verify {

using convexgeom::AtlasRecord;
using convexgeom::BoundaryAtlas;
using linalg::Matrix;
using linalg::UnitVector;

namespace {

double distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace

VerifyReport verify_atlas(const BoundaryAtlas& atlas) {
    if (atlas.records.empty()) throw input_error("verify_atlas: empty atlas");
    const Matrix& m = atlas.matrix;
    const double eps = atlas.epsilon;
    const int dim = m.dim();
    const std::size_t k = atlas.records.size();

    VerifyReport report;
    auto add = [&](const std::string& name, bool pass, double measured, double threshold) {
        report.checks.push_back(CheckResult{name, pass, measured, threshold});
    };

    // Derived tolerances. tail_bound is the certified truncation error of the
    // stored records; series cross-checks are recomputed at twice that
    // accuracy so their mismatch stays within 4x the tail bound.
    const double tail = std::max(atlas.tail_bound, 0.0);
    const double series_tol = std::max(2.0 * tail, 2e-12);
    const double cross_thresh = std::max(4.0 * tail, 1e-11);

    double scale = 0.0;
    for (const AtlasRecord& r : atlas.records) scale = std::max(scale, std::abs(r.h));

    // --- Record wellformedness -------------------------------------------
    double consistency = 0.0;
    double unit_dev = 0.0;
    double min_h = std::numeric_limits<double>::infinity();
    for (const AtlasRecord& r : atlas.records) {
        consistency = std::max(consistency,
                               std::abs(r.h - linalg::dot(r.x, r.n.components())));
        unit_dev = std::max(unit_dev, std::abs(linalg::norm2(r.n.components()) - 1.0));
        min_h = std::min(min_h, r.h);
    }
    add("record-consistency", consistency <= 1e-12, consistency, 1e-12);
    add("unit-normals", unit_dev <= linalg::kUnitNormTol, unit_dev, linalg::kUnitNormTol);
    add("positive-support", min_h > 0.0, min_h, 0.0);

    // --- Convex position: every point obeys every supporting halfspace ----
    double position = -std::numeric_limits<double>::infinity();
    for (const AtlasRecord& ri : atlas.records) {
        for (const AtlasRecord& rj : atlas.records) {
            position = std::max(position, linalg::dot(ri.x, rj.n.components()) - rj.h);
        }
    }
    const double position_thresh = 1e-12 * std::max(scale, 1.0);
    add("convex-position", position <= position_thresh, position, position_thresh);

    // --- Planar diagnostics ------------------------------------------------
    if (dim == 2 && k >= 3) {
        const auto pts = atlas.points();
        bool convex = false;
        try {
            convex = convexgeom::convexity_check_2d(pts);
        } catch (const input_error&) {
            convex = false;
        }
        add("convex-polygon-2d", convex, convex ? 1.0 : 0.0, 1.0);

        double min_cross = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k; ++i) {
            const auto& a = pts[i];
            const auto& b = pts[(i + 1) % k];
            const auto& c = pts[(i + 2) % k];
            const double cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
            min_cross = std::min(min_cross, cross);
        }
        add("positive-turning-2d", min_cross > 0.0, min_cross, 0.0);
    }

    // --- Strict convexity: distinct normals give distinct points ----------
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            min_gap = std::min(min_gap, distance(atlas.records[i].x, atlas.records[j].x));
        }
    }
    add("strict-convexity-gap", min_gap > 0.0, min_gap, 0.0);

    // --- Boundary map round-trip on the records ---------------------------
    double roundtrip = 0.0;
    for (const AtlasRecord& r : atlas.records) {
        const boundary::NormalPoint p{r.x, r.n};
        const boundary::NormalPoint q = boundary::boundary_map_inv(m, eps, boundary::boundary_map(m, eps, p));
        roundtrip = std::max(roundtrip, distance(p.x, q.x));
        roundtrip = std::max(roundtrip, distance(p.n.components(), q.n.components()));
    }
    add("inverse-roundtrip", roundtrip <= 1e-10, roundtrip, 1e-10);

    // --- Invariance: the mapped atlas lands back on the boundary ----------
    // x(image normal) is evaluated by a fresh series run over the image grid,
    // not read off the stored records.
    {
        auto image_grid = std::make_shared<linalg::Grid>();
        image_grid->reserve(k);
        for (const AtlasRecord& r : atlas.records) image_grid->push_back(boundary::l_perp(m, r.n));
        const BoundaryAtlas image_atlas = boundary::build_atlas(m, eps, image_grid, series_tol);

        double invariance = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const AtlasRecord& r = atlas.records[i];
            std::vector<double> mapped = m.apply(r.x);
            const UnitVector& img_n = (*image_grid)[i];
            for (int c = 0; c < dim; ++c) mapped[static_cast<std::size_t>(c)] += eps * img_n[c];
            invariance = std::max(invariance, distance(mapped, image_atlas.records[i].x));
        }
        add("map-invariance", invariance <= cross_thresh, invariance, cross_thresh);
    }

    // --- Conjugacy: normal component of the map is exactly l_perp ---------
    {
        std::size_t mismatches = 0;
        for (const AtlasRecord& r : atlas.records) {
            const boundary::NormalPoint p{r.x, r.n};
            const UnitVector via_map = boundary::boundary_map(m, eps, p).n;
            const UnitVector direct = boundary::l_perp(m, r.n);
            if (via_map.components() != direct.components()) ++mismatches;
        }
        add("conjugacy-bitwise", mismatches == 0, static_cast<double>(mismatches), 0.0);
    }

    // --- Cross-method: support values match the nested iteration ----------
    {
        auto grid = std::make_shared<linalg::Grid>();
        grid->reserve(k);
        for (const AtlasRecord& r : atlas.records) grid->push_back(r.n);
        const auto [fixed, trace] = setmap::iterate_to_fixed_point(m, eps, grid, series_tol);
        double diff = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            diff = std::max(diff, std::abs(atlas.records[i].h - fixed.values[i]));
        add("cross-method-support", diff <= cross_thresh, diff, cross_thresh);
    }

    // --- Shape notes --------------------------------------------------------
    double max_h = 0.0;
    for (const AtlasRecord& r : atlas.records) max_h = std::max(max_h, r.h);
    report.constant_support = (max_h - min_h) <= 1e-9 * std::max(max_h, 1e-300);
    if (dim == 2 && k >= 6) {
        try {
            report.ellipse_residual = convexgeom::ellipse_fit_residual_2d(atlas.points());
        } catch (const degenerate_fit_error&) {
            report.ellipse_residual.reset();
        }
    }

    return report;
}

} // namespace attractor::verify
