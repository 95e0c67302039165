#pragma once

#include <optional>
#include <string>
#include <vector>

#include "attractor/convexgeom.hpp"

namespace attractor::verify {

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;   // the residual / witness actually observed
    double threshold = 0.0;  // the bound it was compared against
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool constant_support = false;                // ball-shaped boundary detected
    std::optional<double> ellipse_residual;       // conic-fit diagnostic (m = 2)

    bool all_pass() const {
        for (const CheckResult& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Run every verifiable property of a computed (or re-loaded) atlas:
/// record consistency, unit normals, positive support, convex position,
/// planar convexity and turning (m = 2), strict-convexity gaps, inverse
/// round-trip of the boundary map, invariance of the atlas under it,
/// bitwise conjugacy of its normal component, and agreement with the
/// independently iterated support function. Thresholds derive from the
/// atlas tail bound so a re-loaded file reproduces the same report.
VerifyReport verify_atlas(const convexgeom::BoundaryAtlas& atlas);

} // namespace attractor::verify
