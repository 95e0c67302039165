#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "attractor/convexgeom.hpp"
#include "attractor/linalg.hpp"
#include "attractor/rng.hpp"

namespace attractor::oracle {

/// Flat, dimension-tagged point storage for large clouds.
struct PointCloud {
    int dim = 0;
    std::vector<double> coords; // point i occupies [i*dim, (i+1)*dim)

    std::size_t size() const { return dim == 0 ? 0 : coords.size() / static_cast<std::size_t>(dim); }
    const double* point(std::size_t i) const { return coords.data() + i * static_cast<std::size_t>(dim); }
    std::vector<double> point_vec(std::size_t i) const {
        return {point(i), point(i) + dim};
    }
};

struct SimConfig {
    linalg::Matrix matrix;
    double epsilon = 0.0;            // noise-ball radius (0 = deterministic)
    std::vector<double> x0;
    std::optional<long> burn_in;     // unset = automatic (see auto_burn_in)
    long samples = 1;
    std::uint64_t seed = 42;
};

struct CloudReport {
    double containment_fraction = 0.0; // fraction of points inside at tol
    double max_violation = 0.0;        // max over points & directions of <p,n> - h(n)
    double inner_hausdorff = 0.0;      // max over directions of h(n) - max_p <p,n>, clipped at 0
};

/// Uniform draw from the closed ball of radius epsilon: direction from m
/// normalized gaussians, radius epsilon * U^(1/m). Consumes 2m + 1 uniforms.
std::vector<double> sample_ball(SplitMix64& rng, int m, double epsilon);

/// Smallest B with ||M^B|| * (||x0|| + eps/(1-r)) <= 1e-9, r the windowed
/// power-norm ratio once it drops below 1.
long auto_burn_in(const linalg::Matrix& m, const std::vector<double>& x0, double epsilon);

/// Iterate x <- M x + noise for burn_in steps from x0, then record the next
/// `samples` states. Reproducible from the seed; throws divergence_error if
/// a state leaves the representable range.
PointCloud simulate(const SimConfig& cfg);

/// Statistical comparison of a trajectory cloud against a computed boundary.
CloudReport cloud_vs_atlas(const PointCloud& cloud, const convexgeom::BoundaryAtlas& atlas,
                           double tol);

} // namespace attractor::oracle
