#include "attractor/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "attractor/errors.hpp"
#include "attractor/setmap.hpp"

namespace attractor::oracle {

using convexgeom::BoundaryAtlas;
using linalg::Matrix;

std::vector<double> sample_ball(SplitMix64& rng, int m, double epsilon) {
    if (m < 1) throw input_error("sample_ball: dimension must be >= 1");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw input_error("sample_ball: epsilon must be finite and >= 0");

    std::vector<double> v(static_cast<std::size_t>(m));
    for (double& c : v) c = rng.gaussian();
    const double u = rng.uniform();
    if (epsilon == 0.0) return std::vector<double>(static_cast<std::size_t>(m), 0.0);

    const double n = linalg::norm2(v);
    if (n == 0.0) return std::vector<double>(static_cast<std::size_t>(m), 0.0);
    const double r = epsilon * std::pow(u, 1.0 / static_cast<double>(m));
    for (double& c : v) c *= r / n;
    return v;
}

long auto_burn_in(const Matrix& m, const std::vector<double>& x0, double epsilon) {
    const double x0_norm = linalg::norm2(x0);
    std::vector<double> norms{1.0};
    Matrix acc = Matrix::identity(m.dim());
    const long cap = 1000000;
    for (long k = 1; k <= cap; ++k) {
        acc = acc * m;
        norms.push_back(linalg::operator_norm(acc));
        if (k < setmap::kRatioWindow) continue;
        double r = 0.0;
        for (long j = k - setmap::kRatioWindow; j < k; ++j)
            r = std::max(r, norms[static_cast<std::size_t>(j)] > 0.0
                                ? norms[static_cast<std::size_t>(j + 1)] / norms[static_cast<std::size_t>(j)]
                                : 0.0);
        if (r >= 1.0) continue;
        const double reach = x0_norm + epsilon / (1.0 - r);
        if (norms.back() * reach <= 1e-9) return k;
        if (norms.back() == 0.0) return k;
    }
    throw non_convergence_error("auto_burn_in: no contracting power window found", norms.back());
}

PointCloud simulate(const SimConfig& cfg) {
    const Matrix& m = cfg.matrix;
    const int dim = m.dim();
    if (static_cast<int>(cfg.x0.size()) != dim) throw input_error("simulate: x0 dimension mismatch");
    if (!linalg::all_finite(cfg.x0)) throw input_error("simulate: x0 must be finite");
    if (!(cfg.epsilon >= 0.0) || !std::isfinite(cfg.epsilon))
        throw input_error("simulate: epsilon must be finite and >= 0");
    if (cfg.samples < 1) throw input_error("simulate: samples must be >= 1");
    if (cfg.burn_in && *cfg.burn_in < 0) throw input_error("simulate: burn_in must be >= 0");

    const long burn = cfg.burn_in ? *cfg.burn_in : auto_burn_in(m, cfg.x0, cfg.epsilon);

    SplitMix64 rng(cfg.seed);
    std::vector<double> x = cfg.x0;
    PointCloud cloud;
    cloud.dim = dim;
    cloud.coords.reserve(static_cast<std::size_t>(cfg.samples) * static_cast<std::size_t>(dim));

    const long total = burn + cfg.samples;
    for (long step = 0; step < total; ++step) {
        std::vector<double> next = m.apply(x);
        const std::vector<double> xi = sample_ball(rng, dim, cfg.epsilon);
        for (int i = 0; i < dim; ++i) next[static_cast<std::size_t>(i)] += xi[static_cast<std::size_t>(i)];
        if (!linalg::all_finite(next))
            throw divergence_error("simulate: trajectory left the representable range at step " +
                                       std::to_string(step + 1),
                                   step + 1);
        x = std::move(next);
        if (step >= burn) cloud.coords.insert(cloud.coords.end(), x.begin(), x.end());
    }
    return cloud;
}

CloudReport cloud_vs_atlas(const PointCloud& cloud, const BoundaryAtlas& atlas, double tol) {
    if (cloud.size() == 0) throw input_error("cloud_vs_atlas: empty cloud");
    if (atlas.records.empty()) throw input_error("cloud_vs_atlas: empty atlas");
    if (cloud.dim != atlas.matrix.dim() || atlas.records[0].n.dim() != cloud.dim)
        throw input_error("cloud_vs_atlas: dimension mismatch");

    const std::size_t npts = cloud.size();
    const int dim = cloud.dim;
    std::vector<char> violated(npts, 0);
    double max_violation = -std::numeric_limits<double>::infinity();
    double inner = 0.0;

    for (const convexgeom::AtlasRecord& rec : atlas.records) {
        const std::vector<double>& n = rec.n.components();
        double max_dot = -std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < npts; ++p) {
            const double* pt = cloud.point(p);
            double s = 0.0;
            for (int i = 0; i < dim; ++i) s += pt[i] * n[static_cast<std::size_t>(i)];
            max_dot = std::max(max_dot, s);
            const double gap = s - rec.h;
            max_violation = std::max(max_violation, gap);
            if (gap > tol) violated[p] = 1;
        }
        inner = std::max(inner, rec.h - max_dot);
    }

    CloudReport report;
    std::size_t bad = 0;
    for (char v : violated) bad += static_cast<std::size_t>(v);
    report.containment_fraction =
        static_cast<double>(npts - bad) / static_cast<double>(npts);
    report.max_violation = max_violation;
    report.inner_hausdorff = std::max(inner, 0.0);
    return report;
}

} // namespace attractor::oracle
