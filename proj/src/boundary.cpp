#include "attractor/boundary.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "attractor/errors.hpp"
#include "attractor/setmap.hpp"

namespace attractor::boundary {

using convexgeom::AtlasRecord;
using convexgeom::BoundaryAtlas;
using linalg::Grid;
using linalg::GridPtr;
using linalg::Matrix;
using linalg::UnitVector;

namespace {

void gate(const Matrix& m) {
    const linalg::SpectralReport rep = linalg::spectral_report(m);
    if (!(rep.spectral_radius < 1.0))
        throw eigenvalue_gate_error(
            "spectral radius " + std::to_string(rep.spectral_radius) +
                " >= 1; no bounded attractor exists",
            rep.spectral_radius);
    if (!rep.invertible)
        throw singular_matrix_error("matrix is singular to working precision");
}

void require_invertible(const Matrix& m) {
    if (!linalg::spectral_report(m).invertible)
        throw singular_matrix_error("matrix is singular to working precision");
}

/// Shared state for evaluating the boundary-point series at many directions:
/// the cached powers M^k and the certified truncation order.
class SeriesEngine {
public:
    SeriesEngine(const Matrix& m, double epsilon, double tol)
        : m_(m), mt_(m.transpose()), epsilon_(epsilon) {
        if (!(tol > 0.0) || !std::isfinite(tol)) throw input_error("series tolerance must be positive");
        if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw input_error("epsilon must be positive and finite");
        gate(m);
        cert_ = setmap::detail::certify_tail(m_, epsilon_, tol / 2.0, setmap::kDefaultMaxIter, true);
        rounding_budget_ = tol / 2.0;
    }

    int order() const { return cert_.order; }
    double tail_bound() const { return cert_.bound; }

    std::pair<std::vector<double>, SeriesMeta> point_for(const UnitVector& n) const {
        const int dim = m_.dim();
        std::vector<double> x(static_cast<std::size_t>(dim), 0.0);
        std::vector<double> comp(static_cast<std::size_t>(dim), 0.0);
        SeriesMeta meta;
        meta.truncation_order = cert_.order;
        meta.tail_bound = cert_.bound;
        meta.terms_norms.reserve(static_cast<std::size_t>(cert_.order) + 1);

        std::vector<double> w = n.components();
        double abs_accum = 0.0;
        for (int k = 0; k <= cert_.order; ++k) {
            const double wn = linalg::norm2(w);
            // Invertibility keeps (M^T)^k n nonzero; a vanishing norm can only
            // mean the direction decayed below the denormal range, where the
            // remaining terms are far below the rounding budget anyway.
            if (wn == 0.0) break;
            std::vector<double> unit = w;
            for (double& c : unit) c /= wn;
            const std::vector<double> term = cert_.powers[static_cast<std::size_t>(k)].apply(unit);
            double term_norm_sq = 0.0;
            for (int i = 0; i < dim; ++i) {
                const double t = epsilon_ * term[static_cast<std::size_t>(i)];
                term_norm_sq += t * t;
                const double y = t - comp[static_cast<std::size_t>(i)];
                const double s = x[static_cast<std::size_t>(i)] + y;
                comp[static_cast<std::size_t>(i)] = (s - x[static_cast<std::size_t>(i)]) - y;
                x[static_cast<std::size_t>(i)] = s;
            }
            const double term_norm = std::sqrt(term_norm_sq);
            meta.terms_norms.push_back(term_norm);
            abs_accum += term_norm;
            if (k < cert_.order) w = mt_.apply(w);
        }

        const double rounding = 4.0 * std::numeric_limits<double>::epsilon() * abs_accum;
        if (rounding > rounding_budget_)
            throw non_convergence_error(
                "requested tolerance is below the attainable rounding budget", rounding);
        return {std::move(x), std::move(meta)};
    }

    const Matrix& matrix() const { return m_; }
    double epsilon() const { return epsilon_; }

private:
    Matrix m_;
    Matrix mt_;
    double epsilon_;
    double rounding_budget_;
    setmap::detail::TailCertificate cert_;
};

} // namespace

UnitVector l_perp(const Matrix& m, const UnitVector& n) {
    if (n.dim() != m.dim()) throw input_error("l_perp: dimension mismatch");
    return UnitVector::normalized(linalg::solve(m.transpose(), n.components()));
}

UnitVector l_perp_inv(const Matrix& m, const UnitVector& n) {
    if (n.dim() != m.dim()) throw input_error("l_perp_inv: dimension mismatch");
    require_invertible(m);
    return UnitVector::normalized(m.apply_transpose(n.components()));
}

NormalPoint boundary_map(const Matrix& m, double epsilon, const NormalPoint& p) {
    if (!(epsilon > 0.0)) throw input_error("boundary_map: epsilon must be positive");
    if (static_cast<int>(p.x.size()) != m.dim() || p.n.dim() != m.dim())
        throw input_error("boundary_map: dimension mismatch");
    const UnitVector image_n = l_perp(m, p.n);
    std::vector<double> x = m.apply(p.x);
    for (int i = 0; i < m.dim(); ++i) x[static_cast<std::size_t>(i)] += epsilon * image_n[i];
    return {std::move(x), image_n};
}

NormalPoint boundary_map_inv(const Matrix& m, double epsilon, const NormalPoint& p) {
    if (!(epsilon > 0.0)) throw input_error("boundary_map_inv: epsilon must be positive");
    if (static_cast<int>(p.x.size()) != m.dim() || p.n.dim() != m.dim())
        throw input_error("boundary_map_inv: dimension mismatch");
    std::vector<double> shifted = p.x;
    for (int i = 0; i < m.dim(); ++i) shifted[static_cast<std::size_t>(i)] -= epsilon * p.n[i];
    return {linalg::solve(m, shifted), l_perp_inv(m, p.n)};
}

std::pair<std::vector<double>, SeriesMeta> series_boundary_point(const Matrix& m, double epsilon,
                                                                 const UnitVector& n, double tol) {
    if (n.dim() != m.dim()) throw input_error("series_boundary_point: dimension mismatch");
    const SeriesEngine engine(m, epsilon, tol);
    return engine.point_for(n);
}

BoundaryAtlas build_atlas(const Matrix& m, double epsilon, GridPtr grid, double tol) {
    if (!grid || grid->empty()) throw input_error("build_atlas: empty grid");
    if ((*grid)[0].dim() != m.dim()) throw input_error("build_atlas: dimension mismatch");
    const SeriesEngine engine(m, epsilon, tol);

    BoundaryAtlas atlas{{}, m, epsilon, engine.order(), engine.tail_bound()};
    atlas.records.reserve(grid->size());
    for (const UnitVector& n : *grid) {
        auto [x, meta] = engine.point_for(n);
        const double h = linalg::dot(x, n.components());
        atlas.records.push_back(AtlasRecord{n, std::move(x), h});
    }
    return atlas;
}

std::vector<double> bundle_attraction_trace(const Matrix& m, double epsilon,
                                            const NormalPoint& p0, int steps, double tol) {
    if (steps < 1) throw input_error("bundle_attraction_trace: steps must be >= 1");
    if (static_cast<int>(p0.x.size()) != m.dim() || p0.n.dim() != m.dim())
        throw input_error("bundle_attraction_trace: dimension mismatch");
    const SeriesEngine engine(m, epsilon, tol);

    std::vector<double> distances;
    distances.reserve(static_cast<std::size_t>(steps) + 1);
    NormalPoint p = p0;
    for (int k = 0; k <= steps; ++k) {
        const auto [xn, meta] = engine.point_for(p.n);
        double d_sq = 0.0;
        for (int i = 0; i < m.dim(); ++i) {
            const double d = p.x[static_cast<std::size_t>(i)] - xn[static_cast<std::size_t>(i)];
            d_sq += d * d;
        }
        distances.push_back(std::sqrt(d_sq));
        if (k < steps) p = boundary_map(m, epsilon, p);
    }
    return distances;
}

} // namespace attractor::boundary
