#include "attractor/convexgeom.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "attractor/errors.hpp"

namespace attractor::convexgeom {

using linalg::UnitVector;

SupportSample::SupportSample(linalg::GridPtr g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
    if (!grid || grid->empty()) throw input_error("SupportSample: empty grid");
    if (values.size() != grid->size())
        throw input_error("SupportSample: one value per grid direction required");
    if (!linalg::all_finite(values)) throw input_error("SupportSample: non-finite values");
}

bool same_grid(const SupportSample& a, const SupportSample& b) {
    if (a.grid == b.grid) return true;
    if (a.grid->size() != b.grid->size()) return false;
    for (std::size_t i = 0; i < a.grid->size(); ++i) {
        if ((*a.grid)[i].components() != (*b.grid)[i].components()) return false;
    }
    return true;
}

SupportSample BoundaryAtlas::support_sample() const {
    auto grid = std::make_shared<linalg::Grid>();
    std::vector<double> values;
    grid->reserve(records.size());
    values.reserve(records.size());
    for (const AtlasRecord& r : records) {
        grid->push_back(r.n);
        values.push_back(r.h);
    }
    return SupportSample(std::move(grid), std::move(values));
}

std::vector<std::vector<double>> BoundaryAtlas::points() const {
    std::vector<std::vector<double>> pts;
    pts.reserve(records.size());
    for (const AtlasRecord& r : records) pts.push_back(r.x);
    return pts;
}

double hausdorff(const SupportSample& s1, const SupportSample& s2) {
    if (!same_grid(s1, s2)) throw input_error("hausdorff: samples use different grids");
    double d = 0.0;
    for (std::size_t i = 0; i < s1.values.size(); ++i)
        d = std::max(d, std::abs(s1.values[i] - s2.values[i]));
    return d;
}

bool contains_point(const SupportSample& s, const std::vector<double>& p, double tol) {
    if (static_cast<int>(p.size()) != s.dim()) throw input_error("contains_point: dimension mismatch");
    if (!linalg::all_finite(p)) throw input_error("contains_point: non-finite point");
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (linalg::dot(p, (*s.grid)[i].components()) > s.values[i] + tol) return false;
    }
    return true;
}

bool convexity_check_2d(const std::vector<std::vector<double>>& points) {
    if (points.size() < 3) throw input_error("convexity_check_2d: need at least 3 points");
    double scale = 0.0;
    for (const auto& p : points) {
        if (p.size() != 2) throw input_error("convexity_check_2d: points must be planar");
        scale = std::max({scale, std::abs(p[0]), std::abs(p[1])});
    }
    const double cutoff = -kGeomTol * scale * scale;
    const std::size_t n = points.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = points[i];
        const auto& b = points[(i + 1) % n];
        const auto& c = points[(i + 2) % n];
        const double cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        if (cross < cutoff) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Conic fit
// ---------------------------------------------------------------------------

namespace {

// Solve the 5x5 normal equations by LU; returns false when a pivot is
// negligible relative to the largest one.
bool solve_normal_equations(double ata[5][5], double atb[5], double out[5]) {
    int perm[5] = {0, 1, 2, 3, 4};
    double a[5][5];
    double b[5];
    for (int i = 0; i < 5; ++i) {
        b[i] = atb[i];
        for (int j = 0; j < 5; ++j) a[i][j] = ata[i][j];
    }
    double max_pivot = 0.0;
    for (int col = 0; col < 5; ++col) {
        int piv = col;
        for (int r = col + 1; r < 5; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (piv != col) {
            for (int j = 0; j < 5; ++j) std::swap(a[col][j], a[piv][j]);
            std::swap(b[col], b[piv]);
            std::swap(perm[col], perm[piv]);
        }
        const double p = a[col][col];
        max_pivot = std::max(max_pivot, std::abs(p));
        if (std::abs(p) <= 1e-13 * max_pivot) return false;
        for (int r = col + 1; r < 5; ++r) {
            const double l = a[r][col] / p;
            for (int j = col; j < 5; ++j) a[r][j] -= l * a[col][j];
            b[r] -= l * b[col];
        }
    }
    for (int i = 4; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < 5; ++j) s -= a[i][j] * out[j];
        out[i] = s / a[i][i];
    }
    return true;
}

// Householder QR with column pivoting on the tall design matrix; dependent
// columns get zero coefficients. Used when the normal equations degenerate.
void solve_qr_column_pivot(std::vector<double>& design /* n x 5, row-major */,
                           std::vector<double>& rhs, double out[5]) {
    const std::size_t n = rhs.size();
    int col_of[5] = {0, 1, 2, 3, 4};
    auto at = [&](std::size_t r, int c) -> double& { return design[r * 5 + static_cast<std::size_t>(c)]; };

    int rank = 5;
    for (int k = 0; k < 5; ++k) {
        // Pivot on the column with the largest remaining norm.
        int best = k;
        double best_norm = -1.0;
        for (int c = k; c < 5; ++c) {
            double s = 0.0;
            for (std::size_t r = static_cast<std::size_t>(k); r < n; ++r) s += at(r, c) * at(r, c);
            if (s > best_norm) {
                best_norm = s;
                best = c;
            }
        }
        if (best != k) {
            for (std::size_t r = 0; r < n; ++r) std::swap(at(r, k), at(r, best));
            std::swap(col_of[k], col_of[best]);
        }
        double alpha = std::sqrt(std::max(best_norm, 0.0));
        if (alpha <= 1e-13) {
            rank = k;
            break;
        }
        if (at(static_cast<std::size_t>(k), k) > 0.0) alpha = -alpha;
        // Householder vector stored in place of column k below the diagonal.
        const double vk = at(static_cast<std::size_t>(k), k) - alpha;
        at(static_cast<std::size_t>(k), k) = alpha;
        double vnorm_sq = vk * vk;
        std::vector<double> v(n, 0.0);
        v[static_cast<std::size_t>(k)] = vk;
        for (std::size_t r = static_cast<std::size_t>(k) + 1; r < n; ++r) {
            v[r] = at(r, k);
            vnorm_sq += v[r] * v[r];
            at(r, k) = 0.0;
        }
        if (vnorm_sq == 0.0) continue;
        for (int c = k + 1; c < 5; ++c) {
            double proj = 0.0;
            for (std::size_t r = static_cast<std::size_t>(k); r < n; ++r) proj += v[r] * at(r, c);
            const double f = 2.0 * proj / vnorm_sq;
            for (std::size_t r = static_cast<std::size_t>(k); r < n; ++r) at(r, c) -= f * v[r];
        }
        double proj = 0.0;
        for (std::size_t r = static_cast<std::size_t>(k); r < n; ++r) proj += v[r] * rhs[r];
        const double f = 2.0 * proj / vnorm_sq;
        for (std::size_t r = static_cast<std::size_t>(k); r < n; ++r) rhs[r] -= f * v[r];
    }

    double sol[5] = {0, 0, 0, 0, 0};
    for (int i = rank - 1; i >= 0; --i) {
        double s = rhs[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < rank; ++j) s -= at(static_cast<std::size_t>(i), j) * sol[j];
        sol[i] = s / at(static_cast<std::size_t>(i), i);
    }
    for (int i = 0; i < 5; ++i) out[i] = 0.0;
    for (int i = 0; i < rank; ++i) out[col_of[i]] = sol[i];
}

} // namespace

double ellipse_fit_residual_2d(const std::vector<std::vector<double>>& points) {
    if (points.size() < 6) throw input_error("ellipse_fit_residual_2d: need at least 6 points");
    for (const auto& p : points) {
        if (p.size() != 2 || !linalg::all_finite(p))
            throw input_error("ellipse_fit_residual_2d: points must be finite and planar");
    }
    const std::size_t n = points.size();

    // Center and scale; the constrained fit and the normalized residual are
    // invariant under this change of coordinates, which keeps the normal
    // equations well conditioned.
    double cx = 0.0, cy = 0.0;
    for (const auto& p : points) {
        cx += p[0];
        cy += p[1];
    }
    cx /= static_cast<double>(n);
    cy /= static_cast<double>(n);
    double mean_r = 0.0;
    for (const auto& p : points) mean_r += std::hypot(p[0] - cx, p[1] - cy);
    mean_r /= static_cast<double>(n);
    if (!(mean_r > 0.0)) throw degenerate_fit_error("ellipse_fit_residual_2d: coincident points");

    std::vector<double> xs(n), ys(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = (points[i][0] - cx) / mean_r;
        ys[i] = (points[i][1] - cy) / mean_r;
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    // Collinear input admits an exact degenerate conic; reject it.
    const double tr = sxx + syy;
    const double det_cov = sxx * syy - sxy * sxy;
    if (det_cov <= 1e-12 * tr * tr)
        throw degenerate_fit_error("ellipse_fit_residual_2d: points are (near) collinear");

    // With c = 1 - a the model is a(x^2 - y^2) + b xy + d x + e y + f = -y^2.
    std::vector<double> design(n * 5);
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        design[i * 5 + 0] = xs[i] * xs[i] - ys[i] * ys[i];
        design[i * 5 + 1] = xs[i] * ys[i];
        design[i * 5 + 2] = xs[i];
        design[i * 5 + 3] = ys[i];
        design[i * 5 + 4] = 1.0;
        rhs[i] = -ys[i] * ys[i];
    }

    double ata[5][5] = {};
    double atb[5] = {};
    for (std::size_t i = 0; i < n; ++i) {
        for (int r = 0; r < 5; ++r) {
            atb[r] += design[i * 5 + static_cast<std::size_t>(r)] * rhs[i];
            for (int c = 0; c < 5; ++c)
                ata[r][c] += design[i * 5 + static_cast<std::size_t>(r)] * design[i * 5 + static_cast<std::size_t>(c)];
        }
    }

    double coeff[5];
    if (!solve_normal_equations(ata, atb, coeff)) {
        solve_qr_column_pivot(design, rhs, coeff);
        // design/rhs were consumed; rebuild for the residual pass below.
        for (std::size_t i = 0; i < n; ++i) {
            design[i * 5 + 0] = xs[i] * xs[i] - ys[i] * ys[i];
            design[i * 5 + 1] = xs[i] * ys[i];
            design[i * 5 + 2] = xs[i];
            design[i * 5 + 3] = ys[i];
            design[i * 5 + 4] = 1.0;
            rhs[i] = -ys[i] * ys[i];
        }
    }

    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double res = -rhs[i]; // + y^2
        for (int c = 0; c < 5; ++c) res += coeff[c] * design[i * 5 + static_cast<std::size_t>(c)];
        ss += res * res;
    }
    // Mean radius is 1 in the fit coordinates, so the RMS is already the
    // normalized residual.
    return std::sqrt(ss / static_cast<double>(n));
}

} // namespace attractor::convexgeom
