#include "attractor/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "attractor/errors.hpp"
#include "attractor/rng.hpp"

namespace attractor::linalg {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr int kPowerIterationCap = 10000;
constexpr double kPowerIterationTol = 1e-12;

} // namespace

// ---------------------------------------------------------------------------
// Vector helpers
// ---------------------------------------------------------------------------

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw input_error("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

std::vector<double> axpy(const std::vector<double>& a, double s, const std::vector<double>& b) {
    if (a.size() != b.size()) throw input_error("axpy: dimension mismatch");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * b[i];
    return out;
}

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

Matrix::Matrix(int dim) : dim_(dim) {
    if (dim < 1) throw input_error("Matrix: dim must be >= 1");
    a_.assign(static_cast<std::size_t>(dim) * dim, 0.0);
}

Matrix::Matrix(int dim, std::vector<double> row_major) : dim_(dim), a_(std::move(row_major)) {
    if (dim < 1) throw input_error("Matrix: dim must be >= 1");
    if (a_.size() != static_cast<std::size_t>(dim) * dim)
        throw input_error("Matrix: entry count does not match dim*dim");
    if (!all_finite(a_)) throw input_error("Matrix: entries must be finite");
}

Matrix Matrix::identity(int dim) {
    Matrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::scalar(int dim, double s) {
    Matrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = s;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (rhs.dim_ != dim_) throw input_error("Matrix multiply: dimension mismatch");
    Matrix out(dim_);
    for (int i = 0; i < dim_; ++i) {
        for (int k = 0; k < dim_; ++k) {
            const double aik = (*this)(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < dim_; ++j) out(i, j) += aik * rhs(k, j);
        }
    }
    return out;
}

Matrix Matrix::operator*(double s) const {
    Matrix out(dim_);
    for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] * s;
    return out;
}

std::vector<double> Matrix::apply(const std::vector<double>& v) const {
    if (static_cast<int>(v.size()) != dim_) throw input_error("Matrix apply: dimension mismatch");
    std::vector<double> out(static_cast<std::size_t>(dim_), 0.0);
    for (int i = 0; i < dim_; ++i) {
        double s = 0.0;
        for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * v[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

std::vector<double> Matrix::apply_transpose(const std::vector<double>& v) const {
    if (static_cast<int>(v.size()) != dim_) throw input_error("Matrix apply_transpose: dimension mismatch");
    std::vector<double> out(static_cast<std::size_t>(dim_), 0.0);
    for (int j = 0; j < dim_; ++j) {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) s += (*this)(i, j) * v[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(j)] = s;
    }
    return out;
}

double Matrix::max_abs_entry() const {
    double m = 0.0;
    for (double x : a_) m = std::max(m, std::abs(x));
    return m;
}

// ---------------------------------------------------------------------------
// UnitVector
// ---------------------------------------------------------------------------

UnitVector UnitVector::normalized(std::vector<double> v) {
    if (v.empty()) throw input_error("UnitVector: empty vector");
    if (!all_finite(v)) throw input_error("UnitVector: non-finite components");
    const double n = norm2(v);
    if (!(n > 0.0) || !std::isfinite(n))
        throw input_error("UnitVector: cannot normalize a zero vector");
    for (double& x : v) x /= n;
    return UnitVector(std::move(v));
}

UnitVector UnitVector::checked(std::vector<double> v) {
    if (v.empty()) throw input_error("UnitVector: empty vector");
    if (!all_finite(v)) throw input_error("UnitVector: non-finite components");
    if (std::abs(norm2(v) - 1.0) > kUnitNormTol)
        throw input_error("UnitVector: norm deviates from 1 by more than 1e-12");
    return UnitVector(std::move(v));
}

UnitVector UnitVector::trusted(std::vector<double> v) {
    if (v.empty()) throw input_error("UnitVector: empty vector");
    if (!all_finite(v)) throw input_error("UnitVector: non-finite components");
    return UnitVector(std::move(v));
}

// ---------------------------------------------------------------------------
// LU with partial pivoting (shared by det, solve)
// ---------------------------------------------------------------------------

namespace {

struct Lu {
    Matrix lu;              // packed L (unit diagonal, below) and U (on/above)
    std::vector<int> perm;  // row permutation
    double det;             // signed determinant
    bool singular;          // an exactly-zero pivot was hit
};

Lu lu_factor(const Matrix& m) {
    const int n = m.dim();
    Lu f{m, std::vector<int>(static_cast<std::size_t>(n)), 1.0, false};
    for (int i = 0; i < n; ++i) f.perm[static_cast<std::size_t>(i)] = i;

    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::abs(f.lu(col, col));
        for (int r = col + 1; r < n; ++r) {
            const double cand = std::abs(f.lu(r, col));
            if (cand > best) {
                best = cand;
                pivot = r;
            }
        }
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(f.lu(col, j), f.lu(pivot, j));
            std::swap(f.perm[static_cast<std::size_t>(col)], f.perm[static_cast<std::size_t>(pivot)]);
            f.det = -f.det;
        }
        const double p = f.lu(col, col);
        f.det *= p;
        if (p == 0.0) {
            f.singular = true;
            continue;
        }
        for (int r = col + 1; r < n; ++r) {
            const double l = f.lu(r, col) / p;
            f.lu(r, col) = l;
            for (int j = col + 1; j < n; ++j) f.lu(r, j) -= l * f.lu(col, j);
        }
    }
    return f;
}

std::vector<double> lu_solve(const Lu& f, const std::vector<double>& v) {
    const int n = f.lu.dim();
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(f.perm[static_cast<std::size_t>(i)])];
    for (int i = 1; i < n; ++i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int j = 0; j < i; ++j) s -= f.lu(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) s -= f.lu(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s / f.lu(i, i);
    }
    return x;
}

bool degenerate(double det_magnitude, const Matrix& m) {
    const double scale = m.max_abs_entry();
    double cutoff = kDegeneracyFactor;
    for (int i = 0; i < m.dim(); ++i) cutoff *= scale;
    return det_magnitude <= cutoff;
}

// ---------------------------------------------------------------------------
// Operator norm: power iteration on M^T M
// ---------------------------------------------------------------------------

double operator_norm_impl(const Matrix& m) {
    const int n = m.dim();
    if (m.max_abs_entry() == 0.0) return 0.0;

    std::vector<double> v(static_cast<std::size_t>(n), 1.0 / std::sqrt(static_cast<double>(n)));
    const double scale = m.max_abs_entry();
    const double floor = scale * scale * 1e-300;

    bool fell_back = false;
    double lam = 0.0;
    double lam_prev = -1.0;
    for (int it = 0; it < kPowerIterationCap; ++it) {
        std::vector<double> w = m.apply_transpose(m.apply(v));
        const double nw = norm2(w);
        if (nw <= floor) {
            if (fell_back) return 0.0; // only reachable when M^T M annihilates every basis vector tried
            // Start vector sits in the null space of M^T M; restart from the
            // canonical basis vector with the largest image.
            int best = 0;
            double best_norm = -1.0;
            for (int i = 0; i < n; ++i) {
                std::vector<double> e(static_cast<std::size_t>(n), 0.0);
                e[static_cast<std::size_t>(i)] = 1.0;
                const double cand = norm2(m.apply(e));
                if (cand > best_norm) {
                    best_norm = cand;
                    best = i;
                }
            }
            v.assign(static_cast<std::size_t>(n), 0.0);
            v[static_cast<std::size_t>(best)] = 1.0;
            fell_back = true;
            continue;
        }
        lam = dot(v, w); // Rayleigh quotient = ||M v||^2 for unit v
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] / nw;
        if (lam_prev >= 0.0 && std::abs(lam - lam_prev) <= kPowerIterationTol * lam) break;
        lam_prev = lam;
    }
    return std::sqrt(std::max(lam, 0.0));
}

// ---------------------------------------------------------------------------
// Spectral radius
// ---------------------------------------------------------------------------

// Characteristic polynomial of M (monic, coefficients low to high).
std::vector<double> char_poly(const Matrix& m) {
    const int n = m.dim();
    if (n == 1) return {-m(0, 0), 1.0};
    if (n == 2) {
        const double tr = m(0, 0) + m(1, 1);
        const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        return {det, -tr, 1.0};
    }
    // n == 3: lambda^3 - tr lambda^2 + c1 lambda - det
    const double tr = m(0, 0) + m(1, 1) + m(2, 2);
    const double c1 = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) +
                      (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) +
                      (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1));
    const double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                       m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                       m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    return {-det, c1, -tr, 1.0};
}

double poly_eval(const std::vector<double>& p, double x) {
    double s = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) s = s * x + p[i];
    return s;
}

double poly_eval_deriv(const std::vector<double>& p, double x) {
    double s = 0.0;
    for (std::size_t i = p.size(); i-- > 1;) s = s * x + p[i] * static_cast<double>(i);
    return s;
}

// A few Newton steps to polish a closed-form real root.
double polish_root(const std::vector<double>& p, double x) {
    for (int it = 0; it < 4; ++it) {
        const double f = poly_eval(p, x);
        const double df = poly_eval_deriv(p, x);
        if (df == 0.0) break;
        const double step = f / df;
        if (!std::isfinite(step)) break;
        const double next = x - step;
        if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x))) return next;
        x = next;
    }
    return x;
}

double spectral_radius_2x2(const Matrix& m) {
    const double tr = m(0, 0) + m(1, 1);
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double disc = tr * tr - 4.0 * det;
    if (disc < 0.0) return std::sqrt(det); // conjugate pair, |lambda|^2 = det
    const double sq = std::sqrt(disc);
    const double r1 = (tr >= 0.0) ? 0.5 * (tr + sq) : 0.5 * (tr - sq);
    const double r2 = (r1 != 0.0) ? det / r1 : 0.5 * (tr - std::copysign(sq, tr));
    const auto poly = char_poly(m);
    return std::max(std::abs(polish_root(poly, r1)), std::abs(polish_root(poly, r2)));
}

double spectral_radius_3x3(const Matrix& m) {
    const auto poly = char_poly(m); // {-det, c1, -tr, 1}
    const double b = poly[2];       // -tr
    const double c = poly[1];
    const double d = poly[0];

    // Depress: lambda = t - b/3  ->  t^3 + p t + q
    const double shift = -b / 3.0;
    const double p = c - b * b / 3.0;
    const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;

    const double disc = -4.0 * p * p * p - 27.0 * q * q;
    double rho = 0.0;
    if (disc >= 0.0) {
        // Three real roots (trigonometric form); p <= 0 here.
        if (p >= 0.0) {
            // p == 0 and disc >= 0 forces q == 0: triple root at the shift.
            rho = std::abs(polish_root(poly, shift));
        } else {
            const double amp = 2.0 * std::sqrt(-p / 3.0);
            double arg = 3.0 * q / (amp * p); // = 3q/(2p) * sqrt(-3/p)
            arg = std::clamp(arg, -1.0, 1.0);
            const double phi = std::acos(arg);
            for (int k = 0; k < 3; ++k) {
                const double t = amp * std::cos((phi - 2.0 * kPi * k) / 3.0);
                rho = std::max(rho, std::abs(polish_root(poly, t + shift)));
            }
        }
    } else {
        // One real root (Cardano, cancellation-safe), plus a conjugate pair.
        const double rad = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
        const double u = -std::copysign(1.0, q) * std::cbrt(std::abs(q) / 2.0 + rad);
        const double t1 = (u == 0.0) ? 0.0 : u - p / (3.0 * u);
        const double real_root = polish_root(poly, t1 + shift);
        rho = std::abs(real_root);
        // Deflate t^3 + p t + q = (t - t1)(t^2 + t1 t + s), s = p + t1^2.
        const double s = p + t1 * t1;
        const double re = shift - t1 / 2.0;
        const double im_sq = std::max(s - t1 * t1 / 4.0, 0.0);
        rho = std::max(rho, std::sqrt(re * re + im_sq));
    }
    return rho;
}

// rho(M) = lim ||M^(2^j)||^(1/2^j), evaluated with per-step normalization so
// neither the entries nor the accumulated exponent overflow.
double spectral_radius_squaring(const Matrix& m) {
    Matrix a = m;
    double log_accum = 0.0; // sum over i < j of log(nu_i) / 2^i
    double inv_pow = 1.0;   // 1 / 2^j
    double prev = -1.0;
    int stable = 0;
    for (int j = 0; j < 64; ++j) {
        const double nu = operator_norm_impl(a);
        if (nu == 0.0) return 0.0;
        const double est = std::exp(log_accum + std::log(nu) * inv_pow);
        if (prev > 0.0 && std::abs(est - prev) <= 1e-13 * est) {
            if (++stable >= 2) return est;
        } else {
            stable = 0;
        }
        prev = est;
        log_accum += std::log(nu) * inv_pow;
        inv_pow *= 0.5;
        Matrix scaled = a * (1.0 / nu);
        a = scaled * scaled;
    }
    return prev;
}

double spectral_radius_impl(const Matrix& m) {
    switch (m.dim()) {
        case 1: return std::abs(m(0, 0));
        case 2: return spectral_radius_2x2(m);
        case 3: return spectral_radius_3x3(m);
        default: return spectral_radius_squaring(m);
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

double operator_norm(const Matrix& m) {
    return operator_norm_impl(m);
}

SpectralReport spectral_report(const Matrix& m) {
    SpectralReport r;
    r.spectral_radius = spectral_radius_impl(m);
    r.operator_norm = operator_norm_impl(m);
    const Lu f = lu_factor(m);
    r.det_magnitude = std::abs(f.det);
    r.invertible = !f.singular && !degenerate(r.det_magnitude, m);
    return r;
}

std::vector<double> solve(const Matrix& m, const std::vector<double>& v) {
    if (static_cast<int>(v.size()) != m.dim()) throw input_error("solve: dimension mismatch");
    if (!all_finite(v)) throw input_error("solve: non-finite right-hand side");
    const Lu f = lu_factor(m);
    if (f.singular || degenerate(std::abs(f.det), m))
        throw singular_matrix_error("solve: matrix is singular to working precision");
    std::vector<double> x = lu_solve(f, v);
    // One refinement step keeps the residual near machine precision.
    std::vector<double> r = v;
    for (int i = 0; i < m.dim(); ++i) {
        double s = 0.0;
        for (int j = 0; j < m.dim(); ++j) s += m(i, j) * x[static_cast<std::size_t>(j)];
        r[static_cast<std::size_t>(i)] -= s;
    }
    const std::vector<double> corr = lu_solve(f, r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += corr[i];
    return x;
}

std::vector<double> matrix_power_norms(const Matrix& m, int power_count) {
    if (power_count < 0) throw input_error("matrix_power_norms: power count must be >= 0");
    std::vector<double> norms;
    norms.reserve(static_cast<std::size_t>(power_count) + 1);
    norms.push_back(1.0);
    Matrix acc = Matrix::identity(m.dim());
    for (int k = 1; k <= power_count; ++k) {
        acc = acc * m;
        norms.push_back(operator_norm_impl(acc));
    }
    return norms;
}

Grid sphere_grid(int m, int k, std::uint64_t seed) {
    if (m < 1) throw input_error("sphere_grid: dimension must be >= 1");
    if (k < 2) throw input_error("sphere_grid: need at least 2 directions");

    Grid grid;
    grid.reserve(static_cast<std::size_t>(k));

    if (m == 1) {
        if (k != 2) throw input_error("sphere_grid: S^0 has exactly 2 points; k must be 2");
        grid.push_back(UnitVector::trusted({1.0}));
        grid.push_back(UnitVector::trusted({-1.0}));
        return grid;
    }

    if (m == 2) {
        for (int j = 0; j < k; ++j) {
            const double theta = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(k);
            grid.push_back(UnitVector::trusted({std::cos(theta), std::sin(theta)}));
        }
        return grid;
    }

    if (m == 3) {
        const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
        for (int j = 0; j < k; ++j) {
            const double z = 1.0 - (2.0 * j + 1.0) / static_cast<double>(k);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double theta = golden_angle * static_cast<double>(j);
            grid.push_back(UnitVector::normalized({r * std::cos(theta), r * std::sin(theta), z}));
        }
        return grid;
    }

    SplitMix64 rng(seed);
    while (static_cast<int>(grid.size()) < k) {
        std::vector<double> v(static_cast<std::size_t>(m));
        for (double& x : v) x = rng.gaussian();
        if (norm2(v) < 1e-8) continue; // essentially impossible; redraw deterministically
        grid.push_back(UnitVector::normalized(std::move(v)));
    }
    return grid;
}

} // namespace attractor::linalg
