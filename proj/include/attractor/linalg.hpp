#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace attractor::linalg {

/// Entrywise magnitude below which |det M| <= factor * (max |entry|)^m is
/// treated as singular. Scale-aware: multiplying M by c scales both sides.
inline constexpr double kDegeneracyFactor = 1e-12;

/// Tolerance on | ||n|| - 1 | for unit vectors.
inline constexpr double kUnitNormTol = 1e-12;

// ---------------------------------------------------------------------------
// Small dense vectors (free functions over std::vector<double>)
// ---------------------------------------------------------------------------

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& v);
bool all_finite(const std::vector<double>& v);

/// a + s*b
std::vector<double> axpy(const std::vector<double>& a, double s, const std::vector<double>& b);

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

/// Dense m-by-m real matrix, row-major. Entries are validated finite at
/// construction; dim >= 1.
class Matrix {
public:
    explicit Matrix(int dim);                            // zero matrix
    Matrix(int dim, std::vector<double> row_major);

    static Matrix identity(int dim);
    static Matrix scalar(int dim, double s);

    int dim() const { return dim_; }

    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * dim_ + j]; }

    const std::vector<double>& entries() const { return a_; }

    Matrix transpose() const;
    Matrix operator*(const Matrix& rhs) const;
    Matrix operator*(double s) const;

    std::vector<double> apply(const std::vector<double>& v) const;
    std::vector<double> apply_transpose(const std::vector<double>& v) const;

    double max_abs_entry() const;

private:
    int dim_;
    std::vector<double> a_;
};

// ---------------------------------------------------------------------------
// UnitVector
// ---------------------------------------------------------------------------

/// Point on the unit sphere S^{m-1}. | ||v|| - 1 | <= 1e-12 is enforced at
/// the checked factory; normalized() projects an arbitrary nonzero vector.
class UnitVector {
public:
    /// Scale v to unit length. Throws input_error if v is (near) zero or
    /// non-finite.
    static UnitVector normalized(std::vector<double> v);

    /// Accept v as already unit length within kUnitNormTol, else throw.
    static UnitVector checked(std::vector<double> v);

    /// Accept v verbatim. For generators and file loaders whose output is
    /// validated elsewhere; no invariant check beyond finiteness.
    static UnitVector trusted(std::vector<double> v);

    int dim() const { return static_cast<int>(c_.size()); }
    const std::vector<double>& components() const { return c_; }
    double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }

private:
    explicit UnitVector(std::vector<double> c) : c_(std::move(c)) {}
    std::vector<double> c_;
};

using Grid = std::vector<UnitVector>;
using GridPtr = std::shared_ptr<const Grid>;

// ---------------------------------------------------------------------------
// Spectral data
// ---------------------------------------------------------------------------

struct SpectralReport {
    double spectral_radius = 0.0;  // max eigenvalue magnitude
    double operator_norm = 0.0;    // largest singular value
    bool invertible = false;
    double det_magnitude = 0.0;
};

/// Spectral radius, operator norm, and an invertibility verdict for M.
///
/// Eigenvalue magnitudes come from characteristic-polynomial closed forms for
/// m <= 3 and from a normalized repeated-squaring limit of ||M^(2^j)||^(1/2^j)
/// for m >= 4. The operator norm is a power iteration on M^T M from the
/// deterministic start (1,...,1)/sqrt(m); if that start lies in the null
/// space of M^T M, the canonical basis vector maximizing ||M e_i|| is used
/// instead. Cap 10000 iterations, relative tolerance 1e-12.
SpectralReport spectral_report(const Matrix& m);

/// Largest singular value alone (the power iteration described above).
double operator_norm(const Matrix& m);

/// Solve M w = v by LU with partial pivoting plus one step of iterative
/// refinement. Throws singular_matrix_error when M is degenerate.
std::vector<double> solve(const Matrix& m, const std::vector<double>& v);

/// (||M^0||_2, ||M^1||_2, ..., ||M^K||_2) from explicitly accumulated
/// products. Entry 0 is exactly 1.
std::vector<double> matrix_power_norms(const Matrix& m, int power_count);

/// k unit directions on S^{m-1}.
///   m = 2: equally spaced angles from 0, counterclockwise (seed ignored).
///   m = 3: Fibonacci spiral lattice (seed ignored).
///   m >= 4: seeded isotropic directions (normalized standard normals).
///   m = 1: the two points of S^0; k must be 2.
Grid sphere_grid(int m, int k, std::uint64_t seed);

} // namespace attractor::linalg
