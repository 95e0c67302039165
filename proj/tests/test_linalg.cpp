#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "attractor/errors.hpp"
#include "attractor/linalg.hpp"
#include "test_helpers.hpp"

using namespace attractor;
using namespace attractor::linalg;
using testutil::random_contraction;
using testutil::random_matrix;

namespace {

// Largest singular value of a 2x2 matrix from the closed-form eigenvalues of
// M^T M; independent of the power-iteration path in the library.
double sigma_max_2x2(const Matrix& m) {
    const double a = m(0, 0) * m(0, 0) + m(1, 0) * m(1, 0);
    const double b = m(0, 0) * m(0, 1) + m(1, 0) * m(1, 1);
    const double c = m(0, 1) * m(0, 1) + m(1, 1) * m(1, 1);
    const double mean = 0.5 * (a + c);
    const double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    return std::sqrt(mean + rad);
}

} // namespace

TEST_CASE("matrix construction validates input") {
    CHECK_THROWS_AS(Matrix(0), input_error);
    CHECK_THROWS_AS(Matrix(2, {1.0, 2.0, 3.0}), input_error);
    CHECK_THROWS_AS(Matrix(2, {1.0, 2.0, 3.0, std::nan("")}), input_error);
    const Matrix id = Matrix::identity(3);
    CHECK(id(0, 0) == 1.0);
    CHECK(id(0, 1) == 0.0);
}

TEST_CASE("spectral_report on closed-form cases") {
    SUBCASE("identity") {
        const auto rep = spectral_report(Matrix::identity(2));
        CHECK(rep.spectral_radius == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.operator_norm == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.invertible);
        CHECK(rep.det_magnitude == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("diagonal") {
        const auto rep = spectral_report(Matrix(2, {0.5, 0.0, 0.0, 0.25}));
        CHECK(rep.spectral_radius == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(rep.operator_norm == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(rep.invertible);
    }
    SUBCASE("scaled rotation has a complex pair") {
        const auto rep = spectral_report(Matrix(2, {0.0, -0.7, 0.7, 0.0}));
        CHECK(rep.spectral_radius == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(rep.operator_norm == doctest::Approx(0.7).epsilon(1e-12));
    }
    SUBCASE("singular matrix reported as such") {
        const auto rep = spectral_report(Matrix(2, {1.0, 0.0, 0.0, 0.0}));
        CHECK_FALSE(rep.invertible);
        CHECK(rep.det_magnitude == doctest::Approx(0.0));
    }
}

TEST_CASE("spectral radius of powers multiplies") {
    SplitMix64 rng(2024);
    for (int dim : {2, 3}) {
        for (int trial = 0; trial < 20; ++trial) {
            const Matrix m = random_matrix(rng, dim);
            const double rho = spectral_report(m).spectral_radius;
            Matrix p = m;
            for (int k = 2; k <= 5; ++k) {
                p = p * m;
                const double rho_k = spectral_report(p).spectral_radius;
                const double expected = std::pow(rho, k);
                CHECK(rho_k == doctest::Approx(expected).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("spectral radius never exceeds the operator norm") {
    SplitMix64 rng(7);
    for (int dim : {2, 3, 5}) {
        for (int trial = 0; trial < 15; ++trial) {
            const Matrix m = random_matrix(rng, dim);
            const auto rep = spectral_report(m);
            CHECK(rep.spectral_radius <= rep.operator_norm + 1e-9);
        }
    }
}

TEST_CASE("spectral radius for m >= 4 matches block-diagonal construction") {
    // diag blocks: rotation scaled by 0.8 and diag(0.3, 0.6) -> rho = 0.8.
    Matrix m(4);
    m(0, 0) = 0.0;
    m(0, 1) = -0.8;
    m(1, 0) = 0.8;
    m(1, 1) = 0.0;
    m(2, 2) = 0.3;
    m(3, 3) = 0.6;
    const auto rep = spectral_report(m);
    CHECK(rep.spectral_radius == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("operator norm start-vector fallback") {
    // (1,1)/sqrt(2) is exactly in the null space of M^T M here.
    const Matrix m(2, {1.0, -1.0, -1.0, 1.0});
    CHECK(operator_norm(m) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(operator_norm(Matrix(2)) == 0.0);
}

TEST_CASE("solve") {
    SUBCASE("identity") {
        const auto w = solve(Matrix::identity(2), {3.0, 4.0});
        CHECK(w[0] == doctest::Approx(3.0).epsilon(1e-15));
        CHECK(w[1] == doctest::Approx(4.0).epsilon(1e-15));
    }
    SUBCASE("diagonal inversion") {
        const auto w = solve(Matrix(2, {0.5, 0.0, 0.0, 0.25}), {1.0, 1.0});
        CHECK(w[0] == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(w[1] == doctest::Approx(4.0).epsilon(1e-14));
    }
    SUBCASE("random 3x3: residual is the oracle") {
        SplitMix64 rng(99);
        for (int trial = 0; trial < 25; ++trial) {
            const Matrix m = random_contraction(rng, 3, 0.3, 0.9);
            std::vector<double> v(3);
            for (double& c : v) c = rng.uniform(-2.0, 2.0);
            const auto w = solve(m, v);
            const auto mv = m.apply(w);
            double res = 0.0;
            for (int i = 0; i < 3; ++i) res += (mv[i] - v[i]) * (mv[i] - v[i]);
            CHECK(std::sqrt(res) <= 1e-10 * std::max(norm2(v), 1e-300));
        }
    }
    SUBCASE("singular matrix throws") {
        CHECK_THROWS_AS(solve(Matrix(2, {1.0, 2.0, 2.0, 4.0}), {1.0, 1.0}), singular_matrix_error);
    }
}

TEST_CASE("matrix_power_norms") {
    SUBCASE("scalar matrix") {
        const auto norms = matrix_power_norms(Matrix::scalar(2, 0.5), 3);
        REQUIRE(norms.size() == 4);
        CHECK(norms[0] == 1.0);
        CHECK(norms[1] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(norms[2] == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(norms[3] == doctest::Approx(0.125).epsilon(1e-12));
    }
    SUBCASE("identity") {
        const auto norms = matrix_power_norms(Matrix::identity(3), 2);
        for (double n : norms) CHECK(n == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("upper-triangular vs explicit singular-value oracle") {
        const Matrix m(2, {0.5, 0.3, 0.0, 0.4});
        const auto norms = matrix_power_norms(m, 8);
        Matrix p = Matrix::identity(2);
        for (int k = 1; k <= 8; ++k) {
            p = p * m;
            CHECK(norms[static_cast<std::size_t>(k)] ==
                  doctest::Approx(sigma_max_2x2(p)).epsilon(1e-9));
        }
    }
    SUBCASE("submultiplicative") {
        SplitMix64 rng(11);
        const Matrix m = random_matrix(rng, 3);
        const auto norms = matrix_power_norms(m, 10);
        for (std::size_t j = 0; j <= 10; ++j)
            for (std::size_t k = 0; j + k <= 10; ++k)
                CHECK(norms[j + k] <= norms[j] * norms[k] + 1e-9);
    }
    SUBCASE("negative count throws") {
        CHECK_THROWS_AS(matrix_power_norms(Matrix::identity(2), -1), input_error);
    }
}

TEST_CASE("sphere_grid planar layout") {
    SUBCASE("quarter turns") {
        const Grid g = sphere_grid(2, 4, 0);
        REQUIRE(g.size() == 4);
        CHECK(g[0][0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(g[0][1] == doctest::Approx(0.0));
        CHECK(g[1][0] == doctest::Approx(0.0));
        CHECK(g[1][1] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(g[2][0] == doctest::Approx(-1.0).epsilon(1e-15));
        CHECK(g[3][1] == doctest::Approx(-1.0).epsilon(1e-15));
    }
    SUBCASE("one-degree spacing, counterclockwise") {
        const Grid g = sphere_grid(2, 360, 0);
        REQUIRE(g.size() == 360);
        const double cos1deg = std::cos(2.0 * 3.14159265358979323846 / 360.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(std::abs(norm2(g[i].components()) - 1.0) <= kUnitNormTol);
            const auto& a = g[i];
            const auto& b = g[(i + 1) % 360];
            CHECK(dot(a.components(), b.components()) == doctest::Approx(cos1deg).epsilon(1e-12));
            // counterclockwise: cross product of consecutive directions is positive
            CHECK(a[0] * b[1] - a[1] * b[0] > 0.0);
        }
    }
}

TEST_CASE("sphere_grid spiral layout has near-uniform nearest-neighbor gaps") {
    const int k = 500;
    const Grid g = sphere_grid(3, k, 0);
    REQUIRE(g.size() == static_cast<std::size_t>(k));

    double min_gap = 1e30, max_gap = 0.0, sum_gap = 0.0;
    for (int i = 0; i < k; ++i) {
        CHECK(std::abs(norm2(g[static_cast<std::size_t>(i)].components()) - 1.0) <= kUnitNormTol);
        double best = 1e30;
        for (int j = 0; j < k; ++j) {
            if (i == j) continue;
            const double c = std::clamp(dot(g[static_cast<std::size_t>(i)].components(),
                                            g[static_cast<std::size_t>(j)].components()),
                                        -1.0, 1.0);
            best = std::min(best, std::acos(c));
        }
        min_gap = std::min(min_gap, best);
        max_gap = std::max(max_gap, best);
        sum_gap += best;
    }
    // Ideal gap for k hexagonally packed points covering the 4*pi sphere.
    const double ideal = std::sqrt(8.0 * 3.14159265358979323846 / (std::sqrt(3.0) * k));
    CHECK(sum_gap / k >= ideal / 2.0);
    CHECK(sum_gap / k <= 2.0 * ideal);
    CHECK(min_gap >= ideal / 2.0);
    CHECK(max_gap <= 2.0 * ideal);
}

TEST_CASE("sphere_grid seeded isotropic layout for m >= 4") {
    const Grid a = sphere_grid(4, 100, 42);
    const Grid b = sphere_grid(4, 100, 42);
    const Grid c = sphere_grid(4, 100, 43);
    REQUIRE(a.size() == 100);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::abs(norm2(a[i].components()) - 1.0) <= kUnitNormTol);
        CHECK(a[i].components() == b[i].components()); // reproducible
    }
    bool any_different = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].components() != c[i].components()) any_different = true;
    CHECK(any_different);
}

TEST_CASE("sphere_grid edge cases") {
    const Grid s0 = sphere_grid(1, 2, 0);
    CHECK(s0[0][0] == 1.0);
    CHECK(s0[1][0] == -1.0);
    CHECK_THROWS_AS(sphere_grid(1, 3, 0), input_error);
    CHECK_THROWS_AS(sphere_grid(2, 1, 0), input_error);
    CHECK_THROWS_AS(sphere_grid(0, 4, 0), input_error);
}

TEST_CASE("unit vector factories") {
    const auto u = UnitVector::normalized({3.0, 4.0});
    CHECK(u[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(u[1] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK_THROWS_AS(UnitVector::normalized({0.0, 0.0}), input_error);
    CHECK_THROWS_AS(UnitVector::checked({0.5, 0.5}), input_error);
    CHECK_NOTHROW(UnitVector::checked({1.0, 0.0}));
}
