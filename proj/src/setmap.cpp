#include "attractor/setmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "attractor/errors.hpp"

namespace attractor::setmap {

using convexgeom::SupportSample;
using linalg::Grid;
using linalg::GridPtr;
using linalg::Matrix;
using linalg::UnitVector;

namespace {

void require_positive_epsilon(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw input_error("epsilon must be positive and finite");
}

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

// eps * sum_{k < iterations} ||(M^T)^k n||, compensated.
double partial_sum_impl(const Matrix& m, double epsilon, const UnitVector& n, int iterations) {
    std::vector<double> w = n.components();
    double sum = 0.0;
    double comp = 0.0;
    for (int k = 0; k < iterations; ++k) {
        const double term = epsilon * linalg::norm2(w);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (k + 1 < iterations) w = m.apply_transpose(w);
    }
    return sum;
}

} // namespace

namespace detail {

TailCertificate certify_tail(const Matrix& a, double epsilon, double tol, int max_iter,
                             bool keep_powers) {
    TailCertificate cert;
    cert.norms.push_back(1.0);
    Matrix acc = Matrix::identity(a.dim());
    if (keep_powers) cert.powers.push_back(acc);

    int k = 0;
    while (true) {
        const double norm_k = cert.norms.back();
        if (norm_k == 0.0) { // power vanished; the series is exactly finite
            cert.order = k;
            cert.bound = 0.0;
            return cert;
        }
        if (k >= kRatioWindow) {
            double r = 0.0;
            for (int j = k - kRatioWindow; j < k; ++j) {
                const double denom = cert.norms[static_cast<std::size_t>(j)];
                r = std::max(r, denom > 0.0 ? cert.norms[static_cast<std::size_t>(j + 1)] / denom : 0.0);
            }
            if (r < 1.0) {
                const double bound = epsilon * norm_k * r / (1.0 - r);
                if (bound <= tol) {
                    cert.order = k;
                    cert.bound = bound;
                    return cert;
                }
            }
        }
        if (k >= max_iter) {
            throw non_convergence_error(
                "tail certification did not reach tol " + std::to_string(tol) + " within " +
                    std::to_string(max_iter) + " iterations",
                epsilon * norm_k);
        }
        acc = acc * a;
        cert.norms.push_back(linalg::operator_norm(acc));
        if (keep_powers) cert.powers.push_back(acc);
        ++k;
    }
}

} // namespace detail

SupportSample support_step(const Matrix& m, double epsilon,
                           const std::function<double(const UnitVector&)>& support_fn,
                           GridPtr grid) {
    require_positive_epsilon(epsilon);
    if (!grid || grid->empty()) throw input_error("support_step: empty grid");

    std::vector<double> values;
    values.reserve(grid->size());
    for (const UnitVector& n : *grid) {
        const std::vector<double> w = m.apply_transpose(n.components());
        const double wn = linalg::norm2(w);
        double value = epsilon;
        if (wn > 0.0) {
            const double h = support_fn(UnitVector::normalized(w));
            if (h < 0.0) throw input_error("support_step: input body must contain the origin");
            value += wn * h;
        }
        // wn == 0 collapses the image onto {0}; the step is the plain eps-ball.
        values.push_back(value);
    }
    return SupportSample(std::move(grid), std::move(values));
}

double support_partial_sum(const Matrix& m, double epsilon, const UnitVector& n, int iterations) {
    require_positive_epsilon(epsilon);
    if (iterations < 0) throw input_error("support_partial_sum: iterations must be >= 0");
    if (n.dim() != m.dim()) throw input_error("support_partial_sum: dimension mismatch");
    return partial_sum_impl(m, epsilon, n, iterations);
}

double divergence_probe(const Matrix& m, double epsilon, const UnitVector& n, int iterations) {
    require_positive_epsilon(epsilon);
    if (iterations < 1) throw input_error("divergence_probe: iterations must be >= 1");
    if (n.dim() != m.dim()) throw input_error("divergence_probe: dimension mismatch");
    if (!linalg::spectral_report(m).invertible)
        throw singular_matrix_error("divergence_probe: matrix is singular to working precision");
    return partial_sum_impl(m, epsilon, n, iterations);
}

std::pair<SupportSample, IterationTrace> iterate_to_fixed_point(const Matrix& m, double epsilon,
                                                                GridPtr grid, double tol,
                                                                int max_iter) {
    require_positive_epsilon(epsilon);
    if (!(tol > 0.0)) throw input_error("iterate_to_fixed_point: tol must be positive");
    if (!grid || grid->empty()) throw input_error("iterate_to_fixed_point: empty grid");
    if ((*grid)[0].dim() != m.dim()) throw input_error("iterate_to_fixed_point: dimension mismatch");
    gate(m);

    const Matrix mt = m.transpose();
    const detail::TailCertificate cert = detail::certify_tail(mt, epsilon, tol, max_iter, false);
    const int order = cert.order;
    const std::size_t dirs = grid->size();

    IterationTrace trace;
    trace.grid = grid;
    trace.converged_at = order;
    trace.partial_values.assign(static_cast<std::size_t>(order) + 2,
                                std::vector<double>(dirs, 0.0));
    trace.residuals.assign(static_cast<std::size_t>(order) + 1, 0.0);

    // Per-direction accumulation of eps * sum_k ||(M^T)^k n||; iterate row
    // i+1 adds term k = i. Residual i is the sup over directions of that term.
    std::vector<double> sums(dirs, 0.0);
    std::vector<double> comps(dirs, 0.0);
    std::vector<std::vector<double>> ws;
    ws.reserve(dirs);
    for (const UnitVector& n : *grid) ws.push_back(n.components());

    for (int k = 0; k <= order; ++k) {
        double residual = 0.0;
        for (std::size_t j = 0; j < dirs; ++j) {
            const double term = epsilon * linalg::norm2(ws[j]);
            residual = std::max(residual, term);
            const double y = term - comps[j];
            const double t = sums[j] + y;
            comps[j] = (t - sums[j]) - y;
            sums[j] = t;
            trace.partial_values[static_cast<std::size_t>(k) + 1][j] = sums[j];
            if (k < order) ws[j] = mt.apply(ws[j]);
        }
        trace.residuals[static_cast<std::size_t>(k)] = residual;
    }

    SupportSample fixed(grid, trace.partial_values.back());
    return {std::move(fixed), std::move(trace)};
}

} // namespace attractor::setmap
