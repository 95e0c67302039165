#pragma once

#include <stdexcept>
#include <string>

namespace attractor {

/// Invalid argument to a library operation (bad dimension, bad range, ...).
class input_error : public std::invalid_argument {
public:
    explicit input_error(const std::string& what) : std::invalid_argument(what) {}
};

/// A matrix required to be invertible fell below the degeneracy threshold.
class singular_matrix_error : public std::runtime_error {
public:
    explicit singular_matrix_error(const std::string& what) : std::runtime_error(what) {}
};

/// The spectral gate (all eigenvalue magnitudes < 1) failed.
class eigenvalue_gate_error : public std::runtime_error {
public:
    eigenvalue_gate_error(const std::string& what, double spectral_radius)
        : std::runtime_error(what), spectral_radius_(spectral_radius) {}

    double spectral_radius() const { return spectral_radius_; }

private:
    double spectral_radius_;
};

/// An iteration reached its cap before its certification criterion held.
class non_convergence_error : public std::runtime_error {
public:
    non_convergence_error(const std::string& what, double last_residual)
        : std::runtime_error(what), last_residual_(last_residual) {}

    double last_residual() const { return last_residual_; }

private:
    double last_residual_;
};

/// A simulated trajectory left the representable range.
class divergence_error : public std::runtime_error {
public:
    divergence_error(const std::string& what, long step)
        : std::runtime_error(what), step_(step) {}

    long step() const { return step_; }

private:
    long step_;
};

/// The point set handed to a fit has no usable shape information.
class degenerate_fit_error : public std::runtime_error {
public:
    explicit degenerate_fit_error(const std::string& what) : std::runtime_error(what) {}
};

/// Reading or writing an artifact file failed.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

/// A config file, inline matrix, or stored artifact could not be parsed.
class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace attractor
