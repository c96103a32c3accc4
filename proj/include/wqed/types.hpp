#pragma once

#include <complex>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wqed {

using cd = std::complex<double>;

/// Invalid configuration or inconsistent inputs (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Overflow or loss of validity during a computation (CLI exit code 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Geometry { Infinite, SemiInfinite };

/// Physical parameters in decay-rate units: gamma sets the unit of inverse
/// time (and of inverse length, with light speed 1); omega0, k are given in
/// units of gamma and a in units of 1/gamma.
struct PhysicalConfig {
    double gamma = 1.0;    // qubit decay rate into the waveguide, Gamma = 2 V^2
    double omega0 = 20.0;  // qubit frequency
    double k = 20.0;       // wavepacket carrier frequency
    double alpha = 1.0;    // dimensionless bandwidth, alpha = dk / Gamma
    Geometry geometry = Geometry::Infinite;
    double a = 0.0;        // qubit-mirror distance (SemiInfinite only)

    double coupling() const { return std::sqrt(gamma / 2.0); }  // V
    double x0() const { return geometry == Geometry::SemiInfinite ? -a : 0.0; }
    double delay() const { return 2.0 * a; }

    void validate() const;
};

PhysicalConfig make_semi_infinite(double k0a_over_pi, double omega0 = 20.0,
                                  double k = 20.0, double alpha = 1.0,
                                  double gamma = 1.0);

/// Characteristics-aligned spacetime lattice: dx == dt so that advection is
/// an exact one-cell shift and every retarded lookup lands on a node.
struct LatticeSpec {
    double dt = 1e-3;
    double t_max = 10.0;
    double x_min = 0.0;
    double x_max = 0.0;

    std::size_t n_steps() const { return static_cast<std::size_t>(std::llround(t_max / dt)); }
    std::size_t n_x() const { return static_cast<std::size_t>(std::llround((x_max - x_min) / dt)) + 1; }

    void validate(const PhysicalConfig& cfg) const;
};

/// Adjusts dt so the qubit (and its mirror image) sit exactly on lattice
/// nodes: a = A dx with integer A. For the infinite geometry dt is returned
/// unchanged.
double align_dt(const PhysicalConfig& cfg, double dt_requested);

/// Uniformly sampled complex amplitude series.
struct ComplexSeries {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<cd> values;

    std::size_t size() const { return values.size(); }
    double time_at(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
    const cd& operator[](std::size_t i) const { return values[i]; }
    cd& operator[](std::size_t i) { return values[i]; }

    /// Linear interpolation; throws if t is outside the stored range.
    cd at_time(double t) const;

    void validate() const;
};

// Heaviside step with the theta(0) = 1/2 convention used at every
// delta-coupling and wavefront site.
inline double theta_half(double x) {
    if (x > 0.0) return 1.0;
    if (x < 0.0) return 0.0;
    return 0.5;
}

}  // namespace wqed
