#pragma once

#include <utility>

#include "wqed/types.hpp"
#include "wqed/wavepacket.hpp"

namespace wqed {

// Single photon scattering off a ground-state qubit: exact amplitudes,
// delay-ODE integrator and field reconstruction, in both geometries. The
// semi-infinite sector works in the unfolded chiral frame with the physical
// phase convention (see chiral_wavepacket).

/// Qubit amplitude for the infinite waveguide,
///   e(t) = i sqrt(alpha Gamma^2/2) (e^{-(ik+aG/2)t} - e^{-(iw0+G/2)t}) / p,
/// with p = k - w0 + i Gamma (1-alpha)/2. Evaluated through the entire
/// function (e^z - 1)/z, so the resonant alpha = 1 removable singularity
/// needs no separate branch.
cd e_infinite(double t, const PhysicalConfig& cfg);

/// Spontaneous-emission amplitude with the mirror: solution of the delay ODE
/// with e(0) = 1 and no incoming field. Each echo term is evaluated in the
/// overflow-free form e^{-lambda tau_n} (Gamma tau_n / 2)^n / n!.
cd e_sm(double t, const PhysicalConfig& cfg);

/// Exact echo series for the semi-infinite qubit amplitude (scattering
/// initial conditions). n_max must cover ceil(t / 2a) echoes.
cd e_semi_series(double t, const PhysicalConfig& cfg, int n_max);

/// Default echo count for a horizon t_max.
int default_echo_count(const PhysicalConfig& cfg, double t_max);

struct DdeOptions {
    cd e0 = 0.0;
    bool with_source = true;
    bool disable_delay = false;  // validation fault hook: drops the (G/2) e(t-2a) term
};

/// Fixed-step RK4 integration of the semi-infinite delay ODE
///   de/dt = -(i w0 + G/2) e + (G/2) e(t-2a) theta(t-2a) + source(t).
/// Delayed values at half steps use cubic Hermite interpolation of the
/// stored nodes and node derivatives; gates at kink nodes are resolved with
/// one-sided limits so the grid-aligned kinks cost no accuracy.
ComplexSeries e_semi_dde(const PhysicalConfig& cfg, double dt, double t_max,
                         const DdeOptions& opts = {});

/// Photon field for the infinite geometry, (right, left) amplitudes.
std::pair<cd, cd> phi_infinite(double x, double t, const PhysicalConfig& cfg,
                               const ComplexSeries& e_history);

/// Chiral photon field for the semi-infinite geometry.
cd phi_semi(double x, double t, const PhysicalConfig& cfg, const ComplexSeries& e_history);

struct OneExcitationSolution {
    PhysicalConfig cfg;
    ComplexSeries e;                    // qubit amplitude on the grid
    std::vector<double> p_g;            // |e(t)|^2
    std::vector<double> norm_residual;  // |e|^2 + int |phi|^2 dx - 1 per frame
};

/// Runs the one-excitation sector and evaluates the photon-field norm per
/// frame (closed form for the infinite geometry, delay ODE otherwise).
OneExcitationSolution solve_one_excitation(const PhysicalConfig& cfg, double dt, double t_max,
                                           const DdeOptions& opts = {});

}  // namespace wqed
