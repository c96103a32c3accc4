#pragma once

#include "wqed/types.hpp"

namespace wqed {

/// Exponential incoming wavepacket
///   phi(x) = i sqrt(alpha Gamma) exp[(i k + alpha Gamma / 2)(x - x0)] theta(x0 - x),
/// normalized to unit squared integral; theta(0) = 1/2 at the wavefront.
cd wavepacket_amplitude(double x, const PhysicalConfig& cfg);

/// Initial amplitude handed to the unfolded (chiral) semi-infinite solvers.
///
/// The chiral Hamiltonian's coupling carries an extra factor -i relative to
/// the two-directional one; feeding -i phi(x) keeps the qubit amplitude e(t)
/// identical between the two descriptions (it is the same physical state).
/// p_g, p_e and c are insensitive to this phase.
cd chiral_wavepacket(double x, const PhysicalConfig& cfg);

/// integral of |phi|^2 over (-inf, u]; equals exp(alpha Gamma (u - x0)) for
/// u <= x0 and 1 beyond.
double wavepacket_mass_below(double u, const PhysicalConfig& cfg);

/// Default spatial truncation: x0 - 40/(alpha Gamma) keeps all but ~1e-17 of
/// the wavepacket mass on the grid.
double default_support_width(const PhysicalConfig& cfg);

/// Trapezoidal approximation of the squared-magnitude integral of a sampled
/// complex series with spacing dx.
double trapezoid_norm(const std::vector<cd>& values, double dx);

/// Trapezoidal approximation of sum conj(a) * b * dx.
cd trapezoid_overlap(const std::vector<cd>& a, const std::vector<cd>& b, double dx);

// Variants for rows whose sample at index m holds the theta(0) = 1/2 average
// across a jump to zero (wavefront or light-cone edge at the end of the
// support): the last cell is integrated with the reconstructed left limit,
// keeping the rule second order across the discontinuity.
double trapezoid_norm_jump_end(const std::vector<cd>& values, std::size_t m, double dx);
cd trapezoid_overlap_jump_end(const std::vector<cd>& a, const std::vector<cd>& b, std::size_t m,
                              double dx);

}  // namespace wqed
