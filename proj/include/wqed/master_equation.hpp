#pragma once

#include <cstdint>

#include "wqed/dynamical_map.hpp"

namespace wqed {

// Time-dependent master-equation generator extracted from a map trajectory:
// three rates (absorption, emission, dephasing) and the Hamiltonian shift
// H(t) = (S/2) sigma+ sigma-.

enum class DerivativeMode { Central, Analytic };

struct RateTrajectory {
    double dt = 0.0;
    std::vector<double> gamma_plus, gamma_minus, gamma_z, shift;
    std::vector<std::uint8_t> singular;  // |Delta| or |c| below tolerance
    // smooth inputs and their derivatives, kept for half-step evaluation
    std::vector<double> p_g, p_e, dp_g, dp_e;
    std::vector<cd> c, dc;

    std::size_t size() const { return gamma_plus.size(); }
    static constexpr double singular_tol = 1e-6;
};

RateTrajectory extract_rates(const MapTrajectory& traj,
                             DerivativeMode mode = DerivativeMode::Central);

struct RateSample {
    double gamma_plus, gamma_minus, gamma_z, shift;
};
RateSample rates_from_inputs(double p_g, double p_e, double dp_g, double dp_e, cd c, cd dc);

/// F matrix of the map in the Hermitian basis {1, sx, sy, sz}/sqrt(2)
/// (third component r3 = rho_ee - rho_gg).
std::array<std::array<double, 4>, 4> map_matrix_f(const MapSnapshot& snap);

/// L = Fdot F^{-1} at a sample (derivatives from the rate trajectory).
std::array<std::array<double, 4>, 4> build_generator_matrix(const RateTrajectory& rates,
                                                            const MapTrajectory& traj,
                                                            std::size_t i);

/// Generator assembled from the extracted rates (drive terms are zero).
std::array<std::array<double, 4>, 4> rates_to_generator(const RateSample& r);

struct MeIntegration {
    std::vector<QubitState> states;
    std::vector<std::uint8_t> skipped;  // samples inside split windows
    int n_windows = 0;
    bool wide_window = false;  // some window exceeded 5 samples
};

/// RK4 integration of the master equation in Bloch form. Near the isolated
/// poles of the rates (|rate| dt above a stability bound, or flagged singular
/// samples) the integration is split: the state is reset from the map and the
/// window is excluded from consistency claims. Half-step rates are rebuilt
/// from Hermite-interpolated (p_g, p_e, c), not from the pole-like rate
/// samples themselves.
MeIntegration integrate_me(const RateTrajectory& rates, const QubitState& rho0,
                           const MapTrajectory* reset_map = nullptr);

}  // namespace wqed
