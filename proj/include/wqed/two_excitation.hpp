#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wqed/one_excitation.hpp"
#include "wqed/types.hpp"

namespace wqed {

// Stimulated emission: a single photon scattering off an initially excited
// qubit. The photon-plus-excited-qubit amplitude psi is marched along
// characteristics (dx = dt, exact advection); the two-photon amplitude chi is
// never stored densely but reconstructed from psi history on demand.

/// Optional per-frame snapshot store (subsampled full rows).
struct FieldHistory {
    Geometry geometry = Geometry::Infinite;
    double dt = 0.0;
    double x_min = 0.0;
    std::size_t n_x = 0;
    std::vector<std::string> components;  // {"psi"} or {"psi_r", "psi_l"}
    std::vector<double> frame_times;
    std::vector<std::vector<std::vector<cd>>> frames;  // [frame][component][x index]

    double x_at(std::size_t j) const { return x_min + static_cast<double>(j) * dt; }
};

struct TwoExcOptions {
    bool evolve_left = false;     // march x < -a numerically instead of the exact feed
    double left_width = 20.0;     // lattice extension below the qubit in mode (b)
    bool store_history = false;   // keep rows for chi reconstruction (norms, P_ab)
    std::size_t history_stride = 1;
    bool store_fields = false;    // keep a FieldHistory for dumps / overlap_c
    std::size_t field_stride = 0; // 0 chooses ~200 frames
    bool disable_delay = false;   // validation fault hook: drops (G/2) psi(x-2a, t-2a)
};

/// Full stored history (row-subsampled) plus exact per-frame norms; internal
/// to the reconstruction routines.
struct SolverHistory {
    Geometry geometry = Geometry::Infinite;
    PhysicalConfig cfg;
    double dt = 0.0;
    double x_min = 0.0;           // semi lattice origin
    std::size_t n_steps = 0;
    std::size_t stride = 1;
    std::vector<std::vector<cd>> rows;            // semi: full rows at stored times
    std::vector<std::vector<cd>> tri_r, tri_l;    // infinite: psi_R on [0,t], psi_L on [-t,0]
    std::vector<double> norm_r;   // per-frame ||psi_R||^2 incl. analytic tail (full resolution)
    std::vector<double> norm_l;   // per-frame ||psi_L||^2 (infinite only)
    std::vector<cd> e_sm_grid;    // semi: e_sm at full resolution
};

struct TwoExcitationSolution {
    PhysicalConfig cfg;
    double dt = 0.0;
    std::vector<double> p_e;            // ||psi_1||^2 per frame
    ComplexSeries c;                    // <phi_1 | psi_1> per frame
    std::vector<double> chi_norm;       // 1 - p_e by construction
    std::vector<double> norm_residual;  // p_e + ||chi_2||^2 - 1 at reconstructed frames (else 0)
    std::vector<std::size_t> residual_frames;  // frame indices where the residual was reconstructed
    std::optional<FieldHistory> fields;
    std::shared_ptr<const SolverHistory> history;
};

/// Resonant closed forms for the infinite waveguide (time in 1/Gamma, k = w0).
struct ResonantValues {
    double p_g, p_e;
    cd c;
};
struct ResonantDerivatives {
    double dp_g, dp_e;
    cd dc;
};
ResonantValues closed_form_resonant(double t, double alpha, double omega0);
ResonantDerivatives closed_form_resonant_derivatives(double t, double alpha, double omega0);

/// Exact solution left of the qubit: psi(x, t) = phi0(x - t) e_sm(t) with
/// phi0 the chiral initial amplitude. Valid for x < -a.
cd exact_psi_left_of_qubit(double x, double t, const PhysicalConfig& cfg);

TwoExcitationSolution solve_infinite(const PhysicalConfig& cfg, double dt, double t_max,
                                     const TwoExcOptions& opts = {});
TwoExcitationSolution solve_semi_infinite(const PhysicalConfig& cfg, double dt, double t_max,
                                          const TwoExcOptions& opts = {});

/// ||chi_2(t)||^2 reconstructed by quadrature from the psi history at a
/// stored frame index (full-resolution index; must be stride-aligned).
double reconstruct_chi_norm(const TwoExcitationSolution& sol, std::size_t frame);

struct SteadyStateProbabilities {
    double p_rr, p_rl, p_ll;
    double residual_excitation;  // p_e at t_max
};

/// Two-photon scattering outcome probabilities at t_max (infinite geometry,
/// store_history mode). Throws if the qubit has not decayed to p_e < 1e-4.
SteadyStateProbabilities steady_state_probabilities(const TwoExcitationSolution& sol);

/// c(t) recomputed from stored field frames; cross-checks the in-march value.
ComplexSeries overlap_c(const OneExcitationSolution& one, const TwoExcitationSolution& two);

}  // namespace wqed
