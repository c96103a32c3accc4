#pragma once

#include "wqed/master_equation.hpp"

namespace wqed {

// Non-Markovianity diagnostics built on the map trajectory: the Delta
// negativity profile, the geometric measure (growth of |det M_t|), the BLP
// measure over antipodal pure pairs, and divisibility verdicts.

constexpr double verdict_tol = 1e-6;

/// Resonant infinite-waveguide Delta(t) in closed form (gamma = 1).
double delta_closed_form(double t, double alpha);

struct StationaryPoint {
    int count = 0;           // 0 or 1
    double t_star = 0.0;     // crossing of f and g (valid when count == 1)
    double delta_min = 0.0;  // Delta at the stationary point
};

/// Locates the stationary point of Delta(t) by bisection on the crossing of
/// f(t) = 5 e^{at} + 4a and g(t) = 4a e^{(a+1)t/2} + a e^{at} + 4
/// (one minimum for 0 < alpha < 5, none for alpha >= 5).
StationaryPoint delta_stationary_analysis(double alpha, double t_tol = 1e-6);

/// N_Delta(t) = -min(0, Delta(t)) per sample.
std::vector<double> negativity_profile(const MapTrajectory& traj);

/// Geometric measure: total discrete growth of |det M_t|.
double gm_measure(const MapTrajectory& traj);

/// BLP measure over antipodal pure pairs in the XZ plane (the map is
/// covariant under Z rotations); uniform angle grid plus golden-section
/// refinement around the best angle.
double blp_measure(const MapTrajectory& traj, int n_angles = 64);

struct DivisibilityVerdict {
    bool cp_broken = false;  // some rate negative outside singular windows
    bool p_broken = false;   // Delta < 0 with |c| above tolerance somewhere
};

DivisibilityVerdict divisibility_verdict(const MapTrajectory& traj, const RateTrajectory& rates);

struct MeasureReport {
    PhysicalConfig params;
    double max_n_delta = 0.0;
    double gm = 0.0;
    double blp = 0.0;
    bool cp_broken = false;
    bool p_broken = false;
    int singular_samples = 0;
};

MeasureReport measure_report(const PhysicalConfig& cfg, const MapTrajectory& traj,
                             const RateTrajectory& rates);

}  // namespace wqed
