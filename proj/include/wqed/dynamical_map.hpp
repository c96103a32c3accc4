#pragma once

#include <array>
#include <optional>
#include <random>

#include "wqed/two_excitation.hpp"
#include "wqed/types.hpp"

namespace wqed {

using Mat2 = std::array<std::array<cd, 2>, 2>;  // basis order {|e>, |g>}
using Mat4 = std::array<std::array<cd, 4>, 4>;

/// Qubit state as the Bloch vector r = (2 Re rho_ge, 2 Im rho_ge, rho_gg - rho_ee).
struct QubitState {
    double x = 0.0, y = 0.0, z = 1.0;

    Mat2 density_matrix() const;
    static QubitState from_density_matrix(const Mat2& rho);
    void validate() const;
};

QubitState random_state(std::mt19937_64& rng);  // uniform in the Bloch ball

double trace_distance(const QubitState& a, const QubitState& b);

/// One time slice of the dynamical map.
struct MapSnapshot {
    double t = 0.0;
    double p_g = 0.0;
    double p_e = 1.0;
    cd c = 1.0;

    double delta() const { return p_e - p_g; }
    double theta() const { return std::arg(c); }
    double det_m() const { return std::norm(c) * delta(); }
};

struct MapTrajectory {
    Geometry geometry = Geometry::Infinite;
    double dt = 0.0;
    std::vector<MapSnapshot> snapshots;
    // set when built from the resonant closed forms; enables analytic derivatives
    std::optional<std::pair<double, double>> analytic_params;  // (alpha, omega0)

    std::size_t size() const { return snapshots.size(); }
    const MapSnapshot& operator[](std::size_t i) const { return snapshots[i]; }
};

/// Density-matrix action of the map (Eq. form: rho_ee(t) = p_e - Delta rho_gg,
/// off-diagonal scaled by c); trace preserving by construction.
QubitState apply_map(const MapSnapshot& snap, const QubitState& rho0);

struct BlochAffine {
    std::array<std::array<double, 3>, 3> m;
    std::array<double, 3> v;
};
BlochAffine bloch_affine(const MapSnapshot& snap);

double det3(const std::array<std::array<double, 3>, 3>& m);

/// Choi matrix of the (linearized) map on the four matrix units; Hermitian,
/// trace 2; completely positive iff all eigenvalues are nonnegative.
Mat4 choi_matrix(const MapSnapshot& snap);

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations (ascending).
std::array<double, 4> hermitian_eigenvalues(const Mat4& m);

double choi_min_eigenvalue(const MapSnapshot& snap);

MapTrajectory build_trajectory(const OneExcitationSolution& one, const TwoExcitationSolution& two);

/// Resonant infinite-waveguide trajectory from the closed forms (gamma = 1).
MapTrajectory closed_form_trajectory(double alpha, double omega0, double dt, double t_max);

/// Spontaneous-emission map: (p_g, p_e, c) = (0, |e_sm|^2, e_sm).
MapTrajectory emission_trajectory(const PhysicalConfig& cfg, double dt, double t_max);

}  // namespace wqed
