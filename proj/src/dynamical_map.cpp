#include "wqed/dynamical_map.hpp"

#include <cmath>

namespace wqed {

Mat2 QubitState::density_matrix() const {
    // rho_ee = (1 - z)/2, rho_gg = (1 + z)/2, rho_eg = (x - i y)/2
    Mat2 rho;
    rho[0][0] = 0.5 * (1.0 - z);
    rho[0][1] = 0.5 * cd(x, -y);
    rho[1][0] = 0.5 * cd(x, y);
    rho[1][1] = 0.5 * (1.0 + z);
    return rho;
}

QubitState QubitState::from_density_matrix(const Mat2& rho) {
    QubitState s;
    s.x = 2.0 * rho[1][0].real();
    s.y = 2.0 * rho[1][0].imag();
    s.z = (rho[1][1] - rho[0][0]).real();
    return s;
}

void QubitState::validate() const {
    double r2 = x * x + y * y + z * z;
    if (!(r2 <= 1.0 + 2e-12) || !std::isfinite(r2))
        throw ConfigError("invalid qubit state: Bloch vector outside the unit ball");
}

QubitState random_state(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double gx = gauss(rng), gy = gauss(rng), gz = gauss(rng);
    double norm = std::sqrt(gx * gx + gy * gy + gz * gz);
    double r = std::cbrt(uni(rng));
    return {r * gx / norm, r * gy / norm, r * gz / norm};
}

double trace_distance(const QubitState& a, const QubitState& b) {
    double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return 0.5 * std::sqrt(dx * dx + dy * dy + dz * dz);
}

QubitState apply_map(const MapSnapshot& snap, const QubitState& rho0) {
    rho0.validate();
    Mat2 rho = rho0.density_matrix();
    Mat2 out;
    out[0][0] = snap.p_e * rho[0][0] + snap.p_g * rho[1][1];
    out[1][1] = (1.0 - snap.p_e) * rho[0][0] + (1.0 - snap.p_g) * rho[1][1];
    out[0][1] = snap.c * rho[0][1];
    out[1][0] = std::conj(snap.c) * rho[1][0];
    return QubitState::from_density_matrix(out);
}

BlochAffine bloch_affine(const MapSnapshot& snap) {
    BlochAffine ba{};
    double re = snap.c.real(), im = snap.c.imag();
    ba.m = {{{re, im, 0.0}, {-im, re, 0.0}, {0.0, 0.0, snap.delta()}}};
    ba.v = {0.0, 0.0, 1.0 - snap.p_e - snap.p_g};
    return ba;
}

double det3(const std::array<std::array<double, 3>, 3>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

namespace {

// linear extension of the trace-1 map to arbitrary 2x2 inputs
Mat2 apply_linear(const MapSnapshot& s, const Mat2& x) {
    Mat2 out;
    out[0][0] = s.p_e * x[0][0] + s.p_g * x[1][1];
    out[1][1] = (1.0 - s.p_e) * x[0][0] + (1.0 - s.p_g) * x[1][1];
    out[0][1] = s.c * x[0][1];
    out[1][0] = std::conj(s.c) * x[1][0];
    return out;
}

}  // namespace

Mat4 choi_matrix(const MapSnapshot& snap) {
    Mat4 choi{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Mat2 unit{};
            unit[i][j] = 1.0;
            Mat2 mapped = apply_linear(snap, unit);
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) choi[2 * i + k][2 * j + l] = mapped[k][l];
        }
    return choi;
}

std::array<double, 4> hermitian_eigenvalues(const Mat4& m) {
    Mat4 a = m;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) off += std::norm(a[p][q]);
        if (off < 1e-30) break;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) {
                cd apq = a[p][q];
                if (std::abs(apq) < 1e-300) continue;
                double app = a[p][p].real(), aqq = a[q][q].real();
                // complex Jacobi rotation zeroing a[p][q]
                double abs_apq = std::abs(apq);
                cd phase = apq / abs_apq;
                double tau = (aqq - app) / (2.0 * abs_apq);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double cth = 1.0 / std::sqrt(1.0 + t * t);
                double sth = t * cth;
                cd s_ph = sth * phase;
                for (int r = 0; r < 4; ++r) {
                    cd arp = a[r][p], arq = a[r][q];
                    a[r][p] = cth * arp - std::conj(s_ph) * arq;
                    a[r][q] = s_ph * arp + cth * arq;
                }
                for (int r = 0; r < 4; ++r) {
                    cd apr = a[p][r], aqr = a[q][r];
                    a[p][r] = cth * apr - s_ph * aqr;
                    a[q][r] = std::conj(s_ph) * apr + cth * aqr;
                }
            }
    }
    std::array<double, 4> ev{a[0][0].real(), a[1][1].real(), a[2][2].real(), a[3][3].real()};
    std::sort(ev.begin(), ev.end());
    return ev;
}

double choi_min_eigenvalue(const MapSnapshot& snap) {
    return hermitian_eigenvalues(choi_matrix(snap))[0];
}

MapTrajectory build_trajectory(const OneExcitationSolution& one,
                               const TwoExcitationSolution& two) {
    if (one.cfg.geometry != two.cfg.geometry) throw ConfigError("lattice mismatch: geometry");
    if (std::abs(one.e.dt - two.dt) > 1e-12) throw ConfigError("lattice mismatch: dt");
    if (one.e.size() != two.p_e.size()) throw ConfigError("lattice mismatch: length");
    MapTrajectory traj;
    traj.geometry = one.cfg.geometry;
    traj.dt = two.dt;
    traj.snapshots.resize(two.p_e.size());
    for (std::size_t m = 0; m < two.p_e.size(); ++m)
        traj.snapshots[m] = {static_cast<double>(m) * two.dt, one.p_g[m], two.p_e[m], two.c[m]};
    return traj;
}

MapTrajectory closed_form_trajectory(double alpha, double omega0, double dt, double t_max) {
    MapTrajectory traj;
    traj.geometry = Geometry::Infinite;
    traj.dt = dt;
    traj.analytic_params = {alpha, omega0};
    auto n = static_cast<std::size_t>(std::llround(t_max / dt));
    traj.snapshots.resize(n + 1);
    for (std::size_t m = 0; m <= n; ++m) {
        double t = static_cast<double>(m) * dt;
        auto v = closed_form_resonant(t, alpha, omega0);
        traj.snapshots[m] = {t, v.p_g, v.p_e, v.c};
    }
    return traj;
}

MapTrajectory emission_trajectory(const PhysicalConfig& cfg, double dt, double t_max) {
    MapTrajectory traj;
    traj.geometry = cfg.geometry;
    traj.dt = dt;
    auto n = static_cast<std::size_t>(std::llround(t_max / dt));
    traj.snapshots.resize(n + 1);
    for (std::size_t m = 0; m <= n; ++m) {
        double t = static_cast<double>(m) * dt;
        cd esm = e_sm(t, cfg);
        traj.snapshots[m] = {t, 0.0, std::norm(esm), esm};
    }
    return traj;
}

}  // namespace wqed
