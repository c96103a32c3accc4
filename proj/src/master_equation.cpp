#include "wqed/master_equation.hpp"

#include <cmath>

namespace wqed {

namespace {

constexpr double stiff_bound = 0.5;  // |rate| * dt beyond which a step is split

bool singular_sample(double delta, cd c) {
    return std::abs(delta) < RateTrajectory::singular_tol ||
           std::abs(c) < RateTrajectory::singular_tol;
}

}  // namespace

RateSample rates_from_inputs(double p_g, double p_e, double dp_g, double dp_e, cd c, cd dc) {
    double delta = p_e - p_g;
    double ddelta = dp_e - dp_g;
    double gp = (p_e * dp_g - p_g * dp_e) / delta;
    double gm = -ddelta / delta - gp;
    cd cr = dc / c;
    double gz = -(gp + gm) / 4.0 - 0.5 * cr.real();
    double shift = -2.0 * cr.imag();
    return {gp, gm, gz, shift};
}

RateTrajectory extract_rates(const MapTrajectory& traj, DerivativeMode mode) {
    auto n = traj.size();
    if (n < 3) throw ConfigError("trajectory too short for rate extraction");
    RateTrajectory out;
    out.dt = traj.dt;
    out.gamma_plus.resize(n);
    out.gamma_minus.resize(n);
    out.gamma_z.resize(n);
    out.shift.resize(n);
    out.singular.resize(n);
    out.p_g.resize(n);
    out.p_e.resize(n);
    out.dp_g.resize(n);
    out.dp_e.resize(n);
    out.c.resize(n);
    out.dc.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        out.p_g[i] = traj[i].p_g;
        out.p_e[i] = traj[i].p_e;
        out.c[i] = traj[i].c;
    }
    if (mode == DerivativeMode::Analytic) {
        if (!traj.analytic_params)
            throw ConfigError("analytic derivatives need a closed-form trajectory");
        auto [alpha, omega0] = *traj.analytic_params;
        for (std::size_t i = 0; i < n; ++i) {
            auto d = closed_form_resonant_derivatives(traj[i].t, alpha, omega0);
            out.dp_g[i] = d.dp_g;
            out.dp_e[i] = d.dp_e;
            out.dc[i] = d.dc;
        }
    } else {
        if (n < 5) throw ConfigError("numerical derivatives need at least 5 samples");
        // fourth-order stencils: the coherence oscillates at omega0, so
        // second-order differences would leave an O(omega0^3 dt^2) bias in the
        // dephasing rate, large enough to upset the divisibility verdicts
        auto d4 = [&](auto&& f, std::size_t i) {
            double h = traj.dt;
            if (i == 0)
                return (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4)) /
                       (12.0 * h);
            if (i == 1)
                return (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4)) / (12.0 * h);
            if (i == n - 2)
                return -(-3.0 * f(n - 1) - 10.0 * f(n - 2) + 18.0 * f(n - 3) - 6.0 * f(n - 4) +
                         f(n - 5)) /
                       (12.0 * h);
            if (i == n - 1)
                return -(-25.0 * f(n - 1) + 48.0 * f(n - 2) - 36.0 * f(n - 3) + 16.0 * f(n - 4) -
                         3.0 * f(n - 5)) /
                       (12.0 * h);
            return (-f(i + 2) + 8.0 * f(i + 1) - 8.0 * f(i - 1) + f(i - 2)) / (12.0 * h);
        };
        for (std::size_t i = 0; i < n; ++i) {
            out.dp_g[i] = d4([&](std::size_t j) { return out.p_g[j]; }, i);
            out.dp_e[i] = d4([&](std::size_t j) { return out.p_e[j]; }, i);
            out.dc[i] = d4([&](std::size_t j) { return out.c[j]; }, i);
        }
    }

    std::size_t n_singular = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double delta = out.p_e[i] - out.p_g[i];
        bool sing = singular_sample(delta, out.c[i]);
        out.singular[i] = sing ? 1 : 0;
        if (sing) ++n_singular;
        auto r = rates_from_inputs(out.p_g[i], out.p_e[i], out.dp_g[i], out.dp_e[i], out.c[i],
                                   out.dc[i]);
        out.gamma_plus[i] = r.gamma_plus;
        out.gamma_minus[i] = r.gamma_minus;
        out.gamma_z[i] = r.gamma_z;
        out.shift[i] = r.shift;
    }
    if (n_singular == n) throw ConfigError("all-singular trajectory (Delta vanishes everywhere)");
    return out;
}

std::array<std::array<double, 4>, 4> map_matrix_f(const MapSnapshot& snap) {
    double re = snap.c.real(), im = snap.c.imag();
    return {{{1.0, 0.0, 0.0, 0.0},
             {0.0, re, im, 0.0},
             {0.0, -im, re, 0.0},
             {snap.p_e + snap.p_g - 1.0, 0.0, 0.0, snap.delta()}}};
}

std::array<std::array<double, 4>, 4> build_generator_matrix(const RateTrajectory& rates,
                                                            const MapTrajectory& traj,
                                                            std::size_t i) {
    const auto& s = traj[i];
    double delta = s.delta();
    if (std::abs(delta) < RateTrajectory::singular_tol || std::norm(s.c) < 1e-24)
        throw NumericalError("singular F: map not invertible at this sample");
    double re = s.c.real(), im = s.c.imag();
    double dre = rates.dc[i].real(), dim = rates.dc[i].imag();
    double c2 = re * re + im * im;
    double dsum = rates.dp_e[i] + rates.dp_g[i];
    double ddelta = rates.dp_e[i] - rates.dp_g[i];
    double w = s.p_e + s.p_g - 1.0;

    // F of the blocks [1; C; (w, Delta)]; Fdot F^{-1} computed blockwise:
    // the 2x2 block is Cdot C^{-1} with C^{-1} = C^T / |c|^2.
    std::array<std::array<double, 4>, 4> L{};
    L[1][1] = (dre * re + dim * im) / c2;
    L[1][2] = (dim * re - dre * im) / c2;
    L[2][1] = -L[1][2];
    L[2][2] = L[1][1];
    L[3][0] = dsum - ddelta * w / delta;
    L[3][3] = ddelta / delta;
    return L;
}

std::array<std::array<double, 4>, 4> rates_to_generator(const RateSample& r) {
    double gs = r.gamma_plus + r.gamma_minus;
    double diag = -gs / 2.0 - 2.0 * r.gamma_z;
    return {{{0.0, 0.0, 0.0, 0.0},
             {0.0, diag, -r.shift / 2.0, 0.0},
             {0.0, r.shift / 2.0, diag, 0.0},
             {r.gamma_plus - r.gamma_minus, 0.0, 0.0, -gs}}};
}

MeIntegration integrate_me(const RateTrajectory& rates, const QubitState& rho0,
                           const MapTrajectory* reset_map) {
    rho0.validate();
    auto n = rates.size();
    if (n < 2) throw ConfigError("rate trajectory too short");
    const double dt = rates.dt;

    // samples to skip: flagged singular, or rates too stiff for the step
    std::vector<std::uint8_t> skip(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        double mx = std::max({std::abs(rates.gamma_plus[i]), std::abs(rates.gamma_minus[i]),
                              std::abs(rates.gamma_z[i])});
        if (rates.singular[i] || mx * dt > stiff_bound) {
            skip[i] = 1;
            if (i > 0) skip[i - 1] = 1;
            if (i + 1 < n) skip[i + 1] = 1;
        }
    }

    MeIntegration out;
    out.states.resize(n);
    out.skipped.assign(n, 0);
    out.states[0] = rho0;

    // map state in the Bloch picture for resets
    auto map_state = [&](std::size_t i) -> QubitState {
        const auto& s = (*reset_map)[i];
        cd xy = std::conj(s.c) * cd(rho0.x, rho0.y);
        return {xy.real(), xy.imag(), s.delta() * rho0.z + 1.0 - s.p_e - s.p_g};
    };

    auto hermite = [&](double y0, double y1, double d0, double d1) {
        // value at the half step of the cubic interpolant
        return 0.5 * (y0 + y1) + dt * (d0 - d1) / 8.0;
    };
    auto hermite_c = [&](cd y0, cd y1, cd d0, cd d1) {
        return 0.5 * (y0 + y1) + dt * (d0 - d1) / 8.0;
    };
    auto deriv_half = [&](double y0, double y1, double d0, double d1) {
        return 1.5 * (y1 - y0) / dt - 0.25 * (d0 + d1);
    };
    auto deriv_half_c = [&](cd y0, cd y1, cd d0, cd d1) {
        return 1.5 * (y1 - y0) / dt - 0.25 * (d0 + d1);
    };

    struct R3 {
        double x, y, z;
    };
    auto f = [](const R3& r, const RateSample& g) -> R3 {
        double gs = g.gamma_plus + g.gamma_minus;
        double d = -gs / 2.0 - 2.0 * g.gamma_z;
        // z here is the rho_gg - rho_ee component of the Bloch convention
        return {d * r.x - g.shift / 2.0 * r.y, g.shift / 2.0 * r.x + d * r.y,
                (g.gamma_minus - g.gamma_plus) - gs * r.z};
    };

    R3 r{rho0.x, rho0.y, rho0.z};
    bool in_window = false;
    std::size_t window_len = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (skip[i] || skip[i + 1]) {
            if (!in_window) {
                ++out.n_windows;
                in_window = true;
                window_len = 0;
            }
            ++window_len;
            if (window_len > 5) out.wide_window = true;
            out.skipped[i + 1] = 1;
            if (reset_map) {
                auto m = map_state(i + 1);
                r = {m.x, m.y, m.z};
            }
            out.states[i + 1] = {r.x, r.y, r.z};
            continue;
        }
        in_window = false;
        RateSample g0{rates.gamma_plus[i], rates.gamma_minus[i], rates.gamma_z[i], rates.shift[i]};
        RateSample g1{rates.gamma_plus[i + 1], rates.gamma_minus[i + 1], rates.gamma_z[i + 1],
                      rates.shift[i + 1]};
        RateSample gh = rates_from_inputs(
            hermite(rates.p_g[i], rates.p_g[i + 1], rates.dp_g[i], rates.dp_g[i + 1]),
            hermite(rates.p_e[i], rates.p_e[i + 1], rates.dp_e[i], rates.dp_e[i + 1]),
            deriv_half(rates.p_g[i], rates.p_g[i + 1], rates.dp_g[i], rates.dp_g[i + 1]),
            deriv_half(rates.p_e[i], rates.p_e[i + 1], rates.dp_e[i], rates.dp_e[i + 1]),
            hermite_c(rates.c[i], rates.c[i + 1], rates.dc[i], rates.dc[i + 1]),
            deriv_half_c(rates.c[i], rates.c[i + 1], rates.dc[i], rates.dc[i + 1]));
        R3 k1 = f(r, g0);
        R3 r2{r.x + dt / 2 * k1.x, r.y + dt / 2 * k1.y, r.z + dt / 2 * k1.z};
        R3 k2 = f(r2, gh);
        R3 r3{r.x + dt / 2 * k2.x, r.y + dt / 2 * k2.y, r.z + dt / 2 * k2.z};
        R3 k3 = f(r3, gh);
        R3 r4{r.x + dt * k3.x, r.y + dt * k3.y, r.z + dt * k3.z};
        R3 k4 = f(r4, g1);
        r = {r.x + dt / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
             r.y + dt / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y),
             r.z + dt / 6 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z)};
        out.states[i + 1] = {r.x, r.y, r.z};
    }
    return out;
}

}  // namespace wqed
