#include "wqed/one_excitation.hpp"

#include <cmath>

#include "wqed/kernels.hpp"
#include "wqed/special.hpp"

namespace wqed {

namespace {

struct Exponents {
    cd beta;    // i k + alpha Gamma / 2
    cd lambda;  // i w0 + Gamma / 2
    cd mu;      // lambda - beta = -i p
};

Exponents exponents(const PhysicalConfig& cfg) {
    cd beta(cfg.alpha * cfg.gamma / 2.0, cfg.k);
    cd lambda(cfg.gamma / 2.0, cfg.omega0);
    return {beta, lambda, lambda - beta};
}

cd phi1(cd z) {
    if (std::abs(z) < 1e-300) return 1.0;
    return expm1c(z) / z;
}

}  // namespace

cd e_infinite(double t, const PhysicalConfig& cfg) {
    if (t < 0.0) return 0.0;
    auto [beta, lambda, mu] = exponents(cfg);
    double amp = std::sqrt(cfg.alpha / 2.0) * cfg.gamma;
    return amp * t * std::exp(-lambda * t) * phi1(mu * t);
}

cd e_sm(double t, const PhysicalConfig& cfg) {
    if (t < 0.0) return 0.0;
    if (cfg.geometry != Geometry::SemiInfinite) {
        return std::exp(-cd(cfg.gamma / 2.0, cfg.omega0) * t);
    }
    cd lambda(cfg.gamma / 2.0, cfg.omega0);
    double half_g = cfg.gamma / 2.0;
    cd sum = 0.0, comp = 0.0;
    double log_fact = 0.0;
    for (int n = 0;; ++n) {
        double tau = t - 2.0 * static_cast<double>(n) * cfg.a;
        if (tau < 0.0) break;
        if (n > 0) log_fact += std::log(static_cast<double>(n));
        cd term = std::exp(-lambda * tau + static_cast<double>(n) * std::log(half_g * std::max(tau, 1e-300)) - log_fact);
        if (n > 0 && tau == 0.0) term = 0.0;
        cd y = term - comp;
        cd s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    if (!std::isfinite(sum.real()) || !std::isfinite(sum.imag()))
        throw NumericalError("e_sm overflow for a*Gamma = " + std::to_string(cfg.a * cfg.gamma));
    return sum;
}

int default_echo_count(const PhysicalConfig& cfg, double t_max) {
    if (cfg.geometry != Geometry::SemiInfinite) return 0;
    return static_cast<int>(std::ceil(t_max / (2.0 * cfg.a))) + 1;
}

cd e_semi_series(double t, const PhysicalConfig& cfg, int n_max) {
    if (cfg.geometry != Geometry::SemiInfinite)
        throw ConfigError("e_semi_series requires the semi-infinite geometry");
    if (t < 0.0) return 0.0;
    if (n_max < static_cast<int>(std::ceil(t / (2.0 * cfg.a))))
        throw ConfigError("e_semi_series: n_max does not cover all echoes");
    auto [beta, lambda, mu] = exponents(cfg);
    double half_g = cfg.gamma / 2.0;
    double amp = std::sqrt(cfg.alpha / 2.0) * cfg.gamma;

    // H_n(tau) = e^{-beta tau} tau^{n+1} gamma_ratio(n, mu tau) / n!
    double log_fact = 0.0;
    auto H = [&](int n, double tau, double lf) {
        cd v = std::exp(-beta * tau) * std::pow(tau, n + 1) * gamma_ratio(n, mu * tau) *
               std::exp(-lf);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericalError("e_semi_series overflow in echo term n = " + std::to_string(n));
        return v;
    };

    cd sum = (t > 0.0) ? H(0, t, 0.0) : cd(0.0);
    double pow_half_g = 1.0;  // (Gamma/2)^{m-1}
    for (int m = 1; m <= n_max; ++m) {
        double tau = t - 2.0 * static_cast<double>(m) * cfg.a;
        if (tau < 0.0) break;
        double lf_prev = log_fact;
        log_fact += std::log(static_cast<double>(m));
        if (tau > 0.0)
            sum += pow_half_g * (half_g * H(m, tau, log_fact) - H(m - 1, tau, lf_prev));
        pow_half_g *= half_g;
    }
    return amp * sum;
}

ComplexSeries e_semi_dde(const PhysicalConfig& cfg, double dt, double t_max,
                         const DdeOptions& opts) {
    cfg.validate();
    if (cfg.geometry != Geometry::SemiInfinite)
        throw ConfigError("e_semi_dde requires the semi-infinite geometry");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (2.0 * cfg.a < dt) throw ConfigError("delay 2a is smaller than dt");
    double kcells = 2.0 * cfg.a / dt;
    auto K = static_cast<std::size_t>(std::llround(kcells));
    if (std::abs(kcells - static_cast<double>(K)) > 1e-9)
        throw ConfigError("delay 2a must be an integer multiple of dt (use align_dt)");

    auto n = static_cast<std::size_t>(std::llround(t_max / dt));
    auto [beta, lambda, mu] = exponents(cfg);
    double amp = std::sqrt(cfg.alpha / 2.0) * cfg.gamma;
    cd e2ab = std::exp(2.0 * cfg.a * beta);
    double delay_c = opts.disable_delay ? 0.0 : cfg.gamma / 2.0;

    // The kinks sit exactly on grid nodes (2a = K dt), so the gates are
    // resolved in step indices: twice the time in units of dt/2. A node at
    // the kink takes the right limit for the segment it starts and the left
    // limit for the segment it ends.
    auto source = [&](double t, long idx2, bool left_end) -> cd {
        if (!opts.with_source) return 0.0;
        long kink2 = 2 * static_cast<long>(K);
        bool g1 = left_end ? (idx2 > 0) : (idx2 >= 0);
        bool g2 = left_end ? (idx2 > kink2) : (idx2 >= kink2);
        if (!g1 && !g2) return 0.0;
        cd ebt = std::exp(-beta * t);
        cd s = 0.0;
        if (g1) s += amp * ebt;
        if (g2) s -= amp * e2ab * ebt;
        return s;
    };
    auto rhs = [&](double t, long idx2, cd y, cd delayed, bool left_end) -> cd {
        long kink2 = 2 * static_cast<long>(K);
        bool g = left_end ? (idx2 > kink2) : (idx2 >= kink2);
        return -lambda * y + (g ? delay_c * delayed : cd(0.0)) + source(t, idx2, left_end);
    };

    std::vector<cd> e(n + 1), fR(n + 1), fL(n + 1);
    e[0] = opts.e0;
    fR[0] = rhs(0.0, 0, e[0], 0.0, false);
    fL[0] = fR[0];
    auto delayed_half = [&](std::size_t m) -> cd {
        // e at t_m + dt/2 via cubic Hermite on [t_m, t_{m+1}]
        return 0.5 * (e[m] + e[m + 1]) + dt * (fR[m] - fL[m + 1]) / 8.0;
    };
    for (std::size_t i = 0; i < n; ++i) {
        double t = static_cast<double>(i) * dt;
        auto i2 = 2 * static_cast<long>(i);
        cd dly_h = (i >= K) ? delayed_half(i - K) : cd(0.0);
        cd dly_e = (i + 1 >= K) ? e[i + 1 - K] : cd(0.0);
        cd k1 = fR[i];
        cd k2 = rhs(t + dt / 2, i2 + 1, e[i] + (dt / 2) * k1, dly_h, false);
        cd k3 = rhs(t + dt / 2, i2 + 1, e[i] + (dt / 2) * k2, dly_h, false);
        cd k4 = rhs(t + dt, i2 + 2, e[i] + dt * k3, dly_e, true);
        e[i + 1] = e[i] + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        fL[i + 1] = rhs(t + dt, i2 + 2, e[i + 1], dly_e, true);
        fR[i + 1] = rhs(t + dt, i2 + 2, e[i + 1], dly_e, false);
    }
    ComplexSeries out;
    out.t0 = 0.0;
    out.dt = dt;
    out.values = std::move(e);
    out.validate();
    return out;
}

std::pair<cd, cd> phi_infinite(double x, double t, const PhysicalConfig& cfg,
                               const ComplexSeries& e_history) {
    cd right = wavepacket_amplitude(x - t, cfg);
    double gr = theta_half(x) * theta_half(t - x);
    if (gr > 0.0) right += cd(0.0, -cfg.coupling()) * e_history.at_time(t - x) * gr;
    cd left = 0.0;
    double gl = theta_half(-x) * theta_half(t + x);
    if (gl > 0.0) left = cd(0.0, -cfg.coupling()) * e_history.at_time(t + x) * gl;
    return {right, left};
}

cd phi_semi(double x, double t, const PhysicalConfig& cfg, const ComplexSeries& e_history) {
    cd v = chiral_wavepacket(x - t, cfg);
    double g1 = theta_half(x + cfg.a) * theta_half(t - x - cfg.a);
    double g2 = theta_half(x - cfg.a) * theta_half(t - x + cfg.a);
    double V = cfg.coupling();
    if (g1 > 0.0) v -= V * g1 * e_history.at_time(t - x - cfg.a);
    if (g2 > 0.0) v += V * g2 * e_history.at_time(t - x + cfg.a);
    return v;
}

namespace {

// Per-frame photon norm for the infinite geometry; the x <= 0 free tail is
// integrated in closed form, the lattice covers [0, t] for phi_R and [-t, 0]
// for phi_L.
std::vector<double> norms_infinite(const PhysicalConfig& cfg, const ComplexSeries& e) {
    auto n = e.size() - 1;
    double dt = e.dt;
    auto [beta, lambda, mu] = exponents(cfg);
    cd iamp(0.0, std::sqrt(cfg.alpha * cfg.gamma));
    cd mi_v(0.0, -cfg.coupling());
    std::vector<cd> decay(n + 1);  // e^{-beta q dt}
    for (std::size_t q = 0; q <= n; ++q) decay[q] = std::exp(-beta * (static_cast<double>(q) * dt));

    std::vector<double> out(n + 1);
    std::vector<cd> rowR(n + 1), rowL(n + 1);
    for (std::size_t m = 0; m <= n; ++m) {
        double t = static_cast<double>(m) * dt;
        for (std::size_t j = 0; j <= m; ++j) {
            // x_j = j dt in [0, t]; the field jumps across the coupling point
            // x = 0, so the boundary node takes the one-sided limit of its row
            cd free = iamp * decay[m - j];  // phi(x - t), x - t <= 0 here
            if (j == m) free *= 0.5;        // wavefront node
            double g = (j == m) ? 0.5 : 1.0;
            rowR[j] = free + mi_v * e[m - j] * g;
            rowL[j] = mi_v * e[m - j] * g;  // x = -j dt in [-t, 0]
        }
        double tail = wavepacket_mass_below(-t, cfg);
        out[m] = std::norm(e[m]) + tail + trapezoid_norm_jump_end(rowR, m, dt) +
                 trapezoid_norm_jump_end(rowL, m, dt) - 1.0;
    }
    return out;
}

std::vector<double> norms_semi(const PhysicalConfig& cfg, const ComplexSeries& e) {
    auto n = e.size() - 1;
    double dt = e.dt;
    auto [beta, lambda, mu] = exponents(cfg);
    auto D2 = static_cast<std::size_t>(std::llround(2.0 * cfg.a / dt));
    double V = cfg.coupling();
    // lattice x in [-a, a + t_max], x_j = -a + j dt; chiral-frame amplitudes
    double samp = std::sqrt(cfg.alpha * cfg.gamma);
    std::vector<cd> decay(n + 1);  // e^{-beta q dt}
    for (std::size_t q = 0; q <= n; ++q) decay[q] = std::exp(-beta * (static_cast<double>(q) * dt));

    std::vector<double> out(n + 1);
    std::vector<cd> row;
    for (std::size_t m = 0; m <= n; ++m) {
        double t = static_cast<double>(m) * dt;
        auto nx = m + D2;  // support ends at x = t + a
        row.assign(nx + 1, 0.0);
        for (std::size_t j = 0; j <= nx; ++j) {
            cd v = 0.0;
            if (j <= m) {  // free part: x - t <= -a
                v = samp * decay[m - j];
                if (j == m) v *= 0.5;
            }
            if (j <= m) {  // first source: theta(x+a) theta(t-x-a); ret index m - j
                // the field jumps across the qubit column x = -a, which is the
                // lattice boundary here: take the one-sided (right) limit
                double g = (j == m) ? 0.5 : 1.0;
                v -= V * g * e[m - j];
            }
            if (j >= D2 && j - D2 <= m) {  // second source: ret index m - (j - D2)
                double g = (j == D2 || j - D2 == m) ? 0.5 : 1.0;
                v += V * g * e[m - (j - D2)];
            }
            row[j] = v;
        }
        double tail = wavepacket_mass_below(-cfg.a - t, cfg);
        double lattice = trapezoid_norm(row, dt);
        // interior nodes on a jump hold the theta(0) = 1/2 average; each such
        // node contributes dx |jump|^2 / 4 beyond plain trapezoid. Jumps: the
        // advected wavefront (samp, at j = m) and the image column (V e(t),
        // at j = D2); at m = D2 the two coincide and superpose.
        if (m == 0) {
            lattice -= cfg.alpha * cfg.gamma / 8.0 * dt;
        } else if (m == D2) {
            lattice += std::norm(samp - V * e[m]) / 4.0 * dt;
        } else {
            lattice += (cfg.alpha * cfg.gamma + std::norm(V * e[m])) / 4.0 * dt;
        }
        out[m] = std::norm(e[m]) + tail + lattice - 1.0;
    }
    return out;
}

}  // namespace

OneExcitationSolution solve_one_excitation(const PhysicalConfig& cfg, double dt, double t_max,
                                           const DdeOptions& opts) {
    cfg.validate();
    OneExcitationSolution sol;
    sol.cfg = cfg;
    if (cfg.geometry == Geometry::Infinite) {
        auto n = static_cast<std::size_t>(std::llround(t_max / dt));
        sol.e.t0 = 0.0;
        sol.e.dt = dt;
        sol.e.values.resize(n + 1);
        for (std::size_t m = 0; m <= n; ++m)
            sol.e.values[m] = e_infinite(static_cast<double>(m) * dt, cfg);
        sol.norm_residual = norms_infinite(cfg, sol.e);
    } else {
        sol.e = e_semi_dde(cfg, dt, t_max, opts);
        sol.norm_residual = norms_semi(cfg, sol.e);
    }
    sol.p_g.resize(sol.e.size());
    for (std::size_t m = 0; m < sol.e.size(); ++m) sol.p_g[m] = std::norm(sol.e[m]);
    return sol;
}

}  // namespace wqed
