#include "wqed/validate.hpp"

#include <cmath>
#include <random>

#include "wqed/nm_measures.hpp"
#include "wqed/special.hpp"
#include "wqed/sweep.hpp"

namespace wqed {

namespace {

void add(ValidationReport& rep, const std::string& name, double residual, double threshold) {
    rep.checks.push_back({name, residual, threshold, residual <= threshold});
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

ValidationReport run_validation(const ValidationOptions& opts) {
    ValidationReport rep;
    const bool fault = opts.fault_skip_mirror_delay;
    const double dt_two = opts.quick ? 8e-3 : 4e-3;
    const double dt_one = opts.quick ? 2e-3 : 1e-3;

    PhysicalConfig inf_cfg;  // omega0 = k = 20, alpha = 1, infinite
    PhysicalConfig semi_cfg = make_semi_infinite(4.0);

    // wavepacket normalization
    {
        double dx = 1e-3;
        double width = default_support_width(inf_cfg);
        auto n = static_cast<std::size_t>(std::ceil(width / dx));
        std::vector<cd> row(n + 1);
        for (std::size_t j = 0; j <= n; ++j)
            row[j] = wavepacket_amplitude(-static_cast<double>(n - j) * dx, inf_cfg);
        add(rep, "wavepacket normalization", std::abs(trapezoid_norm_jump_end(row, n, dx) - 1.0),
            1e-5);
    }

    // incomplete-gamma recurrence
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> ur(-50.0, 50.0);
        double worst = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            cd z(ur(rng), ur(rng));
            if (std::abs(z) > 50.0 || std::abs(z) < 1e-3) continue;
            int n = 1 + static_cast<int>(rng() % 59);
            cd g_n = lower_incomplete_gamma(n, z);
            cd g_n1 = lower_incomplete_gamma(n + 1, z);
            cd w = std::pow(z, n) * std::exp(-z);
            double scale = std::max({std::abs(g_n1), static_cast<double>(n) * std::abs(g_n),
                                     std::abs(w), 1e-300});
            worst = std::max(worst, std::abs(g_n1 - (static_cast<double>(n) * g_n - w)) / scale);
        }
        add(rep, "incomplete-gamma recurrence", worst, 1e-10);
    }

    // exact series vs delay-ODE integrator
    {
        DdeOptions dopt;
        dopt.disable_delay = fault;
        double dt = dt_one;
        dt = align_dt(semi_cfg, dt);
        double t_max = 6.0 * semi_cfg.a;
        auto e = e_semi_dde(semi_cfg, dt, t_max, dopt);
        int nmax = default_echo_count(semi_cfg, t_max);
        double worst = 0.0;
        for (std::size_t i = 0; i < e.size(); i += 7)
            worst = std::max(worst,
                             std::abs(e[i] - e_semi_series(e.time_at(i), semi_cfg, nmax)));
        add(rep, "one-excitation series vs delay ODE", worst, 1e-6);
    }

    // one-excitation unitarity
    {
        auto one_inf = solve_one_excitation(inf_cfg, dt_two, 8.0);
        add(rep, "one-excitation norm (infinite)", max_abs(one_inf.norm_residual), 2e-4);
        DdeOptions dopt;
        dopt.disable_delay = fault;
        auto one_semi =
            solve_one_excitation(semi_cfg, align_dt(semi_cfg, dt_two), 8.0, dopt);
        add(rep, "one-excitation norm (semi-infinite)", max_abs(one_semi.norm_residual), 2e-4);
    }

    // two-excitation closed-form match (infinite, resonant)
    {
        PhysicalConfig cfg = inf_cfg;
        cfg.alpha = 2.0;
        auto one = solve_one_excitation(cfg, dt_two, 8.0);
        auto two = solve_infinite(cfg, dt_two, 8.0);
        double worst = 0.0;
        for (std::size_t i = 0; i < two.p_e.size(); ++i) {
            auto v = closed_form_resonant(static_cast<double>(i) * dt_two, cfg.alpha, cfg.omega0);
            worst = std::max({worst, std::abs(one.p_g[i] - v.p_g), std::abs(two.p_e[i] - v.p_e),
                              std::abs(two.c[i] - v.c)});
        }
        add(rep, "closed-form match (alpha = 2)", worst, 5e-3);
    }

    // exact region x < -a: feed consistency and independent evolution
    {
        TwoExcOptions topt;
        topt.disable_delay = fault;
        double dt = align_dt(semi_cfg, opts.quick ? 8e-3 : 4e-3);
        double t_max = 4.0 * semi_cfg.a;
        topt.evolve_left = true;
        topt.left_width = 10.0;
        auto two = solve_semi_infinite(semi_cfg, dt, t_max, topt);
        const auto& h = *two.history;
        auto ja = static_cast<std::size_t>(std::llround((-semi_cfg.a - h.x_min) / dt));
        double worst = 0.0;
        for (std::size_t m = 0; m < h.rows.size(); m += 3) {
            for (std::size_t j = ja / 4; j + 2 < ja; j += 2) {
                double x = h.x_min + static_cast<double>(j) * dt;
                double t = static_cast<double>(m) * dt;
                worst = std::max(worst,
                                 std::abs(h.rows[m][j] - exact_psi_left_of_qubit(x, t, semi_cfg)));
            }
        }
        add(rep, "exact region x < -a (independent evolution)", worst, 5e-4);
    }

    // two-excitation unitarity via chi reconstruction
    {
        TwoExcOptions topt;
        topt.store_history = true;
        topt.disable_delay = fault;
        double t_max = opts.quick ? 4.0 : 6.0;
        auto two_inf = solve_infinite(inf_cfg, dt_two, t_max, topt);
        double worst = 0.0;
        auto n = two_inf.history->n_steps;
        for (int q = 1; q <= 4; ++q) {
            std::size_t frame = (n * static_cast<std::size_t>(q) / 4);
            frame -= frame % two_inf.history->stride;
            worst = std::max(worst, std::abs(two_inf.p_e[frame] +
                                             reconstruct_chi_norm(two_inf, frame) - 1.0));
        }
        add(rep, "two-excitation norm (infinite)", worst, 5e-3);

        double dts = align_dt(semi_cfg, dt_two);
        auto two_semi = solve_semi_infinite(semi_cfg, dts, t_max, topt);
        worst = 0.0;
        auto ns = two_semi.history->n_steps;
        for (int q = 1; q <= 4; ++q) {
            std::size_t frame = (ns * static_cast<std::size_t>(q) / 4);
            frame -= frame % two_semi.history->stride;
            worst = std::max(worst, std::abs(two_semi.p_e[frame] +
                                             reconstruct_chi_norm(two_semi, frame) - 1.0));
        }
        add(rep, "two-excitation norm (semi-infinite)", worst, 5e-3);
    }

    // master equation reproduces the map
    {
        auto traj = closed_form_trajectory(1.0, 20.0, dt_one, 10.0);
        auto rates = extract_rates(traj);
        std::mt19937_64 rng(3);
        double worst = 0.0;
        for (int s = 0; s < (opts.quick ? 5 : 20); ++s) {
            auto rho0 = random_state(rng);
            auto me = integrate_me(rates, rho0, &traj);
            for (std::size_t i = 0; i < me.states.size(); ++i) {
                if (me.skipped[i] || rates.singular[i]) continue;
                worst = std::max(worst, trace_distance(me.states[i], apply_map(traj[i], rho0)));
            }
        }
        add(rep, "master equation vs map (alpha = 1)", worst, 1e-3);
    }

    // measure hierarchy and the sufficient condition on a mini sweep
    {
        auto alphas = log_spaced(1e-3, 20.0, 8);
        auto rows = sweep_alpha(alphas, {-1.0, 4.0}, 20.0, opts.quick ? 1.6e-2 : 8e-3, 10.0,
                                worker_count());
        int violations = 0;
        for (const auto& r : rows) {
            if (r.gm > verdict_tol && !(r.blp > 0.0)) ++violations;
            if (r.blp > verdict_tol && !r.cp_broken) ++violations;
            if (r.p_broken && !(r.gm > 0.0)) ++violations;
        }
        add(rep, "measure hierarchy (mini sweep)", violations, 0.0);
    }

    // Delta stationary analysis
    {
        double bad = 0.0;
        for (double al : {6.0, 10.0}) {
            auto sp = delta_stationary_analysis(al);
            if (sp.count != 0) bad += 1.0;
            for (double t = 0.0; t <= 20.0; t += 1e-2)
                if (delta_closed_form(t, al) < 0.0) bad += 1.0;
        }
        for (double al : {0.5, 1.0, 4.9}) {
            auto sp = delta_stationary_analysis(al);
            if (sp.count != 1 || !(sp.delta_min < 0.0)) bad += 1.0;
            // the located crossing must be the minimum of Delta
            if (sp.count == 1) {
                double d0 = delta_closed_form(sp.t_star, al);
                if (delta_closed_form(sp.t_star - 1e-3, al) < d0 ||
                    delta_closed_form(sp.t_star + 1e-3, al) < d0)
                    bad += 1.0;
            }
        }
        add(rep, "Delta stationary analysis", bad, 0.0);
    }

    return rep;
}

}  // namespace wqed
