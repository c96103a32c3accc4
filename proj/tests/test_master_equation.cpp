#include <cmath>
#include <random>

#include "doctest.h"
#include "wqed/master_equation.hpp"

using namespace wqed;

namespace {

MapTrajectory spontaneous_trajectory(double omega0, double dt, double t_max) {
    MapTrajectory traj;
    traj.dt = dt;
    auto n = static_cast<std::size_t>(std::llround(t_max / dt));
    traj.snapshots.resize(n + 1);
    for (std::size_t m = 0; m <= n; ++m) {
        double t = static_cast<double>(m) * dt;
        traj.snapshots[m] = {t, 0.0, std::exp(-t), std::exp(-cd(0.5, omega0) * t)};
    }
    return traj;
}

}  // namespace

TEST_SUITE("master_equation") {
    TEST_CASE("spontaneous-emission rates") {
        auto traj = spontaneous_trajectory(20.0, 1e-3, 4.0);
        auto rates = extract_rates(traj);
        double worst_p = 0.0, worst_m = 0.0, worst_z = 0.0, worst_s = 0.0;
        for (std::size_t i = 1; i + 1 < rates.size(); ++i) {
            worst_p = std::max(worst_p, std::abs(rates.gamma_plus[i]));
            worst_m = std::max(worst_m, std::abs(rates.gamma_minus[i] - 1.0));
            worst_z = std::max(worst_z, std::abs(rates.gamma_z[i]));
            worst_s = std::max(worst_s, std::abs(rates.shift[i] - 40.0));
        }
        CHECK(worst_p < 1e-6);
        CHECK(worst_m < 1e-5);
        CHECK(worst_z < 1e-4);
        CHECK(worst_s < 1e-2);
    }

    TEST_CASE("gamma+ finite at t = 0 and the rate-sum identity") {
        auto traj = closed_form_trajectory(1.0, 20.0, 1e-3, 6.0);
        auto rates = extract_rates(traj, DerivativeMode::Analytic);
        CHECK(std::isfinite(rates.gamma_plus[0]));
        double worst = 0.0;
        for (std::size_t i = 0; i < rates.size(); ++i) {
            if (rates.singular[i]) continue;
            double delta = traj[i].delta();
            if (std::abs(delta) < 1e-3) continue;
            double ddelta = rates.dp_e[i] - rates.dp_g[i];
            double lhs = rates.gamma_plus[i] + rates.gamma_minus[i];
            worst = std::max(worst, std::abs(lhs + ddelta / delta));
        }
        CHECK(worst < 1e-9);
    }

    TEST_CASE("generator from F-dot F-inverse matches the rate form") {
        auto traj = closed_form_trajectory(1.3, 20.0, 1e-3, 5.0);
        auto rates = extract_rates(traj, DerivativeMode::Analytic);
        double worst = 0.0;
        for (std::size_t i = 0; i < rates.size(); i += 53) {
            if (rates.singular[i]) continue;
            if (std::abs(traj[i].delta()) < 1e-3) continue;
            auto lf = build_generator_matrix(rates, traj, i);
            auto lr = rates_to_generator({rates.gamma_plus[i], rates.gamma_minus[i],
                                          rates.gamma_z[i], rates.shift[i]});
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) worst = std::max(worst, std::abs(lf[r][c] - lr[r][c]));
        }
        CHECK(worst < 1e-6);
        // first row zero: trace preservation; (2,2) == (3,3) == Re[cdot/c]
        auto l0 = build_generator_matrix(rates, traj, 100);
        for (int c = 0; c < 4; ++c) CHECK(l0[0][c] == 0.0);
        CHECK(l0[1][1] == doctest::Approx(l0[2][2]));
        cd cr = rates.dc[100] / rates.c[100];
        CHECK(l0[1][1] == doctest::Approx(cr.real()).epsilon(1e-10));
        // drive entries absent (mu = 0)
        CHECK(std::abs(l0[1][3]) < 1e-8);
        CHECK(std::abs(l0[2][3]) < 1e-8);
    }

    TEST_CASE("F at t = 0 is the identity") {
        auto traj = closed_form_trajectory(2.0, 20.0, 1e-3, 1.0);
        auto f = map_matrix_f(traj[0]);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) CHECK(f[r][c] == doctest::Approx(r == c ? 1.0 : 0.0));
    }

    TEST_CASE("unitary limit: pure Z rotation") {
        RateTrajectory rates;
        rates.dt = 1e-3;
        std::size_t n = 1000;
        rates.gamma_plus.assign(n + 1, 0.0);
        rates.gamma_minus.assign(n + 1, 0.0);
        rates.gamma_z.assign(n + 1, 0.0);
        rates.shift.assign(n + 1, 40.0);  // S = 2 omega0
        rates.singular.assign(n + 1, 0);
        rates.p_g.assign(n + 1, 0.0);
        rates.p_e.assign(n + 1, 1.0);
        rates.dp_g.assign(n + 1, 0.0);
        rates.dp_e.assign(n + 1, 0.0);
        rates.c.assign(n + 1, cd(1.0, 0.0));
        rates.dc.assign(n + 1, cd(0.0, 0.0));
        // half-step rates are rebuilt from (p, c), so supply the coherence
        // consistent with S = 2 omega0: c(t) = e^{-i omega0 t}
        for (std::size_t i = 0; i <= n; ++i) {
            double t = static_cast<double>(i) * rates.dt;
            rates.c[i] = std::exp(cd(0.0, -20.0) * t);
            rates.dc[i] = cd(0.0, -20.0) * rates.c[i];
        }
        QubitState r0{1.0, 0.0, 0.0};
        auto me = integrate_me(rates, r0);
        double t_end = static_cast<double>(n) * rates.dt;
        // the Bloch vector rotates at the qubit frequency: (x+iy)(t) = e^{i omega0 t}
        cd expect = std::exp(cd(0.0, 20.0) * t_end);
        CHECK(me.states.back().x == doctest::Approx(expect.real()).epsilon(1e-6));
        CHECK(me.states.back().y == doctest::Approx(expect.imag()).epsilon(1e-6));
        CHECK(me.states.back().z == doctest::Approx(0.0));
    }

    TEST_CASE("constant-rate decay") {
        auto traj = spontaneous_trajectory(20.0, 1e-3, 3.0);
        auto rates = extract_rates(traj);
        QubitState excited{0.0, 0.0, -1.0};
        auto me = integrate_me(rates, excited);
        for (std::size_t i = 0; i < me.states.size(); i += 100) {
            double t = static_cast<double>(i) * rates.dt;
            double rho_ee = 0.5 * (1.0 - me.states[i].z);
            CHECK(rho_ee == doctest::Approx(std::exp(-t)).epsilon(1e-6));
        }
        CHECK(me.n_windows == 0);
    }

    TEST_CASE("map and master equation agree for scattering") {
        auto traj = closed_form_trajectory(1.0, 20.0, 1e-3, 10.0);
        auto rates = extract_rates(traj, DerivativeMode::Analytic);
        std::mt19937_64 rng(23);
        double worst = 0.0;
        for (int s = 0; s < 20; ++s) {
            auto rho0 = random_state(rng);
            auto me = integrate_me(rates, rho0, &traj);
            for (std::size_t i = 0; i < me.states.size(); ++i) {
                if (me.skipped[i] || rates.singular[i]) continue;
                worst = std::max(worst, trace_distance(me.states[i], apply_map(traj[i], rho0)));
            }
        }
        CHECK(worst < 1e-3);
    }

    TEST_CASE("rate negativity accompanies a negative Delta excursion") {
        auto traj = closed_form_trajectory(1.0, 20.0, 1e-3, 8.0);
        auto rates = extract_rates(traj, DerivativeMode::Analytic);
        bool delta_negative_decreasing = false;
        double min_rate = 0.0;
        for (std::size_t i = 0; i < rates.size(); ++i) {
            if (traj[i].delta() < 0.0 && rates.dp_e[i] - rates.dp_g[i] < 0.0)
                delta_negative_decreasing = true;
            if (!rates.singular[i])
                min_rate = std::min({min_rate, rates.gamma_plus[i], rates.gamma_minus[i]});
        }
        CHECK(delta_negative_decreasing);
        CHECK(min_rate < 0.0);
    }

    TEST_CASE("all-singular trajectory rejected") {
        MapTrajectory traj;
        traj.dt = 0.1;
        for (int i = 0; i < 5; ++i)
            traj.snapshots.push_back({0.1 * i, 0.5, 0.5, cd(0.4, 0.0)});  // Delta == 0
        CHECK_THROWS_AS(extract_rates(traj), ConfigError);
    }
}
