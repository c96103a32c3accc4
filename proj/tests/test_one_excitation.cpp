#include <cmath>

#include "doctest.h"
#include "wqed/one_excitation.hpp"
#include "wqed/two_excitation.hpp"

using namespace wqed;

namespace {

PhysicalConfig semi_4pi(double alpha = 1.0) { return make_semi_infinite(4.0, 20.0, 20.0, alpha); }

}  // namespace

TEST_SUITE("one_excitation") {
    TEST_CASE("e_infinite basics") {
        PhysicalConfig cfg;  // resonant, alpha = 1
        CHECK(std::abs(e_infinite(0.0, cfg)) == 0.0);
        // |e(2)|^2 = 2 e^{-2} at the resonant alpha = 1 point
        CHECK(std::norm(e_infinite(2.0, cfg)) == doctest::Approx(2.0 * std::exp(-2.0)));
        // resonant alpha = 2 matches the closed form p_g
        cfg.alpha = 2.0;
        for (double t : {0.5, 1.0, 3.0}) {
            auto v = closed_form_resonant(t, 2.0, cfg.omega0);
            CHECK(std::norm(e_infinite(t, cfg)) == doctest::Approx(v.p_g).epsilon(1e-10));
        }
    }

    TEST_CASE("e_sm structure") {
        auto cfg = semi_4pi();
        CHECK(e_sm(0.0, cfg) == cd(1.0, 0.0));
        // pure decay before the first round trip
        double t = 0.8 * cfg.a;
        cd expect = std::exp(-cd(0.5, 20.0) * t);
        CHECK(std::abs(e_sm(t, cfg) - expect) < 1e-14);
        // revivals: |e_sm|^2 is non-monotonic and settles near the trapped value
        double d1 = std::norm(e_sm(2.0 * cfg.a - 0.05, cfg));
        double d2 = std::norm(e_sm(2.0 * cfg.a + 0.6, cfg));
        CHECK(d2 > d1);  // re-excitation after the echo arrives
        CHECK(std::norm(e_sm(10.0, cfg)) == doctest::Approx(0.377156).epsilon(1e-4));
    }

    TEST_CASE("series equals the infinite solution before the first echo") {
        auto cfg = semi_4pi();
        int nmax = default_echo_count(cfg, 3.0);
        for (double t : {0.1, 0.5, 1.1}) {
            REQUIRE(t < 2.0 * cfg.a);
            CHECK(std::abs(e_semi_series(t, cfg, nmax) - e_infinite(t, cfg)) < 1e-13);
        }
        CHECK(std::abs(e_semi_series(0.0, cfg, nmax)) == 0.0);
        CHECK_THROWS_AS(e_semi_series(10.0, cfg, 1), ConfigError);
    }

    TEST_CASE("series vs delay ODE") {
        auto cfg = semi_4pi();
        double dt = align_dt(cfg, 1e-3);
        double t_max = 3.0;
        auto e = e_semi_dde(cfg, dt, t_max);
        int nmax = default_echo_count(cfg, t_max);
        double worst = 0.0;
        for (std::size_t i = 0; i < e.size(); i += 11)
            worst = std::max(worst, std::abs(e[i] - e_semi_series(e.time_at(i), cfg, nmax)));
        CHECK(worst < 1e-6);
    }

    TEST_CASE("delay ODE convergence away from kinks") {
        // nested grids sharing exact nodes so the probe needs no interpolation
        auto cfg = semi_4pi();
        double dt0 = cfg.a / 157.0;
        auto m = static_cast<std::size_t>(std::llround(3.0 / dt0));  // between echo times
        auto value_at = [&](int refine) {
            double dt = dt0 / static_cast<double>(refine);
            auto e = e_semi_dde(cfg, dt, 3.2);
            return e[m * static_cast<std::size_t>(refine)];
        };
        cd v1 = value_at(1), v2 = value_at(2), v3 = value_at(4);
        double d12 = std::abs(v1 - v2), d23 = std::abs(v2 - v3);
        CHECK(d12 / d23 > 8.0);  // observed order >= 3
    }

    TEST_CASE("pure decay with sources off") {
        auto cfg = semi_4pi();
        DdeOptions opts;
        opts.e0 = 1.0;
        opts.with_source = false;
        double dt = align_dt(cfg, 1e-3);
        auto e = e_semi_dde(cfg, dt, 1.9 * cfg.a, opts);
        double worst = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i) {
            cd expect = std::exp(-cd(0.5, 20.0) * e.time_at(i));
            worst = std::max(worst, std::abs(e[i] - expect));
        }
        CHECK(worst < 1e-7);  // RK4 phase error at omega0 = 20, dt = 1e-3
        // and against e_sm once echoes land
        auto e2 = e_semi_dde(cfg, dt, 4.0, opts);
        worst = 0.0;
        for (std::size_t i = 0; i < e2.size(); i += 7)
            worst = std::max(worst, std::abs(e2[i] - e_sm(e2.time_at(i), cfg)));
        CHECK(worst < 2e-7);
    }

    TEST_CASE("derivative kink at the echo time") {
        auto cfg = semi_4pi();
        double dt = align_dt(cfg, 5e-4);
        auto e = e_semi_dde(cfg, dt, 2.2 * cfg.a);
        auto K = static_cast<std::size_t>(std::llround(2.0 * cfg.a / dt));
        cd dl = (e[K] - e[K - 1]) / dt;
        cd dr = (e[K + 1] - e[K]) / dt;
        // the reflected wavefront arrives: de/dt jumps by -sqrt(alpha Gamma^2 / 2)
        cd jump = dr - dl;
        CHECK(std::abs(jump - cd(-std::sqrt(0.5), 0.0)) < 0.15);
        // interior second differences are comparatively tiny
        cd dl2 = (e[K / 2 + 1] - 2.0 * e[K / 2] + e[K / 2 - 1]) / (dt * dt);
        CHECK(std::abs(dl2) * dt < 0.15);
    }

    TEST_CASE("delay smaller than dt rejected") {
        auto cfg = semi_4pi();
        CHECK_THROWS_AS(e_semi_dde(cfg, 4.0 * cfg.a, 10.0, {}), ConfigError);
    }

    TEST_CASE("unitarity in both geometries") {
        PhysicalConfig inf_cfg;
        auto one_inf = solve_one_excitation(inf_cfg, 2e-3, 5.0);
        double worst = 0.0;
        for (double r : one_inf.norm_residual) worst = std::max(worst, std::abs(r));
        CHECK(worst < 1e-4);
        CHECK(one_inf.p_g[0] == 0.0);

        auto cfg = semi_4pi();
        auto one_semi = solve_one_excitation(cfg, align_dt(cfg, 2e-3), 5.0);
        worst = 0.0;
        for (double r : one_semi.norm_residual) worst = std::max(worst, std::abs(r));
        CHECK(worst < 1e-4);
        for (double p : one_semi.p_g) CHECK(p <= 1.0);
    }

    TEST_CASE("infinite and semi-infinite agree before the echo") {
        auto cfg = semi_4pi();
        PhysicalConfig inf_cfg;
        double dt = align_dt(cfg, 1e-3);
        auto e = e_semi_dde(cfg, dt, 1.95 * cfg.a);
        double worst = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i)
            worst = std::max(worst, std::abs(e[i] - e_infinite(e.time_at(i), inf_cfg)));
        CHECK(worst < 1e-8);
    }

    TEST_CASE("phi field reconstruction") {
        PhysicalConfig cfg;
        auto one = solve_one_excitation(cfg, 1e-3, 2.0);
        // right of the light cone: free propagation only (zero ahead of the front)
        auto [r, l] = phi_infinite(1.5, 1.0, cfg, one.e);
        CHECK(std::abs(r) == 0.0);
        CHECK(std::abs(l) == 0.0);
        // left amplitude vanishes for x > 0
        auto [r2, l2] = phi_infinite(0.5, 1.0, cfg, one.e);
        CHECK(std::abs(l2) == 0.0);
        CHECK(std::abs(r2) > 0.0);
        CHECK_THROWS_AS(phi_infinite(-0.5, 3.0, cfg, one.e), NumericalError);

        auto scfg = semi_4pi();
        auto one_s = solve_one_excitation(scfg, align_dt(scfg, 1e-3), 2.0);
        // outside both emission cones: free field only
        double x = -scfg.a - 1.5;
        cd v = phi_semi(x, 1.0, scfg, one_s.e);
        CHECK(std::abs(v - chiral_wavepacket(x - 1.0, scfg)) == 0.0);
    }
}
