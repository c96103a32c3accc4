#include "wqed/sweep.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace wqed {

unsigned worker_count(int flag_value) {
    if (flag_value > 0) return static_cast<unsigned>(flag_value);
    if (const char* env = std::getenv("WQED_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n ? n : 1)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

PointResult run_measure_point(const PhysicalConfig& cfg, double dt, double t_max) {
    cfg.validate();
    double dt_run = align_dt(cfg, dt);
    auto one = solve_one_excitation(cfg, dt_run, t_max);
    TwoExcitationSolution two = cfg.geometry == Geometry::Infinite
                                    ? solve_infinite(cfg, dt_run, t_max)
                                    : solve_semi_infinite(cfg, dt_run, t_max);
    PointResult out;
    out.trajectory = build_trajectory(one, two);
    auto rates = extract_rates(out.trajectory);
    out.report = measure_report(cfg, out.trajectory, rates);
    return out;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ConfigError("invalid log-spaced grid");
    std::vector<double> out(n);
    double llo = std::log(lo), lhi = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

std::vector<SweepRow> sweep_alpha(const std::vector<double>& alphas,
                                  const std::vector<double>& k0a_over_pi_list, double omega0,
                                  double dt, double t_max, unsigned workers) {
    for (std::size_t i = 1; i < alphas.size(); ++i)
        if (!(alphas[i] > alphas[i - 1]) || !(alphas[i - 1] > 0.0))
            throw ConfigError("alpha grid must be strictly increasing and positive");
    std::vector<SweepRow> rows(alphas.size() * k0a_over_pi_list.size());
    parallel_for(rows.size(), workers, [&](std::size_t idx) {
        std::size_t gi = idx / alphas.size();
        std::size_t ai = idx % alphas.size();
        double k0a = k0a_over_pi_list[gi];
        PhysicalConfig cfg;
        if (k0a < 0.0) {
            cfg.omega0 = omega0;
            cfg.k = omega0;
            cfg.alpha = alphas[ai];
        } else {
            cfg = make_semi_infinite(k0a, omega0, omega0, alphas[ai]);
        }
        auto res = run_measure_point(cfg, dt, t_max);
        rows[idx] = {alphas[ai],
                     k0a,
                     res.report.gm,
                     res.report.blp,
                     res.report.max_n_delta,
                     res.report.cp_broken,
                     res.report.p_broken};
    });
    return rows;
}

}  // namespace wqed
