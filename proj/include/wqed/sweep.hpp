#pragma once

#include <functional>

#include "wqed/io.hpp"
#include "wqed/nm_measures.hpp"

namespace wqed {

/// Worker count: explicit flag if positive, else WQED_WORKERS, else hardware
/// parallelism.
unsigned worker_count(int flag_value = 0);

/// Runs fn(i) for i in [0, n) on a small thread pool. Exceptions are
/// collected and the first one rethrown.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

struct PointResult {
    MeasureReport report;
    MapTrajectory trajectory;
};

/// One parameter point end to end: both sectors, map trajectory, rates and
/// measures. dt is aligned to the qubit-mirror distance where needed.
PointResult run_measure_point(const PhysicalConfig& cfg, double dt, double t_max);

std::vector<double> log_spaced(double lo, double hi, std::size_t n);

/// Fig.-3-style sweep: the given alpha grid across the geometry list
/// (negative k0a_over_pi entries mean the infinite waveguide).
std::vector<SweepRow> sweep_alpha(const std::vector<double>& alphas,
                                  const std::vector<double>& k0a_over_pi_list, double omega0,
                                  double dt, double t_max, unsigned workers);

}  // namespace wqed
