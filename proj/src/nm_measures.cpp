#include "wqed/nm_measures.hpp"

#include <cmath>

namespace wqed {

double delta_closed_form(double t, double alpha) {
    if (std::abs(alpha - 1.0) <= 1e-4)
        return std::exp(-2.0 * t) * (std::exp(t) * (3.0 - 2.0 * t) - 2.0);
    double al = alpha;
    // decaying-exponential form of the printed expression
    return (8.0 * al * std::exp(-(al + 1.0) * t / 2.0) +
            (al - 5.0) * (al + 1.0) * std::exp(-t) + 4.0 * (1.0 - al) * std::exp(-(al + 1.0) * t)) /
           (al * al - 1.0);
}

namespace {

// sign of f(t) - g(t), evaluated in overflow-safe scaled form
double fg_sign(double t, double al) {
    if (std::abs(al - 1.0) <= 1e-4) {
        // degenerate f = g at alpha = 1; stationary points of the limit form
        return 2.0 * t - 5.0 + 4.0 * std::exp(-t) > 0 ? -1.0 : 1.0;
        // note: dDelta/dt = e^{-t}(2t - 5 + 4 e^{-t}) has the opposite sign
        // convention of (f - g)/(alpha - 1); callers only use the sign change.
    }
    double scale = std::max(al, (al + 1.0) / 2.0) * t;
    double f = 5.0 * std::exp(al * t - scale) + 4.0 * al * std::exp(-scale);
    double g = 4.0 * al * std::exp((al + 1.0) * t / 2.0 - scale) + al * std::exp(al * t - scale) +
               4.0 * std::exp(-scale);
    return f - g;
}

}  // namespace

StationaryPoint delta_stationary_analysis(double alpha, double t_tol) {
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    StationaryPoint out;
    if (alpha >= 5.0) return out;  // f stays below g: no crossing for t > 0
    double lo = 0.0, hi = 1.0;
    double s0 = fg_sign(1e-12, alpha) > 0 ? 1.0 : -1.0;
    int guard = 0;
    while ((fg_sign(hi, alpha) > 0 ? 1.0 : -1.0) == s0) {
        hi *= 2.0;
        if (++guard > 60) return out;  // no crossing found
    }
    while (hi - lo > t_tol) {
        double mid = 0.5 * (lo + hi);
        if ((fg_sign(mid, alpha) > 0 ? 1.0 : -1.0) == s0)
            lo = mid;
        else
            hi = mid;
    }
    out.count = 1;
    out.t_star = 0.5 * (lo + hi);
    out.delta_min = delta_closed_form(out.t_star, alpha);
    return out;
}

std::vector<double> negativity_profile(const MapTrajectory& traj) {
    std::vector<double> out(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i)
        out[i] = -std::min(0.0, traj[i].delta());
    return out;
}

double gm_measure(const MapTrajectory& traj) {
    double n = 0.0;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        double d0 = std::abs(traj[i].det_m());
        double d1 = std::abs(traj[i + 1].det_m());
        n += std::max(0.0, d1 - d0);
    }
    return n;
}

namespace {

double blp_at_angle(const MapTrajectory& traj, double theta0) {
    double s2 = std::sin(theta0) * std::sin(theta0);
    double c2 = std::cos(theta0) * std::cos(theta0);
    double total = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        double delta = traj[i].delta();
        double d = std::sqrt(std::norm(traj[i].c) * s2 + delta * delta * c2);
        if (i > 0) total += std::max(0.0, d - prev);
        prev = d;
    }
    return total;
}

}  // namespace

double blp_measure(const MapTrajectory& traj, int n_angles) {
    if (n_angles < 16) throw ConfigError("blp_measure needs at least 16 angles");
    double best = 0.0, best_th = 0.0;
    for (int i = 0; i < n_angles; ++i) {
        double th = M_PI_2 * static_cast<double>(i) / static_cast<double>(n_angles - 1);
        double v = blp_at_angle(traj, th);
        if (v > best) {
            best = v;
            best_th = th;
        }
    }
    // golden-section refinement around the best grid angle
    double span = M_PI_2 / static_cast<double>(n_angles - 1);
    double a = std::max(0.0, best_th - span), b = std::min(M_PI_2, best_th + span);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = blp_at_angle(traj, x1), f2 = blp_at_angle(traj, x2);
    for (int it = 0; it < 40; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = blp_at_angle(traj, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = blp_at_angle(traj, x1);
        }
    }
    return std::max(best, std::max(f1, f2));
}

DivisibilityVerdict divisibility_verdict(const MapTrajectory& traj, const RateTrajectory& rates) {
    if (traj.size() != rates.size()) throw ConfigError("trajectory/rates grid mismatch");
    DivisibilityVerdict out;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (!rates.singular[i] &&
            std::min({rates.gamma_plus[i], rates.gamma_minus[i], rates.gamma_z[i]}) < -verdict_tol)
            out.cp_broken = true;
        if (traj[i].delta() < 0.0 && std::abs(traj[i].c) > verdict_tol) out.p_broken = true;
    }
    return out;
}

MeasureReport measure_report(const PhysicalConfig& cfg, const MapTrajectory& traj,
                             const RateTrajectory& rates) {
    MeasureReport rep;
    rep.params = cfg;
    auto nd = negativity_profile(traj);
    for (double v : nd) rep.max_n_delta = std::max(rep.max_n_delta, v);
    rep.gm = gm_measure(traj);
    rep.blp = blp_measure(traj);
    auto verdict = divisibility_verdict(traj, rates);
    rep.cp_broken = verdict.cp_broken;
    rep.p_broken = verdict.p_broken;
    for (auto s : rates.singular) rep.singular_samples += s;
    return rep;
}

}  // namespace wqed
