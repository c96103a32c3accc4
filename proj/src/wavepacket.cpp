#include "wqed/wavepacket.hpp"

#include <cmath>

#include "wqed/kernels.hpp"

namespace wqed {

cd wavepacket_amplitude(double x, const PhysicalConfig& cfg) {
    double x0 = cfg.x0();
    double th = theta_half(x0 - x);
    if (th == 0.0) return 0.0;
    cd expo = cd(cfg.alpha * cfg.gamma / 2.0, cfg.k) * (x - x0);
    return cd(0.0, std::sqrt(cfg.alpha * cfg.gamma)) * std::exp(expo) * th;
}

cd chiral_wavepacket(double x, const PhysicalConfig& cfg) {
    return cd(0.0, -1.0) * wavepacket_amplitude(x, cfg);
}

double wavepacket_mass_below(double u, const PhysicalConfig& cfg) {
    double x0 = cfg.x0();
    if (u >= x0) return 1.0;
    return std::exp(cfg.alpha * cfg.gamma * (u - x0));
}

double default_support_width(const PhysicalConfig& cfg) {
    return 40.0 / (cfg.alpha * cfg.gamma);
}

double trapezoid_norm(const std::vector<cd>& values, double dx) {
    if (!(dx > 0.0)) throw ConfigError("trapezoid_norm: dx must be positive");
    if (values.empty()) return 0.0;
    if (values.size() == 1) return 0.0;
    double s = kernels::sum_abs2(values.data(), values.size());
    s -= 0.5 * (std::norm(values.front()) + std::norm(values.back()));
    return s * dx;
}

cd trapezoid_overlap(const std::vector<cd>& a, const std::vector<cd>& b, double dx) {
    if (a.size() != b.size()) throw ConfigError("trapezoid_overlap: size mismatch");
    if (a.size() < 2) return 0.0;
    cd s = kernels::dot_conj(a.data(), b.data(), a.size());
    s -= 0.5 * (std::conj(a.front()) * b.front() + std::conj(a.back()) * b.back());
    return s * dx;
}

double trapezoid_norm_jump_end(const std::vector<cd>& v, std::size_t m, double dx) {
    if (m == 0 || m >= v.size()) return 0.0;
    double s = kernels::sum_abs2(v.data(), m + 1);
    s += -0.5 * std::norm(v[0]) + std::norm(v[m]);
    return s * dx;
}

cd trapezoid_overlap_jump_end(const std::vector<cd>& a, const std::vector<cd>& b, std::size_t m,
                              double dx) {
    if (m == 0 || m >= a.size() || m >= b.size()) return 0.0;
    cd s = kernels::dot_conj(a.data(), b.data(), m + 1);
    s += -0.5 * std::conj(a[0]) * b[0] + std::conj(a[m]) * b[m];
    return s * dx;
}

}  // namespace wqed
