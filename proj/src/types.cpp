#include "wqed/types.hpp"

#include <cmath>

namespace wqed {

void PhysicalConfig::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw ConfigError("gamma must be positive and finite");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw ConfigError("alpha must be positive and finite");
    if (!std::isfinite(omega0)) throw ConfigError("omega0 must be finite");
    if (!std::isfinite(k)) throw ConfigError("k must be finite");
    if (geometry == Geometry::SemiInfinite) {
        if (!(a > 0.0) || !std::isfinite(a))
            throw ConfigError("a must be positive and finite for the semi-infinite geometry");
    }
}

PhysicalConfig make_semi_infinite(double k0a_over_pi, double omega0, double k,
                                  double alpha, double gamma) {
    PhysicalConfig cfg;
    cfg.gamma = gamma;
    cfg.omega0 = omega0;
    cfg.k = k;
    cfg.alpha = alpha;
    cfg.geometry = Geometry::SemiInfinite;
    cfg.a = k0a_over_pi * M_PI / omega0;  // k0 = omega0
    cfg.validate();
    return cfg;
}

void LatticeSpec::validate(const PhysicalConfig& cfg) const {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");
    if (x_min > cfg.x0() + 1e-12) throw ConfigError("x_min must not exceed the qubit position");
    double need = t_max + std::max(cfg.geometry == Geometry::SemiInfinite ? cfg.a : 0.0, 0.0);
    if (x_max + 1e-12 < need)
        throw ConfigError("x_max too small: light-cone content would leave the domain");
    if (cfg.geometry == Geometry::SemiInfinite) {
        double ratio = cfg.a / dt;
        if (std::abs(ratio - std::llround(ratio)) > 1e-9)
            throw ConfigError("a must be an integer multiple of dt (use align_dt)");
    }
}

double align_dt(const PhysicalConfig& cfg, double dt_requested) {
    if (!(dt_requested > 0.0)) throw ConfigError("dt must be positive");
    if (cfg.geometry != Geometry::SemiInfinite) return dt_requested;
    auto cells = std::max<long long>(1, std::llround(cfg.a / dt_requested));
    return cfg.a / static_cast<double>(cells);
}

cd ComplexSeries::at_time(double t) const {
    if (values.empty() || dt <= 0.0) throw NumericalError("empty series");
    double m = (t - t0) / dt;
    if (m < -1e-9 || m > static_cast<double>(values.size() - 1) + 1e-9)
        throw NumericalError("requested time outside stored history");
    if (m <= 0.0) return values.front();
    auto i = static_cast<std::size_t>(m);
    if (i >= values.size() - 1) return values.back();
    double f = m - static_cast<double>(i);
    return values[i] * (1.0 - f) + values[i + 1] * f;
}

void ComplexSeries::validate() const {
    if (values.size() < 2) throw ConfigError("series needs at least 2 samples");
    if (!(dt > 0.0)) throw ConfigError("series dt must be positive");
    for (const auto& v : values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericalError("non-finite value in series");
}

}  // namespace wqed
