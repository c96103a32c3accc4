#include "wqed/special.hpp"

#include <cmath>

namespace wqed {

namespace {

bool finite(cd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Kummer series M(1, n+2, z) = sum_j z^j / ((n+2)(n+3)...(n+1+j)).
// Used only for |z| <= 0.8 (n+2), where the terms decay geometrically from 1
// and |M| stays O(1).
cd kummer_m1(int n, cd z) {
    cd sum = 1.0, term = 1.0, comp = 0.0;
    for (int j = 1; j < 4000; ++j) {
        term *= z / static_cast<double>(n + 1 + j);
        // Kahan update
        cd y = term - comp;
        cd t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace

cd expm1c(cd z) {
    if (std::abs(z) > 0.7) return std::exp(z) - 1.0;
    cd sum = 0.0, term = 1.0;
    for (int k = 1; k < 40; ++k) {
        term *= z / static_cast<double>(k);
        sum += term;
        if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-300)) break;
    }
    return sum;
}

cd gamma_ratio(int n, cd z) {
    if (n < 0) throw ConfigError("gamma_ratio requires n >= 0");
    double az = std::abs(z);
    if (az <= 0.8 * static_cast<double>(n + 2)) {
        // gamma(n+1,z)/z^{n+1} = e^{-z} M(1, n+2, z) / (n+1)
        cd v = std::exp(-z) * kummer_m1(n, z) / static_cast<double>(n + 1);
        if (!finite(v)) throw NumericalError("gamma_ratio overflow (Kummer branch)");
        return v;
    }
    cd g = lower_incomplete_gamma(n + 1, z);
    cd zp = std::pow(z, static_cast<double>(n + 1));
    cd v = g / zp;
    if (!finite(v)) throw NumericalError("gamma_ratio overflow");
    return v;
}

cd lower_incomplete_gamma(int n, cd z) {
    if (n < 1) throw ConfigError("lower_incomplete_gamma requires n >= 1");
    double az = std::abs(z);
    if (az <= 0.8 * static_cast<double>(n + 1) && az > 0.0) {
        // scaled form avoids the small-|z| cancellation of the recurrence
        cd v = std::pow(z, static_cast<double>(n)) * std::exp(-z) *
               kummer_m1(n - 1, z) / static_cast<double>(n);
        if (!finite(v)) throw NumericalError("incomplete gamma overflow (scaled branch)");
        return v;
    }
    if (az == 0.0) return 0.0;
    // upward recurrence from gamma(1,z) = 1 - e^{-z}
    cd emz = std::exp(-z);
    cd g = -expm1c(-z);
    cd w = z * emz;  // z^k e^{-z}, k = 1
    for (int k = 1; k < n; ++k) {
        g = static_cast<double>(k) * g - w;
        w *= z;
        if (!finite(g) || !finite(w))
            throw NumericalError("incomplete gamma overflow at n = " + std::to_string(k + 1));
    }
    if (!finite(g)) throw NumericalError("incomplete gamma overflow");
    return g;
}

}  // namespace wqed
