#pragma once

#include "wqed/types.hpp"

namespace wqed {

/// exp(z) - 1 for complex z, accurate near z = 0.
cd expm1c(cd z);

/// Lower incomplete gamma gamma(n, z) for integer n >= 1 and complex z.
///
/// Satisfies gamma(1, z) = 1 - exp(-z) and the upward recurrence
/// gamma(n+1, z) = n gamma(n, z) - z^n exp(-z). Evaluated by the recurrence
/// except where that cancels catastrophically (|z| small against n), where a
/// Kummer series on the scaled form is used instead.
cd lower_incomplete_gamma(int n, cd z);

/// gamma(n+1, z) / z^{n+1}, entire in z (value 1/(n+1) at z = 0). This is the
/// combination the echo series needs; it stays finite at the resonant
/// removable singularity.
cd gamma_ratio(int n, cd z);

}  // namespace wqed
