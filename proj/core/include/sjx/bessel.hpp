// Bessel functions of the first kind, tuned for the kernels used here:
// J0 to ~1e-11 absolute accuracy on the whole real line, and J_k arrays
// for polynomial propagator coefficients.

#pragma once

#include <vector>

namespace sjx {

// Power series for |x| <= 12, Hankel asymptotic expansion beyond.
double bessel_j0(double x);

// First order, same scheme (used for cross-checks and current estimates).
double bessel_j1(double x);

// J_0(x) ... J_n(x) by Miller downward recurrence, normalized with
// J0 + 2*sum J_{2k} = 1. Accurate to ~1e-13 relative for moderate x.
std::vector<double> bessel_j_array(double x, int n_max);

} // namespace sjx
