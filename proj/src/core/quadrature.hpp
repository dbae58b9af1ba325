#pragma once

#include <functional>

namespace nbrw {

// Adaptive Gauss-Kronrod (G7, K15) on a finite interval, absolute tolerance
// driven. Bisection recursion; throws capacity_error when the budget of
// subdivisions is exhausted before reaching the tolerance.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double abs_tol = 1e-10);

} // namespace nbrw
