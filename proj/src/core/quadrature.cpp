#include "core/quadrature.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace nbrw {

namespace {

// 15-point Kronrod nodes/weights on [-1, 1] with the embedded 7-point Gauss rule.
constexpr double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                            0.741531185599394, 0.586087235467691, 0.405845151377397,
                            0.207784955007898, 0.0};
constexpr double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                            0.140653259715525, 0.169004726639267, 0.190350578064785,
                            0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                           0.417959183673469};

struct Panel {
    double integral;
    double error;
};

Panel gk15(const std::function<double(double)>& f, double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    const double fc = f(c);
    double res_g = fc * kWg[3];
    double res_k = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const double fsum = f(c - x) + f(c + x);
        res_k += kWgk[j] * fsum;
        if (j % 2 == 1) res_g += kWg[j / 2] * fsum;
    }
    return Panel{res_k * h, std::abs((res_k - res_g) * h)};
}

double adapt(const std::function<double(double)>& f, double lo, double hi, double tol,
             int depth) {
    if (depth > 60) throw capacity_error("quadrature did not converge");
    const Panel p = gk15(f, lo, hi);
    // Accept on the absolute budget, or once the panel is machine-limited
    // (the Kronrod error cannot fall below ~eps times the panel magnitude).
    if (p.error <= tol || p.error <= 64.0 * std::numeric_limits<double>::epsilon() * std::abs(p.integral) ||
        hi - lo < 1e-14 * (std::abs(lo) + 1.0))
        return p.integral;
    const double mid = 0.5 * (lo + hi);
    return adapt(f, lo, mid, tol / 2, depth + 1) + adapt(f, mid, hi, tol / 2, depth + 1);
}

} // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi, double abs_tol) {
    if (lo == hi) return 0.0;
    if (lo > hi) return -integrate(f, hi, lo, abs_tol);
    return adapt(f, lo, hi, abs_tol, 0);
}

} // namespace nbrw
