#pragma once

#include <span>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace nbrw {

enum class TailFamily {
    pareto,     // h(x) = x^alpha for x >= 1, h = 1 below
    pareto_log, // h(x) = x^alpha * ln(e+x)/ln(e+1) for x >= 1, h = 1 below
};

TailFamily tail_family_from_string(const std::string& name);
std::string to_string(TailFamily family);

// A regularly varying tail function h with index alpha. The jump law is
// P(X > x) = 1/h(x); jumps are non-negative and h(0) = 1.
struct TailLaw {
    TailFamily family = TailFamily::pareto;
    double alpha = 1.0;

    TailLaw() = default;
    TailLaw(TailFamily f, double a);

    double h(double x) const;
    double h_derivative(double x) const; // d/dx h(x) for x > 1
    double survival(double x) const;     // 1/h(x), requires x >= 0
    double density(double x) const;      // h'(x)/h(x)^2 on (1, inf), 0 below 1

    // Generalised inverse inf{z >= 0 : h(z) > y}. Closed form for pareto;
    // bracketed bisection to relative tolerance 1e-12 otherwise.
    double h_inverse(double y) const;

    // Inverse-transform sampler: X = h_inverse(1/u) for u in (0,1).
    double sample(double u) const;
};

// The time and space scales derived from N: ell = ceil(log2 N) computed in
// integer arithmetic, a = h_inverse(2*N*ell), and the integer eps*ell used by
// the star-shaped-coalescence statistics.
struct Scales {
    long n_particles = 0;
    int ell = 0;
    double a = 0.0;
    int eps_ell = 1;
};

int time_scale(long n_particles);
double space_scale(const TailLaw& law, long n_particles);

// eps_N * ell_N := max(1, floor(log2(ell)/4)). Integer valued, >= 1, and meets
// the cap eps_N <= log2(ell)/(4 ell) once ell >= 16; below that the clamp to 1
// is flagged via Scales-level diagnostics by callers that care.
int epsilon_schedule(int ell);

Scales make_scales(const TailLaw& law, long n_particles);

struct PotterCertificate {
    double B = 1.0;
    double C1 = 1.0;
    double C2 = 1.0;
};

// Smallest constants that witness 1/h(x) <= C1 x^(eps-alpha) and
// h(x) <= C2 x^(alpha+eps) at every grid point >= B. Property-test helper.
PotterCertificate potter_certificate(const TailLaw& law, double eps, std::span<const double> grid);

} // namespace nbrw
