#include "core/tails.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace nbrw {

TailFamily tail_family_from_string(const std::string& name) {
    if (name == "pareto") return TailFamily::pareto;
    if (name == "pareto_log") return TailFamily::pareto_log;
    throw domain_error("unknown tail family: " + name);
}

std::string to_string(TailFamily family) {
    return family == TailFamily::pareto ? "pareto" : "pareto_log";
}

TailLaw::TailLaw(TailFamily f, double a) : family(f), alpha(a) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw domain_error("tail index alpha must be a positive real");
}

namespace {
const double kLogE1 = std::log(std::exp(1.0) + 1.0);
}

double TailLaw::h(double x) const {
    if (x < 0.0) throw domain_error("h is defined on [0, inf)");
    if (x < 1.0) return 1.0;
    switch (family) {
    case TailFamily::pareto:
        return std::pow(x, alpha);
    case TailFamily::pareto_log:
        return std::pow(x, alpha) * std::log(std::exp(1.0) + x) / kLogE1;
    }
    return 1.0;
}

double TailLaw::h_derivative(double x) const {
    if (x <= 1.0) return 0.0;
    switch (family) {
    case TailFamily::pareto:
        return alpha * std::pow(x, alpha - 1.0);
    case TailFamily::pareto_log: {
        const double e = std::exp(1.0);
        return (alpha * std::pow(x, alpha - 1.0) * std::log(e + x) +
                std::pow(x, alpha) / (e + x)) /
               kLogE1;
    }
    }
    return 0.0;
}

double TailLaw::survival(double x) const {
    if (x < 0.0) throw domain_error("survival requires x >= 0");
    return 1.0 / h(x);
}

double TailLaw::density(double x) const {
    if (x <= 1.0) return 0.0;
    const double hx = h(x);
    return h_derivative(x) / (hx * hx);
}

double TailLaw::h_inverse(double y) const {
    if (y < 0.0) throw domain_error("h_inverse requires y >= 0");
    if (y < 1.0) return 0.0; // h(0) = 1 > y already
    if (family == TailFamily::pareto) return std::pow(y, 1.0 / alpha);

    // h is continuous and strictly increasing on [1, inf) for pareto_log, so
    // the generalised inverse is the root of h(z) = y. Doubling bracket, then
    // bisection to relative tolerance 1e-12.
    if (y == 1.0) return 1.0;
    double lo = 1.0, hi = 2.0;
    while (h(hi) <= y) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw domain_error("h_inverse argument too large");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (h(mid) > y)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 1e-12 * hi) break;
    }
    return 0.5 * (lo + hi);
}

double TailLaw::sample(double u) const {
    if (!(u > 0.0) || !(u < 1.0)) throw domain_error("sample requires u in (0,1)");
    return h_inverse(1.0 / u);
}

int time_scale(long n_particles) {
    if (n_particles < 2) throw domain_error("N >= 2 required");
    // ceil(log2 N) = bit width of N-1.
    const auto m = static_cast<unsigned long long>(n_particles - 1);
    return static_cast<int>(std::bit_width(m));
}

double space_scale(const TailLaw& law, long n_particles) {
    const int ell = time_scale(n_particles);
    return law.h_inverse(2.0 * static_cast<double>(n_particles) * ell);
}

int epsilon_schedule(int ell) {
    if (ell < 1) throw domain_error("ell >= 1 required");
    // floor(log2(ell)/4) == floor(floor(log2 ell)/4), both floors exact in
    // integer arithmetic.
    const int floor_log2 = static_cast<int>(std::bit_width(static_cast<unsigned>(ell))) - 1;
    return std::max(1, floor_log2 / 4);
}

Scales make_scales(const TailLaw& law, long n_particles) {
    Scales s;
    s.n_particles = n_particles;
    s.ell = time_scale(n_particles);
    s.a = law.h_inverse(2.0 * static_cast<double>(n_particles) * s.ell);
    s.eps_ell = epsilon_schedule(s.ell);
    return s;
}

PotterCertificate potter_certificate(const TailLaw& law, double eps, std::span<const double> grid) {
    if (!(eps > 0.0)) throw domain_error("eps > 0 required");
    if (grid.empty()) throw domain_error("potter_certificate requires a non-empty grid");
    PotterCertificate cert;
    if (*std::min_element(grid.begin(), grid.end()) < 1.0)
        throw domain_error("grid points must be >= 1");
    cert.B = 1.0; // the C's are maxed over the whole grid, so B = 1 certifies
    double c1 = 0.0, c2 = 0.0;
    for (double x : grid) {
        c1 = std::max(c1, std::pow(x, law.alpha - eps) / law.h(x));
        c2 = std::max(c2, law.h(x) / std::pow(x, law.alpha + eps));
    }
    cert.C1 = std::max(c1, 1.0);
    cert.C2 = std::max(c2, 1.0);
    return cert;
}

} // namespace nbrw
