#include "core/analysis.hpp"

#include <cmath>

#include "core/quadrature.hpp"
#include "core/rng.hpp"

namespace nbrw {

GantertCheck gantert_identity_check(const TailLaw& law, double v, double k1, double k2,
                                    long mc_samples, std::uint64_t seed) {
    if (!(v > 0.0)) throw domain_error("v > 0 required");
    if (!(k1 > 0.0 && k1 <= k2)) throw domain_error("need 0 < K1 <= K2");
    if (v * k2 > 700.0) throw domain_error("v*K2 > 700 would overflow; rescale");

    GantertCheck out;

    // Density route for the expectation: jumps have no mass below 1 and a
    // continuous density above, so E[g(Y)] = int g f + P(Y > K2) * 1.
    {
        const double lo = std::max(k1, 1.0);
        double integral = 0.0;
        if (k2 > lo)
            integral = integrate([&](double u) { return std::exp(v * u) * law.density(u); }, lo,
                                 k2, 1e-10);
        out.lhs_quadrature = integral + law.survival(k2);
    }

    // Survival route, exactly as displayed.
    {
        double integral = 0.0;
        if (k2 > k1)
            integral = integrate([&](double u) { return v * std::exp(v * u) * law.survival(u); },
                                 k1, k2, 1e-10);
        out.rhs_quadrature = integral + std::exp(v * k1) * law.survival(k1) -
                             (std::exp(v * k2) - 1.0) * law.survival(k2);
    }

    // Monte Carlo of the left side.
    {
        double sum = 0.0, sumsq = 0.0;
        for (long i = 0; i < mc_samples; ++i) {
            const double u = bits_to_open_unit(keyed_bits(seed, StreamDomain::scratch, 0,
                                                          static_cast<std::uint64_t>(i), 0));
            const double y = law.sample(u);
            const double g = y >= k1 ? std::exp(v * std::min(y, k2) * (y <= k2 ? 1.0 : 0.0)) : 0.0;
            sum += g;
            sumsq += g * g;
        }
        const double mean = sum / static_cast<double>(mc_samples);
        const double var =
            std::max(0.0, sumsq / static_cast<double>(mc_samples) - mean * mean);
        out.lhs_monte_carlo = mean;
        out.mc_se = std::sqrt(var / static_cast<double>(mc_samples));
    }

    out.quad_abs_diff = std::abs(out.lhs_quadrature - out.rhs_quadrature);
    out.mc_abs_diff = std::abs(out.lhs_monte_carlo - out.rhs_quadrature);
    return out;
}

double wilson_upper_bound(long hits, long trials, double z) {
    const double nt = static_cast<double>(trials);
    const double p = static_cast<double>(hits) / nt;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nt;
    const double centre = p + z2 / (2.0 * nt);
    const double spread = z * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt));
    return (centre + spread) / denom;
}

TruncatedSumCheck truncated_sum_bound_check(const TailLaw& law, int m, double r, double lambda,
                                            long n_particles, long samples, std::uint64_t seed) {
    if (!(r > 0.0 && r < 1.0)) throw domain_error("r must lie in (0, 1)");
    if (m < 1 || lambda <= 0.0) throw domain_error("need m >= 1 and lambda > 0");
    if (samples < 1) throw domain_error("need at least one sample");

    TruncatedSumCheck out;
    out.ell = time_scale(n_particles);
    out.x_n = std::pow(static_cast<double>(n_particles), lambda) * (1.0 + 1e-9);
    const double cutoff = r * out.x_n;
    const double amin = std::min(1.0, law.alpha);
    const double log2 = std::log(2.0);

    // Proof window (2 q log 2, lambda amin log 2 / (4 r)); shrink q to open it.
    const double upper = lambda * amin * log2 / (4.0 * r);
    double q = 6.0;
    bool window_empty = false;
    if (!(2.0 * q * log2 < upper)) {
        q = lambda * amin / (16.0 * r); // guarantees 2 q log 2 = upper / 2
        if (!(2.0 * q * log2 < upper)) window_empty = true;
    }
    out.c = window_empty ? 4.0 * q * log2 : 0.5 * (2.0 * q * log2 + upper);

    // Markov side: E[e^{c ell X~ / x_N}]^{m ell} * e^{-c ell}, expectation by
    // quadrature against the density plus the two atoms of X~ (the truncated
    // part at 0 and the sub-1 no-op region, which is empty for these laws).
    const double v = out.c * out.ell / out.x_n;
    double expect = law.survival(cutoff) * 1.0; // X~ = 0 when X > r x_N
    if (cutoff >= 1.0) {
        expect += integrate([&](double u) { return std::exp(v * u) * law.density(u); }, 1.0,
                            cutoff, 1e-12);
        // No atom at 1: survival is continuous there for both families.
    }
    // Mass below 1 contributes nothing for pareto laws (P(X < 1) = 0).
    out.markov_bound =
        std::exp(-out.c * out.ell) * std::pow(expect, static_cast<double>(m) * out.ell);

    // Monte Carlo of the exact truncated-sum tail.
    long hits = 0;
    const long steps = static_cast<long>(m) * out.ell;
    for (long i = 0; i < samples; ++i) {
        double sum = 0.0;
        for (long j = 0; j < steps; ++j) {
            const double u = bits_to_open_unit(
                keyed_bits(seed, StreamDomain::scratch, 1, static_cast<std::uint64_t>(i),
                           static_cast<std::uint64_t>(j)));
            const double x = law.sample(u);
            if (x <= cutoff) sum += x;
            if (sum >= out.x_n) break;
        }
        if (sum >= out.x_n) ++hits;
    }
    out.mc_estimate = static_cast<double>(hits) / static_cast<double>(samples);
    out.wilson_upper = wilson_upper_bound(hits, samples);

    if (window_empty)
        out.verdict = "window-empty";
    else
        out.verdict = out.wilson_upper <= out.markov_bound ? "pass" : "fail";
    return out;
}

} // namespace nbrw
