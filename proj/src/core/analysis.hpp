#pragma once

#include <cstdint>
#include <string>

#include "core/tails.hpp"

namespace nbrw {

// Numeric check of the truncated-exponential identity
//   E[exp(v Y 1{Y<=K2}) 1{Y>=K1}]
//     = int_{K1}^{K2} v e^{vu} P(Y>u) du + e^{v K1} P(Y>=K1) - (e^{v K2}-1) P(Y>K2).
// The left side is evaluated through the density (one route) and by Monte
// Carlo; the right side through the survival function (independent route).
struct GantertCheck {
    double lhs_quadrature = 0.0;
    double rhs_quadrature = 0.0;
    double lhs_monte_carlo = 0.0;
    double mc_se = 0.0;
    double quad_abs_diff = 0.0;
    double mc_abs_diff = 0.0; // |MC - rhs_quadrature|
};

GantertCheck gantert_identity_check(const TailLaw& law, double v, double k1, double k2,
                                    long mc_samples = 1000000, std::uint64_t seed = 1);

// Exponential-Markov bound for the truncated sum: with x_N = N^lambda (1+1e-9)
// and X~ = X 1{X <= r x_N},
//   P(sum_{j<=m ell_N} X~_j >= x_N) <= e^{-c ell_N} E[e^{c ell_N X~ / x_N}]^{m ell_N}.
// c is taken from the proof window (2 q log 2, lambda min(1,alpha) log 2 / (4 r))
// with q shrunk until the window is non-empty; if no q > 0 opens the window the
// fallback c = 4 q log 2 applies and the verdict is "window-empty". The bound
// holds for every N by Markov, so the Monte-Carlo Wilson upper bound must sit
// below it whenever the verdict is "pass"-eligible.
struct TruncatedSumCheck {
    double x_n = 0.0;
    double c = 0.0;
    int ell = 0;
    double mc_estimate = 0.0;
    double wilson_upper = 0.0;
    double markov_bound = 0.0;
    std::string verdict; // "pass", "fail", or "window-empty"
};

TruncatedSumCheck truncated_sum_bound_check(const TailLaw& law, int m, double r, double lambda,
                                            long n_particles, long samples,
                                            std::uint64_t seed = 1);

double wilson_upper_bound(long hits, long trials, double z = 3.0);

} // namespace nbrw
