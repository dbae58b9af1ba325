#pragma once

#include <string>

#include "core/errors.hpp"

namespace nbrw {

// The constant tuple driving every event definition. Either derived from eta
// by the deterministic recipe in schedule_from_eta (derived = true), or
// supplied directly as any tuple satisfying the ordering chain
//   0 < gamma < delta < rho,  10*rho < c1,  10*c_j < c_{j+1} < eta <= 1,
//   K > rho^-alpha
// ("relaxed" regime). eta_condition_holds records whether eta also satisfies
// the smallness condition eta^2 < min((2^(alpha+2) log(1000/eta))^(-1/alpha),
// eta/(1000*2^alpha)) required by the probability bounds; event evaluation is
// legal either way.
struct ConstantSchedule {
    double eta = 0;
    double gamma = 0;
    double delta = 0;
    double rho = 0;
    double c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0, c6 = 0;
    double K = 0;
    double nu = 0;
    double alpha = 1.0;
    bool derived = false;
    bool eta_condition_holds = false;

    void validate_chain() const; // throws domain_error when the chain fails
};

// The derivation recipe, carried in log10 space (the chain bottoms out near
// 10^-1500 for every admissible eta, far below binary64):
//   c6 = eta^2, c5 = eta^(6 max(1,alpha)), c4 = c5^(4/min(1,alpha)),
//   c3 = largest c4^(4 max(1,alpha)) / 2^k (k >= 1) with
//        (1 - 6 c3/c4)^alpha >= 1 - 12 alpha c3/c4,
//   c2 = analogous halving search below c3^(4 max(1,alpha)),
//   c1 = c2^2, rho = c1 min(1,alpha)^2/(100 alpha), delta = rho^(alpha+1),
//   gamma = delta/2, K = rho^(-alpha-1).
struct ScheduleDerivationLog {
    double eta = 0, alpha = 0;
    double log10_c6 = 0, log10_c5 = 0, log10_c4 = 0, log10_c3 = 0, log10_c2 = 0, log10_c1 = 0;
    double log10_rho = 0, log10_delta = 0, log10_gamma = 0, log10_K = 0;
    bool eta_condition_holds = false;
};
ScheduleDerivationLog schedule_derivation_log(double eta, double alpha);

// Materialises the derivation into doubles. nu defaults to eta/32 (the M = 4
// sample-size choice; override as needed). Throws scale_infeasible_error when
// a derived constant leaves the normal double range, which at present is the
// case for every admissible eta: the recipe is faithful to its source, and
// relaxed_schedule is the desk-scale instrument.
ConstantSchedule schedule_from_eta(double eta, double alpha);

// A legal non-derived tuple with the largest practical delta - gamma given
// the chain, used by the fixture builder. All constants sit one order of
// magnitude apart under eta.
ConstantSchedule relaxed_schedule(double eta, double alpha);

// Smallest N for which 2 K N^-delta < N^-gamma < 1 holds (the explicit size
// condition of the leading-tribe implication); may be astronomically large.
double prop_b_min_n(const ConstantSchedule& s);

ConstantSchedule schedule_from_json_text(const std::string& text);
std::string schedule_to_json_text(const ConstantSchedule& s);

} // namespace nbrw
