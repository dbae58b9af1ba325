#pragma once

#include <string>
#include <vector>

#include "core/events.hpp"

namespace nbrw {

enum class Conclusion { pass, fail, not_evaluated };

std::string to_string(Conclusion c);

// One checked implication. `counterexample` is non-empty exactly when the
// hypotheses and the explicit size condition hold but the conclusion fails.
// The conclusion is still evaluated (informationally) whenever the
// hypotheses hold, even if the size condition does not.
struct ImplicationVerdict {
    std::string name;
    bool hypotheses_hold = false;
    bool size_condition_holds = false;
    Conclusion conclusion = Conclusion::not_evaluated;
    std::string counterexample; // empty = none
    std::string detail;
};

// Unconditional structure of every N-BRW trajectory: per-rank monotonicity,
// the right-of-x doubling bound, the second-rightmost bound
// X_N(s-1) <= X_{N-1}(s), and the path-sum identity to 16 ULP per step.
std::vector<ImplicationVerdict> check_basic(const Trajectory& traj);

// Leading-tribe implication: C1..C7 => B1 and B2 and A1 and
// d(X(t1)) >= (3/2) c3 a_N, under 2 K N^-delta < N^-gamma < 1.
ImplicationVerdict check_prop_B(const Trajectory& traj, const ConstantSchedule& sched, int t,
                                const EventParams& params = {});
// Gap-appearance implication: C2..C7 and D1..D5 => C1, under
// ell - ceil(c5 ell) >= ceil(ell/2).
ImplicationVerdict check_prop_C(const Trajectory& traj, const ConstantSchedule& sched, int t,
                                const EventParams& params = {});

// Report-level combiners behind the two proposition checkers and Lemma A,
// exposed so the checker logic itself can be self-tested on doctored reports.
ImplicationVerdict check_prop_B(const Trajectory& traj, const ConstantSchedule& sched, int t,
                                const EventReport& report);
ImplicationVerdict check_prop_C(const Trajectory& traj, const ConstantSchedule& sched, int t,
                                const EventReport& report);
ImplicationVerdict check_lemma_a(const EventReport& report);

// The conditional support lemmas and corollaries, each quantified over its
// full index range: path moves > c1 a_N forces a big jump (on C4); at most
// c1 a_N drift after a big jump (C3,C4); the single-big-jump step bounds; big
// jumps come from near the leftmost particle (C3,C4); the two gap
// corollaries; record/surpass equivalence at large diameter; the no-record
// drift and diameter collapse bounds; the one-window diameter bound; and
// B1 and B2 => A3 (checked unconditionally).
std::vector<ImplicationVerdict> check_support_lemmas(const Trajectory& traj,
                                                     const ConstantSchedule& sched, int t,
                                                     const EventParams& params = {});

struct RewriteStats {
    long replicates = 0;
    long a2_fail = 0;
    long a3_fail = 0;
    long a4_fail = 0; // undefined counts as fail for the bound's purposes
};

// Empirical form of P(A2^c) <= 2 P(A3^c) + P(A4(nu)^c) + eta, with three
// binomial standard errors of slack. Statistical consistency, not a proof.
ImplicationVerdict check_lemma_rewrite_bound(const RewriteStats& stats, double eta, double nu,
                                             double m_sample);

std::string verdicts_to_json(const std::vector<ImplicationVerdict>& verdicts);
bool any_counterexample(const std::vector<ImplicationVerdict>& verdicts);

} // namespace nbrw
