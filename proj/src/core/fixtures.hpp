#pragma once

#include <string>
#include <vector>

#include "core/events.hpp"
#include "core/genealogy.hpp"

namespace nbrw {

enum class FixtureKind {
    propC_case1,       // small diameter at tau2 <= t1 - c5 ell, then a > 2 c4 a_N jump
    propC_case2a,      // large diameter throughout, record broken inside [t2, t1 - c5 ell]
    G_event,           // exactly one jump > (r+3) a_N in the A2' window, others <= a_N
    star,              // all sampled lineages forced through the leader at a chosen time
    big_jump_leftmost, // a big jump launched from the back while the diameter is large
    noRecord,          // a surpass-free stretch with large diameter, plus its collapse
};

FixtureKind fixture_kind_from_string(const std::string& name);
std::string to_string(FixtureKind kind);

struct FixtureResult {
    Trajectory traj;
    int t = 0;
    EventReport report;
    CoalescenceProfile profile;          // star / G_event kinds; empty sample otherwise
    std::vector<std::string> satisfied;  // hypothesis events realised non-vacuously
    std::vector<std::string> missing;    // chain events that cannot hold at this scale
    double min_full_hypothesis_n = 0.0;  // smallest N for the full Prop C hypothesis set
    std::string note;
};

// Builds an engine-replayable trajectory (the engineered jumps ARE the random
// stream: base jumps plus addressed overrides) realising the requested
// scenario, then event-checks it. Throws domain_error with an explicit report
// when the request cannot be realised at the given (schedule, N, t).
FixtureResult build_fixture(FixtureKind kind, const ConstantSchedule& sched, long n, int t,
                            std::uint64_t seed = 7);

// Smallest N at which the joint D2-and-C6 window arithmetic of the full
// Prop C hypothesis set stops being self-contradictory for this schedule:
// floor(c5 ell) >= ceil(delta ell) + 1 and ell - ceil(c5 ell) >= ceil(ell/2).
double prop_c_min_full_n(const ConstantSchedule& sched);

} // namespace nbrw
