#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/engine.hpp"
#include "core/schedule.hpp"

namespace nbrw {

struct JumpRef {
    std::int32_t rank = 0;  // 1-based parent rank at `time`
    std::uint8_t branch = 0;
    int time = 0;
    double value = 0.0;
};

struct EventFlag {
    std::optional<bool> value; // nullopt = undefined (e.g. A4 when T = 0)
    std::string witness;

    bool is_true() const { return value.has_value() && *value; }
    bool is_false() const { return value.has_value() && !*value; }
};

struct PopulationStats {
    double d = 0.0;         // diameter
    int L = 0;              // particles within r*a_N of the leftmost
    int R = 0;              // particles within eps*a_N of the leader
    std::vector<double> z;  // Z_i = X_N - X_i per rank
};

struct Landmarks {
    std::optional<int> tau1; // first gap > 2 c3 a_N behind the leader, s >= t2+1
    std::optional<int> tau2; // first s >= t2 with diameter <= (3/2) c4 a_N
    std::optional<int> tau3; // earliest s in (t2 - ceil(c5 ell), t2] with [s, t2] record-free
};

struct EventReport {
    // frame
    int t = 0, t1 = 0, t2 = 0, t3 = 0, t4 = 0;
    int ell = 0;
    double a = 0.0;
    double rho_used = 0.0; // the rho the big-jump machinery ran with
    double big_threshold = 0.0;
    int eps_ell = 1;
    std::vector<std::int32_t> sample;

    std::vector<JumpRef> big_jump_set; // B_N over [t4, t-1]
    std::vector<int> record_set;       // S_N
    std::vector<int> surpass_set;      // S_hat_N
    int T = 0;                         // 0 = no record before t1
    Landmarks landmarks;
    std::vector<double> diameter_series; // d(X(n)) for n in [t4, t]

    EventFlag a1, a2, a2prime, a3, a4;
    EventFlag b1, b2;
    EventFlag c[7]; // C1..C7 at c[0..6]
    EventFlag d[5]; // D1..D5 at d[0..4]
    EventFlag g;

    // Side quantities useful to callers.
    int r_count_c1_t1 = 0;            // R_{c1,N}(t1)
    long tribe_size_t = 0;            // |N_{N,T}(t)| (0 when T = 0)
    bool sample_descends_from_t = false; // all sample lineages pass through (N, T)

    std::vector<std::pair<std::string, const EventFlag*>> flags() const;
};

struct EventParams {
    double s1 = 0.25;      // A2' / B_N' window [t2 + ceil(s1 ell), t2 + ceil(s2 ell)]
    double s2 = 0.75;
    double r_g = 1.0;      // r in the B_N' threshold (r+3) a_N
    double nu = 0.0;       // 0 = schedule.nu
    double rho_probe = 0.0; // 0 = schedule.rho; otherwise overrides the big-jump rho
};

// ----- record machinery (rho is a bare parameter, as in the definitions) ----

// {(k,b,s): X_{k,b,s} > rho a_N} over the integer window [s_lo, s_hi] clipped
// to [0, duration-1].
std::vector<JumpRef> big_jumps(const Trajectory& traj, double rho, int s_lo, int s_hi);

// Times s where the leader at s+1 arrived through a big jump.
std::vector<int> record_times(const Trajectory& traj, double rho, int s_lo, int s_hi);
// Times s where some big jump lands strictly above X_N(s).
std::vector<int> surpass_times(const Trajectory& traj, double rho, int s_lo, int s_hi);

// T = 1 + max(S_N cap [t4, t1-1]), 0 when the intersection is empty.
int last_record_time(const Trajectory& traj, double rho, int t);

Landmarks landmark_times(const Trajectory& traj, const ConstantSchedule& sched, int t,
                         double rho_probe = 0.0);

PopulationStats population_stats(const Trajectory& traj, int n, double r, double eps);

// T_0 = t2 + ceil(delta ell) - 1, T_n = 1 + inf(S_N cap [T_{n-1}, t1 - ceil(delta ell) - 1]),
// T_n = t1 when empty; the returned list stops at the first t1 entry.
std::vector<int> stopping_times(const Trajectory& traj, const ConstantSchedule& sched, int t,
                                double rho_probe = 0.0);

struct MediumJumpDiagnostics {
    double theta = 0.0;
    double a_hat = 0.0;
    std::vector<JumpRef> medium; // jumps > delta2 * a_hat over [t2, t-1]
};

MediumJumpDiagnostics medium_jump_diagnostics(const Trajectory& traj,
                                              const ConstantSchedule& sched, int t, int n,
                                              double delta1, double delta2,
                                              double rho_probe = 0.0);

EventReport evaluate_events(const Trajectory& traj, const ConstantSchedule& sched, int t,
                            const std::vector<std::int32_t>& sample, int eps_ell,
                            const EventParams& params = {});

std::string event_report_to_json(const EventReport& report);
std::string event_report_table(const EventReport& report);

// zeta_{j,from}(to) for every rank j at once (one backward sweep).
std::vector<std::int32_t> ancestor_ranks(const Trajectory& traj, int from, int to);

} // namespace nbrw
