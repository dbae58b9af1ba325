#include "core/verify.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

namespace nbrw {

using nlohmann::json;

std::string to_string(Conclusion c) {
    switch (c) {
    case Conclusion::pass: return "pass";
    case Conclusion::fail: return "fail";
    case Conclusion::not_evaluated: return "not-evaluated";
    }
    return "?";
}

namespace {

double ulp_of(double x) {
    const double ax = std::max(std::abs(x), 1.0);
    return std::nextafter(ax, std::numeric_limits<double>::infinity()) - ax;
}

ImplicationVerdict basic_verdict(const std::string& name) {
    ImplicationVerdict v;
    v.name = name;
    v.hypotheses_hold = true;
    v.size_condition_holds = true;
    v.conclusion = Conclusion::pass;
    return v;
}

void fail_with(ImplicationVerdict& v, const std::string& witness) {
    if (v.conclusion == Conclusion::fail) return; // keep the first counterexample
    v.conclusion = Conclusion::fail;
    v.counterexample = witness;
}

} // namespace

std::vector<ImplicationVerdict> check_basic(const Trajectory& traj) {
    const long n = traj.n_particles();
    const int t = traj.duration();
    std::vector<ImplicationVerdict> out;

    // Monotonicity of every rank.
    {
        auto v = basic_verdict("monotonicity");
        for (int s = 0; s < t && v.conclusion == Conclusion::pass; ++s)
            for (long i = 1; i <= n; ++i)
                if (traj.position(static_cast<int>(i), s + 1) <
                    traj.position(static_cast<int>(i), s)) {
                    std::ostringstream os;
                    os << "X_" << i << "(" << s + 1 << ") < X_" << i << "(" << s << ")";
                    fail_with(v, os.str());
                    break;
                }
        out.push_back(std::move(v));
    }

    // Second-rightmost bound X_N(s-1) <= X_{N-1}(s) (equivalent to the
    // all-j form since positions are sorted).
    {
        auto v = basic_verdict("second_rightmost");
        for (int s = 1; s <= t; ++s) {
            if (traj.leader(s - 1) > traj.gens[s].positions[static_cast<std::size_t>(n - 2)]) {
                std::ostringstream os;
                os << "X_N(" << s - 1 << ") > X_{N-1}(" << s << ")";
                fail_with(v, os.str());
                break;
            }
        }
        out.push_back(std::move(v));
    }

    // Doubling bound for the right-of-x counts, over pooled realized
    // positions (exhaustive for N <= 16, else ~1000 strided thresholds).
    {
        auto v = basic_verdict("descendants_doubling");
        std::vector<double> thresholds;
        for (const auto& g : traj.gens)
            thresholds.insert(thresholds.end(), g.positions.begin(), g.positions.end());
        std::sort(thresholds.begin(), thresholds.end());
        thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
        if (n > 16 && thresholds.size() > 1000) {
            std::vector<double> sampled;
            const double stride = static_cast<double>(thresholds.size()) / 1000.0;
            for (int i = 0; i < 1000; ++i)
                sampled.push_back(thresholds[static_cast<std::size_t>(i * stride)]);
            thresholds = std::move(sampled);
        }
        for (double x : thresholds) {
            std::vector<long> count(static_cast<std::size_t>(t) + 1);
            for (int s = 0; s <= t; ++s) {
                const auto& pos = traj.gens[s].positions;
                count[static_cast<std::size_t>(s)] =
                    pos.end() - std::lower_bound(pos.begin(), pos.end(), x);
            }
            std::vector<long> suffix_min(count);
            for (int s = t - 1; s >= 0; --s)
                suffix_min[static_cast<std::size_t>(s)] =
                    std::min(suffix_min[static_cast<std::size_t>(s)],
                             suffix_min[static_cast<std::size_t>(s + 1)]);
            bool bad = false;
            for (int s = 0; s <= t && !bad; ++s) {
                const long c = count[static_cast<std::size_t>(s)];
                if (c == 0) continue;
                long want = c;
                int k = 0;
                while (s + k < t && want < n) {
                    ++k;
                    want = std::min(static_cast<long>(n), 2 * want);
                    if (count[static_cast<std::size_t>(s + k)] < want) {
                        std::ostringstream os;
                        os << "|G_x(" << s + k << ")| = " << count[static_cast<std::size_t>(s + k)]
                           << " < min(N, 2^" << k << " * " << c << ") at x=" << x;
                        fail_with(v, os.str());
                        bad = true;
                        break;
                    }
                }
                if (!bad && want >= n && s + k < t && suffix_min[static_cast<std::size_t>(s + k)] < n) {
                    std::ostringstream os;
                    os << "|G_x| dropped below N after saturating at x=" << x << ", s=" << s;
                    fail_with(v, os.str());
                    bad = true;
                }
            }
            if (bad) break;
        }
        out.push_back(std::move(v));
    }

    // Path-sum identity, <= 16 ULP per step.
    {
        auto v = basic_verdict("path_sum");
        std::vector<double> recon = traj.gens[0].positions;
        std::vector<double> next(recon.size());
        for (int s = 0; s < t && v.conclusion == Conclusion::pass; ++s) {
            for (long c = 1; c <= n; ++c) {
                const int p = traj.parent_of(static_cast<int>(c), s + 1);
                const int b = traj.branch_of(static_cast<int>(c), s + 1);
                next[static_cast<std::size_t>(c - 1)] =
                    recon[static_cast<std::size_t>(p - 1)] + traj.jump(p, b, s);
                const double stored = traj.position(static_cast<int>(c), s + 1);
                const double tol = 16.0 * (s + 1) * ulp_of(stored);
                if (std::abs(next[static_cast<std::size_t>(c - 1)] - stored) > tol) {
                    std::ostringstream os;
                    os << "path-sum mismatch at (i=" << c << ", n=" << s + 1 << "): "
                       << next[static_cast<std::size_t>(c - 1)] << " vs " << stored;
                    fail_with(v, os.str());
                    break;
                }
            }
            recon = next;
        }
        out.push_back(std::move(v));
    }

    return out;
}

namespace {

struct CheckContext {
    const Trajectory& traj;
    const ConstantSchedule& sched;
    const EventReport& rep;
    int t;
    double a;
    int ell;
    std::set<int> record_set;
    std::set<int> surpass_set;
};

bool all_c(const EventReport& rep, int from, int to) {
    for (int i = from; i <= to; ++i)
        if (!rep.c[i - 1].is_true()) return false;
    return true;
}

bool all_d(const EventReport& rep) {
    for (int i = 0; i < 5; ++i)
        if (!rep.d[i].is_true()) return false;
    return true;
}

ImplicationVerdict lemma_c4(const CheckContext& cx) {
    ImplicationVerdict v;
    v.name = "lemma_C4";
    v.size_condition_holds = true;
    v.hypotheses_hold = cx.rep.c[3].is_true();
    if (!v.hypotheses_hold) return v;
    v.conclusion = Conclusion::pass;

    // start_pos[c] = position of the earliest admissible path start for the
    // current particle: the window start t4, or the first particle after the
    // most recent big jump on the ancestry. Jumps are non-negative, so the
    // displayed inequality over all pairs binds exactly at that start.
    const auto& traj = cx.traj;
    const long n = traj.n_particles();
    std::vector<double> start(traj.gens[static_cast<std::size_t>(cx.rep.t4)].positions);
    std::vector<double> next(start.size());
    for (int s = cx.rep.t4; s < cx.t; ++s) {
        for (long c = 1; c <= n; ++c) {
            const int p = traj.parent_of(static_cast<int>(c), s + 1);
            const int b = traj.branch_of(static_cast<int>(c), s + 1);
            const double x = traj.jump(p, b, s);
            const double child_pos = traj.position(static_cast<int>(c), s + 1);
            if (x > cx.rep.big_threshold)
                next[static_cast<std::size_t>(c - 1)] = child_pos; // path restarts after a big jump
            else
                next[static_cast<std::size_t>(c - 1)] = start[static_cast<std::size_t>(p - 1)];
            if (child_pos > next[static_cast<std::size_t>(c - 1)] + cx.sched.c1 * cx.a) {
                std::ostringstream os;
                os << "big-jump-free path into (i=" << c << ", n=" << s + 1 << ") moved "
                   << child_pos - next[static_cast<std::size_t>(c - 1)] << " > c1 a_N";
                fail_with(v, os.str());
            }
        }
        start = next;
    }
    return v;
}

ImplicationVerdict lemma_c3c4(const CheckContext& cx) {
    ImplicationVerdict v;
    v.name = "lemma_C3C4";
    v.size_condition_holds = true;
    v.hypotheses_hold = cx.rep.c[2].is_true() && cx.rep.c[3].is_true();
    if (!v.hypotheses_hold) return v;
    v.conclusion = Conclusion::pass;

    // Track, per particle, the most recent big jump on its ancestry (time and
    // landing value X_{k1}(s1) + X_{k1,b1,s1}); compare descendants within
    // ell steps.
    const auto& traj = cx.traj;
    const long n = traj.n_particles();
    constexpr int kNever = -(1 << 28);
    std::vector<int> big_time(static_cast<std::size_t>(n), kNever);
    std::vector<double> big_land(static_cast<std::size_t>(n), 0.0);
    std::vector<int> big_time_next(big_time);
    std::vector<double> big_land_next(big_land);
    for (int s = cx.rep.t4; s < cx.t; ++s) {
        for (long c = 1; c <= n; ++c) {
            const int p = traj.parent_of(static_cast<int>(c), s + 1);
            const int b = traj.branch_of(static_cast<int>(c), s + 1);
            const double x = traj.jump(p, b, s);
            if (x > cx.rep.big_threshold) {
                big_time_next[static_cast<std::size_t>(c - 1)] = s;
                big_land_next[static_cast<std::size_t>(c - 1)] =
                    traj.position(p, s) + x;
            } else {
                big_time_next[static_cast<std::size_t>(c - 1)] =
                    big_time[static_cast<std::size_t>(p - 1)];
                big_land_next[static_cast<std::size_t>(c - 1)] =
                    big_land[static_cast<std::size_t>(p - 1)];
            }
            const int bt = big_time_next[static_cast<std::size_t>(c - 1)];
            if (bt != kNever && (s + 1) - bt <= cx.ell) {
                const double bound = big_land_next[static_cast<std::size_t>(c - 1)] +
                                     cx.sched.c1 * cx.a;
                if (traj.position(static_cast<int>(c), s + 1) > bound) {
                    std::ostringstream os;
                    os << "descendant (i=" << c << ", n=" << s + 1
                       << ") moved past the landing of the big jump at s=" << bt << " by more than c1 a_N";
                    fail_with(v, os.str());
                }
            }
        }
        big_time = big_time_next;
        big_land = big_land_next;
    }
    return v;
}

ImplicationVerdict lemma_break_record_gap(const CheckContext& cx) {
    ImplicationVerdict v;
    v.name = "lemma_breakRecordGap";
    v.size_condition_holds = true;
    v.hypotheses_hold = cx.rep.c[4].is_true();
    if (!v.hypotheses_hold) return v;
    v.conclusion = Conclusion::pass;

    const auto& traj = cx.traj;
    const long n = traj.n_particles();
    for (const auto& bj : cx.rep.big_jump_set) {
        const int s = bj.time;
        const double leader_s = traj.leader(s);
        const double landing = traj.position(bj.rank, s) + bj.value;
        // (a): everything not descending from the jumping offspring stays
        // within rho a_N of the old leader.
        for (long j = 1; j <= n; ++j) {
            const int p = traj.parent_of(static_cast<int>(j), s + 1);
            const int b = traj.branch_of(static_cast<int>(j), s + 1);
            if (p == bj.rank && b == bj.branch) continue;
            if (traj.position(static_cast<int>(j), s + 1) > leader_s + cx.sched.rho * cx.a) {
                std::ostringstream os;
                os << "non-offspring rank " << j << " above X_N(" << s << ") + rho a_N at s+1="
                   << s + 1;
                fail_with(v, os.str());
            }
        }
        // (b): a big jump beating the leader by more than rho a_N takes the
        // lead and creates the corresponding gap.
        if (landing > leader_s + cx.sched.rho * cx.a) {
            const int pn = traj.parent_of(static_cast<int>(n), s + 1);
            const int bn = traj.branch_of(static_cast<int>(n), s + 1);
            if (pn != bj.rank || bn != bj.branch) {
                std::ostringstream os;
                os << "leader at " << s + 1 << " is not the big jumper from s=" << s;
                fail_with(v, os.str());
            } else {
                const double gap = traj.leader(s + 1) -
                                   traj.gens[static_cast<std::size_t>(s + 1)]
                                       .positions[static_cast<std::size_t>(n - 2)];
                if (!(gap > (landing - leader_s) - cx.sched.rho * cx.a)) {
                    std::ostringstream os;
                    os << "gap behind new leader at " << s + 1 << " is " << gap
                       << ", needed > (c - rho) a_N = " << (landing - leader_s) - cx.sched.rho * cx.a;
                    fail_with(v, os.str());
                }
            }
        }
    }
    return v;
}

ImplicationVerdict lemma_big_jump_leftmost(const CheckContext& cx) {
    ImplicationVerdict v;
    v.name = "lemma_bigJumpLeftmost";
    v.size_condition_holds = true;
    v.hypotheses_hold = cx.rep.c[2].is_true() && cx.rep.c[3].is_true();
    if (!v.hypotheses_hold) return v;
    v.conclusion = Conclusion::pass;
    for (const auto& bj : cx.rep.big_jump_set) {
        if (bj.time < cx.rep.t3) continue;
        const double x1 = cx.traj.leftmost(bj.time);
        if (cx.traj.position(bj.rank, bj.time) > x1 + cx.sched.c1 * cx.a) {
            std::ostringstream os;
            os << "big jumper (k=" << bj.rank << ", s=" << bj.time
               << ") sits more than c1 a_N above the leftmost particle";
            fail_with(v, os.str());
        }
    }
    return v;
}

ImplicationVerdict cor_gaps(const CheckContext& cx) {
    ImplicationVerdict v;
    v.name = "cor_gaps";
    v.size_condition_holds = true;
    v.hypotheses_hold = all_c(cx.rep, 2, 5);
    if (!v.hypotheses_hold) return v;
    v.conclusion = Conclusion::pass;
    const auto& traj = cx.traj;
    const long n = traj.n_particles();
    for (const auto& bj : cx.rep.big_jump_set) {
        const int s = bj.time;
        if (s < cx.rep.t3) continue;
        if (!(traj.diameter(s) >= (cx.sched.c3 + cx.sched.c1) * cx.a)) continue;
        const double z = traj.leader(s) - traj.position(bj.rank, s);
        const double landing = traj.position(bj.rank, s) + bj.value;
        if (bj.value > z) {
            const double second = traj.gens[static_cast<std::size_t>(s + 1)]
                                      .positions[static_cast<std::size_t>(n - 2)];
            if (!(traj.leader(s + 1) == landing &&
                  landing > second + (2.0 * cx.sched.c2 - cx.sched.rho) * cx.a)) {
                std::ostringstream os;
                os << "part (a) fails for big jump at s=" << s << " (k=" << bj.rank << ")";
                fail_with(v, os.str());
            }
        } else {
            if (!(landing <= traj.leader(s) - 2.0 * cx.sched.c2 * cx.a)) {
                std::ostringstream os;
                os << "part (b) fails for big jump at s=" << s << " (k=" << bj.rank << ")";
                fail_with(v, os.str());
            }
        }
    }
    return v;
}

ImplicationVerdict cor_gaps2(const CheckContext& cx) {
    ImplicationVerdict v;
    v.name = "cor_gaps2";
    v.size_condition_holds = true;
    v.hypotheses_hold = cx.rep.d[0].is_true() && all_c(cx.rep, 3, 5);
    if (!v.hypotheses_hold) return v;
    v.conclusion = Conclusion::pass;
    const auto& traj = cx.traj;
    const long n = traj.n_particles();
    for (const auto& bj : cx.rep.big_jump_set) {
        const int s = bj.time;
        if (s < cx.rep.t3) continue;
        if (!(traj.diameter(s) >= (cx.sched.c4 + cx.sched.c1) * cx.a)) continue;
        const double z = traj.leader(s) - traj.position(bj.rank, s);
        if (!(bj.value > z)) continue;
        const double landing = traj.position(bj.rank, s) + bj.value;
        const double second = traj.gens[static_cast<std::size_t>(s + 1)]
                                  .positions[static_cast<std::size_t>(n - 2)];
        if (!(traj.leader(s + 1) == landing &&
              landing > second + (3.0 * cx.sched.c3 - cx.sched.rho) * cx.a)) {
            std::ostringstream os;
            os << "fails for big jump at s=" << s << " (k=" << bj.rank << ")";
            fail_with(v, os.str());
        }
    }
    return v;
}

ImplicationVerdict cor_beating_leader(const CheckContext& cx) {
    ImplicationVerdict v;
    v.name = "cor_beatingLeader";
    v.size_condition_holds = true;
    v.hypotheses_hold = all_c(cx.rep, 2, 5);
    if (!v.hypotheses_hold) return v;
    v.conclusion = Conclusion::pass;
    for (int s = cx.rep.t3 + 1; s <= cx.t - 1; ++s) {
        if (!(cx.traj.diameter(s) >= 1.5 * cx.sched.c3 * cx.a)) continue;
        const bool in_s = cx.record_set.count(s) > 0;
        const bool in_hat = cx.surpass_set.count(s) > 0;
        const bool in_s_prev = cx.record_set.count(s - 1) > 0;
        const bool in_hat_prev = cx.surpass_set.count(s - 1) > 0;
        if (in_s != in_hat || (s - 1 >= cx.rep.t4 && in_s_prev != in_hat_prev)) {
            std::ostringstream os;
            os << "S_N and S_hat_N disagree at s=" << s << " or s-1 (d >= 3/2 c3 a_N)";
            fail_with(v, os.str());
        }
    }
    return v;
}

ImplicationVerdict lemma_no_record(const CheckContext& cx) {
    ImplicationVerdict v;
    v.name = "lemma_noRecord";
    v.size_condition_holds = true;
    v.hypotheses_hold = all_c(cx.rep, 2, 5);
    if (!v.hypotheses_hold) return v;
    v.conclusion = Conclusion::pass;
    const auto& traj = cx.traj;
    const int t1 = cx.rep.t1;
    for (int s = cx.rep.t3; s <= t1 - 1; ++s) {
        bool record_free = true;
        bool all_wide = true;
        bool some_narrow = false;
        for (int ds = 1; ds <= cx.ell && s + ds <= t1; ++ds) {
            const int r = s + ds - 1;
            if (cx.surpass_set.count(r)) record_free = false;
            if (!record_free) break;
            if (!(traj.diameter(r) >= 1.5 * cx.sched.c3 * cx.a)) all_wide = false;
            if (traj.diameter(r) <= 1.5 * cx.sched.c3 * cx.a) some_narrow = true;
            if (all_wide) {
                if (!(traj.leader(s + ds) <= traj.leader(s) + cx.sched.c1 * cx.a)) {
                    std::ostringstream os;
                    os << "(a) leader drift from s=" << s << " to " << s + ds << " exceeds c1 a_N";
                    fail_with(v, os.str());
                }
                if (ds == cx.ell && !(traj.diameter(s + ds) <= cx.sched.c1 * cx.a)) {
                    std::ostringstream os;
                    os << "(a) diameter at s+ell=" << s + ds << " exceeds c1 a_N";
                    fail_with(v, os.str());
                }
            }
            if (some_narrow &&
                !(traj.diameter(s + ds) <= 1.5 * cx.sched.c3 * cx.a + 2.0 * cx.sched.c1 * cx.a)) {
                std::ostringstream os;
                os << "(b) diameter at " << s + ds << " exceeds 3/2 c3 a_N + 2 c1 a_N";
                fail_with(v, os.str());
            }
        }
    }
    return v;
}

ImplicationVerdict lemma_diam_ran(const CheckContext& cx) {
    ImplicationVerdict v;
    v.name = "lemma_diam_raN";
    v.size_condition_holds = true;
    v.hypotheses_hold = cx.rep.c[2].is_true() && cx.rep.c[3].is_true();
    if (!v.hypotheses_hold) return v;
    v.conclusion = Conclusion::pass;
    const auto& traj = cx.traj;
    const long n = traj.n_particles();
    for (int s0 = cx.rep.t4; s0 <= cx.rep.t1 && s0 + cx.ell <= cx.t; ++s0) {
        double max_jump = 0.0;
        for (int s = s0; s < s0 + cx.ell; ++s)
            for (long k = 1; k <= n; ++k)
                for (int b = 1; b <= 2; ++b)
                    max_jump = std::max(max_jump, traj.jump(static_cast<int>(k), b, s));
        const double r0 = max_jump / cx.a;
        if (!(traj.diameter(s0 + cx.ell) <= (r0 + cx.sched.c1) * cx.a)) {
            std::ostringstream os;
            os << "d(X(" << s0 + cx.ell << ")) > (r0 + c1) a_N with r0 a_N = window max jump "
               << max_jump;
            fail_with(v, os.str());
        }
    }
    return v;
}

CheckContext make_context(const Trajectory& traj, const ConstantSchedule& sched, int t,
                          const EventReport& rep) {
    CheckContext cx{traj, sched, rep, t, traj.scales.a, traj.scales.ell, {}, {}};
    cx.record_set.insert(rep.record_set.begin(), rep.record_set.end());
    cx.surpass_set.insert(rep.surpass_set.begin(), rep.surpass_set.end());
    return cx;
}

} // namespace

ImplicationVerdict check_prop_B(const Trajectory& traj, const ConstantSchedule& sched, int t,
                                const EventParams& params) {
    return check_prop_B(traj, sched, t,
                        evaluate_events(traj, sched, t, {1}, traj.scales.eps_ell, params));
}

ImplicationVerdict check_prop_B(const Trajectory& traj, const ConstantSchedule& sched, int t,
                                const EventReport& rep) {
    ImplicationVerdict v;
    v.name = "prop_B";
    v.hypotheses_hold = all_c(rep, 1, 7);
    const double n = static_cast<double>(traj.n_particles());
    v.size_condition_holds =
        2.0 * sched.K * std::pow(n, -sched.delta) < std::pow(n, -sched.gamma) &&
        std::pow(n, -sched.gamma) < 1.0;
    {
        std::ostringstream os;
        os << "min N for the size condition: " << prop_b_min_n(sched);
        v.detail = os.str();
    }
    if (!v.hypotheses_hold) return v;
    const bool diam_ok = traj.diameter(rep.t1) >= 1.5 * sched.c3 * traj.scales.a;
    const bool concl = rep.b1.is_true() && rep.b2.is_true() && rep.a1.is_true() && diam_ok;
    v.conclusion = concl ? Conclusion::pass : Conclusion::fail;
    if (!concl) {
        std::string why = "C1..C7 hold but:";
        if (!rep.b1.is_true()) why += " B1(" + rep.b1.witness + ")";
        if (!rep.b2.is_true()) why += " B2(" + rep.b2.witness + ")";
        if (!rep.a1.is_true()) why += " A1(" + rep.a1.witness + ")";
        if (!diam_ok) why += " d(X(t1)) < 3/2 c3 a_N";
        if (v.size_condition_holds) v.counterexample = why;
        v.detail += "; " + why;
    }
    return v;
}

ImplicationVerdict check_prop_C(const Trajectory& traj, const ConstantSchedule& sched, int t,
                                const EventParams& params) {
    return check_prop_C(traj, sched, t,
                        evaluate_events(traj, sched, t, {1}, traj.scales.eps_ell, params));
}

ImplicationVerdict check_prop_C(const Trajectory& traj, const ConstantSchedule& sched, int t,
                                const EventReport& rep) {
    ImplicationVerdict v;
    v.name = "prop_C";
    v.hypotheses_hold = all_c(rep, 2, 7) && all_d(rep);
    const int ell = traj.scales.ell;
    v.size_condition_holds =
        ell - static_cast<int>(std::ceil(sched.c5 * ell)) >= (ell + 1) / 2;
    if (!v.hypotheses_hold) return v;
    v.conclusion = rep.c[0].is_true() ? Conclusion::pass : Conclusion::fail;
    if (v.conclusion == Conclusion::fail) {
        const std::string why = "C2..C7 and D1..D5 hold but C1 fails: " + rep.c[0].witness;
        if (v.size_condition_holds) v.counterexample = why;
        v.detail = why;
    }
    return v;
}

ImplicationVerdict check_lemma_a(const EventReport& rep) {
    ImplicationVerdict v;
    v.name = "lemma_A";
    v.size_condition_holds = true;
    v.hypotheses_hold = rep.b1.is_true() && rep.b2.is_true();
    if (!v.hypotheses_hold) return v;
    v.conclusion = rep.a3.is_true() ? Conclusion::pass : Conclusion::fail;
    if (v.conclusion == Conclusion::fail)
        v.counterexample = "B1 and B2 hold but A3 fails: " + rep.a3.witness;
    return v;
}

std::vector<ImplicationVerdict> check_support_lemmas(const Trajectory& traj,
                                                     const ConstantSchedule& sched, int t,
                                                     const EventParams& params) {
    const EventReport rep =
        evaluate_events(traj, sched, t, {1}, traj.scales.eps_ell, params);
    const CheckContext cx = make_context(traj, sched, t, rep);
    std::vector<ImplicationVerdict> out;
    out.push_back(lemma_c4(cx));
    out.push_back(lemma_c3c4(cx));
    out.push_back(lemma_break_record_gap(cx));
    out.push_back(lemma_big_jump_leftmost(cx));
    out.push_back(cor_gaps(cx));
    out.push_back(cor_gaps2(cx));
    out.push_back(cor_beating_leader(cx));
    out.push_back(lemma_no_record(cx));
    out.push_back(lemma_diam_ran(cx));
    out.push_back(check_lemma_a(rep));
    return out;
}

ImplicationVerdict check_lemma_rewrite_bound(const RewriteStats& stats, double eta, double nu,
                                             double m_sample) {
    ImplicationVerdict v;
    v.name = "lemma_rewrite_bound";
    v.size_condition_holds = true;
    if (stats.replicates < 100) {
        v.hypotheses_hold = false;
        v.detail = "needs >= 100 replicates";
        return v;
    }
    if (!(nu > 0.0 && nu < eta / (m_sample * m_sample))) {
        v.hypotheses_hold = false;
        v.detail = "needs 0 < nu < eta / M^2";
        return v;
    }
    v.hypotheses_hold = true;
    const double r = static_cast<double>(stats.replicates);
    const double p2 = static_cast<double>(stats.a2_fail) / r;
    const double p3 = static_cast<double>(stats.a3_fail) / r;
    const double p4 = static_cast<double>(stats.a4_fail) / r;
    auto se = [&](double p) { return std::sqrt(std::max(p * (1.0 - p), 1.0 / r) / r); };
    const double combined = std::sqrt(se(p2) * se(p2) + 4.0 * se(p3) * se(p3) + se(p4) * se(p4));
    const double rhs = 2.0 * p3 + p4 + eta + 3.0 * combined;
    v.conclusion = p2 <= rhs ? Conclusion::pass : Conclusion::fail;
    std::ostringstream os;
    os << "freq(A2^c)=" << p2 << " vs 2*" << p3 << " + " << p4 << " + " << eta << " + 3*"
       << combined;
    v.detail = os.str();
    if (v.conclusion == Conclusion::fail) v.counterexample = v.detail;
    return v;
}

std::string verdicts_to_json(const std::vector<ImplicationVerdict>& verdicts) {
    json arr = json::array();
    for (const auto& v : verdicts) {
        arr.push_back(json{{"name", v.name},
                           {"hypotheses_hold", v.hypotheses_hold},
                           {"size_condition_holds", v.size_condition_holds},
                           {"conclusion", to_string(v.conclusion)},
                           {"counterexample", v.counterexample.empty() ? json("none")
                                                                       : json(v.counterexample)},
                           {"detail", v.detail}});
    }
    return arr.dump(2);
}

bool any_counterexample(const std::vector<ImplicationVerdict>& verdicts) {
    for (const auto& v : verdicts)
        if (!v.counterexample.empty()) return true;
    return false;
}

} // namespace nbrw
