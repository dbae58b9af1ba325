#include "core/fixtures.hpp"

#include <cmath>
#include <sstream>

namespace nbrw {

FixtureKind fixture_kind_from_string(const std::string& name) {
    if (name == "propC_case1") return FixtureKind::propC_case1;
    if (name == "propC_case2a") return FixtureKind::propC_case2a;
    if (name == "G_event") return FixtureKind::G_event;
    if (name == "star") return FixtureKind::star;
    if (name == "big-jump-leftmost" || name == "big_jump_leftmost")
        return FixtureKind::big_jump_leftmost;
    if (name == "noRecord") return FixtureKind::noRecord;
    throw domain_error("unknown fixture kind: " + name);
}

std::string to_string(FixtureKind kind) {
    switch (kind) {
    case FixtureKind::propC_case1: return "propC_case1";
    case FixtureKind::propC_case2a: return "propC_case2a";
    case FixtureKind::G_event: return "G_event";
    case FixtureKind::star: return "star";
    case FixtureKind::big_jump_leftmost: return "big-jump-leftmost";
    case FixtureKind::noRecord: return "noRecord";
    }
    return "?";
}

double prop_c_min_full_n(const ConstantSchedule& sched) {
    for (int ell = 2; ell <= 400; ++ell) {
        const int dead = static_cast<int>(std::ceil(sched.delta * ell));
        const bool d2_c6 = static_cast<int>(std::floor(sched.c5 * ell)) >= dead + 1;
        const bool paper = ell - static_cast<int>(std::ceil(sched.c5 * ell)) >= (ell + 1) / 2;
        if (d2_c6 && paper) return std::ldexp(1.0, ell - 1) + 1.0;
    }
    return std::numeric_limits<double>::infinity();
}

namespace {

struct Builder {
    const ConstantSchedule& sched;
    long n;
    int t;
    std::uint64_t seed;
    Scales scales;
    TableJumpSource source;
    Trajectory traj;

    Builder(const ConstantSchedule& s, long n_, int t_, std::uint64_t seed_, const TailLaw& law)
        : sched(s), n(n_), t(t_), seed(seed_), scales(make_scales(law, n_)),
          source(base_max(s, make_scales(law, n_)), seed_) {
        rerun(law);
    }

    static double base_max(const ConstantSchedule& s, const Scales& sc) {
        // Base jumps must never register as big and their path sums over the
        // whole window must stay far below c1 a_N.
        return 0.5 * std::min(s.rho * sc.a, s.c1 * sc.a / (16.0 * 4.0 * sc.ell));
    }

    void rerun(const TailLaw& law) {
        EngineConfig cfg;
        cfg.law = law;
        cfg.n = n;
        cfg.t = t;
        cfg.seed = seed;
        cfg.keep_labels = true;
        cfg.source = &source;
        traj = run_direct(cfg);
    }

    // Injects `value` as the branch-1 jump of the particle at `rank` and time
    // `s`, then replays. The prefix [0, s] is unchanged by determinism, so
    // later injections can be chosen from the updated world.
    void inject(int s, int rank, double value) {
        const Label& who = traj.gens[static_cast<std::size_t>(s)].labels[static_cast<std::size_t>(rank - 1)];
        source.set_override(who.lineage, who.path.child(s, 1), s + 1, value);
        rerun(traj.law);
    }

    int t1() const { return t - scales.ell; }
    int t2() const { return t - 2 * scales.ell; }
    int t3() const { return t - 3 * scales.ell; }
    int t4() const { return t - 4 * scales.ell; }
};

void require(bool cond, FixtureKind kind, const std::string& what) {
    if (!cond)
        throw domain_error("fixture " + to_string(kind) + " infeasible: " + what);
}

void note_chain(FixtureResult& res, const EventReport& rep) {
    static const char* cn[] = {"C1", "C2", "C3", "C4", "C5", "C6", "C7"};
    static const char* dn[] = {"D1", "D2", "D3", "D4", "D5"};
    for (int i = 0; i < 7; ++i)
        (rep.c[i].is_true() ? res.satisfied : res.missing).push_back(cn[i]);
    for (int i = 0; i < 5; ++i)
        (rep.d[i].is_true() ? res.satisfied : res.missing).push_back(dn[i]);
}

// Draws samples with varying sub-seeds until `accept` passes; the sampling
// stream is independent of the jump stream, so the trajectory is untouched.
template <typename Accept>
CoalescenceProfile sample_until(const Trajectory& traj, int t, int m, std::uint64_t seed,
                                Accept&& accept, FixtureKind kind, const std::string& what) {
    for (std::uint64_t trial = 0; trial < 4096; ++trial) {
        const auto sample = sample_uniform(traj, t, m, seed + trial * 0x9E37u);
        auto prof = coalescence_profile(traj, sample, t);
        if (accept(prof)) return prof;
    }
    throw domain_error("fixture " + to_string(kind) + " infeasible: " + what);
}

} // namespace

FixtureResult build_fixture(FixtureKind kind, const ConstantSchedule& sched, long n, int t,
                            std::uint64_t seed) {
    TailLaw law(TailFamily::pareto, sched.alpha);
    Scales sc = make_scales(law, n);
    const int ell = sc.ell;
    if (t <= 4 * ell) throw domain_error("fixture needs t > 4*ell_N");
    if (ell < 4) throw domain_error("fixture needs ell >= 4 (N >= 9)");

    Builder b(sched, n, t, seed, law);
    const double a = b.scales.a;
    FixtureResult res;
    res.t = t;
    res.min_full_hypothesis_n = prop_c_min_full_n(sched);

    EventParams params; // schedule rho; fixture jumps are engineered around it

    switch (kind) {
    case FixtureKind::propC_case1: {
        // Record at s0 = t2 - 3 opens a 5 c4 a_N gap; it collapses at
        // s0 + ell = t1 - 3 (= tau2), and the first > 2 c4 a_N jump after tau2
        // lands at s* = tau2 + 1, clearing the D5 band.
        require(std::floor(sched.c5 * ell) >= 1.0, kind,
                "needs c5 * ell >= 1 (use larger N or c5)");
        const int s0 = b.t2() - 3;
        require(s0 > b.t4(), kind, "t too small for the pre-t2 record");
        const double v0 = 5.0 * sched.c4 * a + b.traj.diameter(s0);
        b.inject(s0, 1, v0);
        const int tau2 = s0 + ell; // collapse time
        const int s_star = tau2 + 1;
        require(s_star <= t - 1 && s_star < b.t1() - 1, kind, "s* does not fit below t1");
        b.inject(s_star, 1, 3.0 * sched.c4 * a + b.traj.diameter(s_star));
        res.report = evaluate_events(b.traj, sched, t, {1}, b.scales.eps_ell, params);
        require(res.report.landmarks.tau2 && *res.report.landmarks.tau2 >= b.t2() &&
                    *res.report.landmarks.tau2 <= static_cast<int>(t - ell - std::ceil(sched.c5 * ell)),
                kind, "tau2 did not land in [t2, t1 - c5 ell]");
        require(res.report.c[0].is_true(), kind, "conclusion C1 did not realise");
        for (const char* name : {"tau2 in [t2, t1 - c5 ell]", "jump > 2 c4 a_N within c5 ell of tau2"})
            res.satisfied.push_back(name);
        break;
    }
    case FixtureKind::propC_case2a: {
        // A 3 c6 a_N spread opens before the D4 look-back window, and a
        // leader-beating jump at t2 + 2 keeps the diameter above 3/2 c4 a_N
        // through t1 - c5 ell while realising D3 and the C1 conclusion.
        const int look = static_cast<int>(std::ceil(sched.c5 * ell));
        const int s0 = b.t2() - look - 2;
        require(s0 > b.t4(), kind, "t too small for the pre-window spread");
        b.inject(s0, 1, 3.0 * sched.c6 * a + b.traj.diameter(s0));
        const int s_hat = b.t2() + 2;
        require(s_hat <= b.t2() + (ell + 1) / 2, kind, "ell too small for the D3 window");
        {
            const double z = b.traj.leader(s_hat) - b.traj.position(1, s_hat);
            b.inject(s_hat, 1, z + 2.0 * sched.c4 * a);
        }
        res.report = evaluate_events(b.traj, sched, t, {1}, b.scales.eps_ell, params);
        require(res.report.d[2].is_true(), kind, "D3 did not realise");
        bool surpass_in_window = false;
        const int w_hi = static_cast<int>(std::floor(b.t1() - sched.c5 * ell));
        for (int s : res.report.surpass_set)
            if (s >= b.t2() && s <= w_hi) surpass_in_window = true;
        require(surpass_in_window, kind, "no surpass time inside [t2, t1 - c5 ell]");
        require(!res.report.landmarks.tau2 || *res.report.landmarks.tau2 > w_hi, kind,
                "diameter dipped below 3/2 c4 a_N too early for case 2(a)");
        require(res.report.c[0].is_true(), kind, "conclusion C1 did not realise");
        res.satisfied.push_back("record broken inside [t2, t1 - c5 ell] at large diameter");
        break;
    }
    case FixtureKind::G_event: {
        const int w_lo = b.t2() + static_cast<int>(std::ceil(params.s1 * ell));
        const int w_hi = b.t2() + static_cast<int>(std::ceil(params.s2 * ell)) - 1;
        require(w_lo <= w_hi, kind, "empty A2' window");
        const int s_g = (w_lo + w_hi) / 2;
        b.inject(s_g, 1, (params.r_g + 3.5) * a);
        res.report = evaluate_events(b.traj, sched, t, {1}, b.scales.eps_ell, params);
        require(res.report.g.is_true(), kind, "G did not realise");
        require(res.report.T == s_g + 1, kind, "the B_N' jump did not set T");
        require(b.traj.diameter(b.t1()) >= params.r_g * a, kind, "d(X(t1)) < r a_N");
        // Two sampled lineages must meet the leader at T and split immediately.
        const int T = res.report.T;
        res.profile = sample_until(
            b.traj, t, 2, seed,
            [&](const CoalescenceProfile& p) {
                return p.mrca_time && *p.mrca_time >= T &&
                       ancestor_index(b.traj, p.sample[0], t, T) == n &&
                       ancestor_index(b.traj, p.sample[1], t, T) == n &&
                       ancestor_index(b.traj, p.sample[0], t, T + b.scales.eps_ell) !=
                           ancestor_index(b.traj, p.sample[1], t, T + b.scales.eps_ell);
            },
            kind, "no sample with distinct ancestors at T + eps ell");
        res.satisfied.push_back("G with unique B_N' jump");
        res.satisfied.push_back("T = s* + 1 and d(X(t1)) >= r a_N");
        break;
    }
    case FixtureKind::star: {
        const int T = b.t2() + ell / 2;
        b.inject(T - 1, 1, 20.0 * sched.c6 * a + b.traj.diameter(T - 1));
        res.report = evaluate_events(b.traj, sched, t, {1}, b.scales.eps_ell, params);
        require(res.report.T == T, kind, "injected jump is not the last record");
        const int m = 4;
        res.profile = sample_until(
            b.traj, t, m, seed,
            [&](const CoalescenceProfile& p) {
                if (!p.mrca_time || *p.mrca_time != T) return false;
                if (!p.mrca_rank || *p.mrca_rank != n) return false;
                for (int i = 0; i < m; ++i)
                    if (ancestor_index(b.traj, p.sample[static_cast<std::size_t>(i)], t, T) != n)
                        return false;
                return p.star_spread && *p.star_spread <= b.scales.eps_ell;
            },
            kind, "no 4-sample with star spread <= eps ell through (N, T)");
        res.satisfied.push_back("all sampled lineages pass through (N, T)");
        res.satisfied.push_back("star_spread <= eps_N ell_N");
        break;
    }
    case FixtureKind::big_jump_leftmost: {
        // Open a 5 c3 a_N gap, then launch a big jump from the leftmost
        // particle while the diameter is still far above c1 a_N.
        const int s0 = b.t3() + 1;
        const int s_star = s0 + 2;
        require(s_star + 1 < b.t2() - static_cast<int>(std::ceil(sched.c5 * ell)), kind,
                "ell too small to keep the jumps clear of the D4 window");
        b.inject(s0, 1, 5.0 * sched.c3 * a + b.traj.diameter(s0));
        b.inject(s_star, 1, 4.0 * sched.rho * a);
        res.report = evaluate_events(b.traj, sched, t, {1}, b.scales.eps_ell, params);
        require(b.traj.diameter(s_star) > sched.c1 * a, kind,
                "diameter at s* collapsed below c1 a_N");
        bool found = false;
        for (const auto& bj : res.report.big_jump_set)
            if (bj.time == s_star) found = true;
        require(found, kind, "the back-of-the-pack jump did not register as big");
        res.satisfied.push_back("big jump from the back at diameter > c1 a_N");
        break;
    }
    case FixtureKind::noRecord: {
        // One record at s0 holds the diameter above (3/2) c3 a_N for the next
        // ell - 1 steps; a non-record big jump sits inside the stretch, which
        // then collapses.
        const int s0 = b.t3() + 1;
        b.inject(s0, 1, 10.0 * sched.c3 * a + b.traj.diameter(s0));
        const int s1 = s0 + 2;
        b.inject(s1, 1, 2.0 * sched.rho * a); // big, lands far below the leader
        res.report = evaluate_events(b.traj, sched, t, {1}, b.scales.eps_ell, params);
        bool s1_big = false;
        for (const auto& bj : res.report.big_jump_set)
            if (bj.time == s1) s1_big = true;
        require(s1_big, kind, "interior big jump did not register");
        bool stretch_clear = true;
        for (int s : res.report.surpass_set)
            if (s > s0 && s <= s0 + ell) stretch_clear = false;
        require(stretch_clear, kind, "the stretch after s0 is not surpass-free");
        for (int r = s0 + 1; r < s0 + ell; ++r)
            require(b.traj.diameter(r) >= 1.5 * sched.c3 * a, kind,
                    "diameter dipped early inside the stretch");
        require(b.traj.diameter(s0 + 1 + ell) <= sched.c1 * a, kind,
                "diameter did not collapse after the stretch");
        res.satisfied.push_back("surpass-free stretch of length ell-1 at diameter >= 3/2 c3 a_N");
        res.satisfied.push_back("non-record big jump inside the stretch");
        res.satisfied.push_back("collapse to <= c1 a_N after the stretch");
        break;
    }
    }

    res.traj = std::move(b.traj);
    note_chain(res, res.report);
    std::ostringstream os;
    os << "full Prop C hypothesis set needs N >= " << res.min_full_hypothesis_n
       << " with this schedule";
    res.note = os.str();
    return res;
}

} // namespace nbrw
