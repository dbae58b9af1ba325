#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "core/fixtures.hpp"
#include "core/verify.hpp"

using namespace nbrw;

namespace {

Trajectory law_traj(long n, int t, std::uint64_t seed, double alpha = 1.0) {
    EngineConfig cfg;
    cfg.law = TailLaw(TailFamily::pareto, alpha);
    cfg.n = n;
    cfg.t = t;
    cfg.seed = seed;
    return run_direct(cfg);
}

const ImplicationVerdict& find(const std::vector<ImplicationVerdict>& vs, const std::string& n) {
    for (const auto& v : vs)
        if (v.name == n) return v;
    throw std::runtime_error("missing verdict " + n);
}

} // namespace

TEST_CASE("check_basic passes on engine trajectories") {
    for (std::uint64_t seed : {1ull, 5ull, 9ull})
        for (double alpha : {0.7, 1.0, 2.0}) {
            const Trajectory tr = law_traj(16, 20, seed, alpha);
            for (const auto& v : check_basic(tr)) {
                CHECK(v.conclusion == Conclusion::pass);
                CHECK(v.counterexample.empty());
            }
        }
}

TEST_CASE("check_basic flags a decreased position exactly where injected") {
    Trajectory tr = law_traj(16, 20, 2);
    tr.gens[10].positions[4] -= 50.0;
    const auto vs = check_basic(tr);
    const auto& mono = find(vs, "monotonicity");
    CHECK(mono.conclusion == Conclusion::fail);
    CHECK(mono.counterexample.find("(10)") != std::string::npos);
}

TEST_CASE("check_basic flags a second-rightmost violation") {
    Trajectory tr = law_traj(16, 20, 3);
    // Push the leader at time 7 above everything at time 8.
    tr.gens[7].positions[15] = tr.gens[8].positions[15] + 100.0;
    const auto vs = check_basic(tr);
    CHECK(find(vs, "second_rightmost").conclusion == Conclusion::fail);
}

TEST_CASE("check_basic flags a doubling violation on a hand-built trajectory") {
    // 3 particles at/right of 1, then only 4 (< 6) one step later; per-rank
    // monotonicity and the parent bookkeeping stay legal.
    Trajectory tr;
    tr.law = TailLaw(TailFamily::pareto, 1.0);
    tr.scales = make_scales(tr.law, 8);
    tr.initial = {0, 0, 0, 0, 0, 1, 1, 1};
    Generation g0;
    g0.index = 0;
    g0.positions = tr.initial;
    Generation g1;
    g1.index = 1;
    g1.positions = {0, 0, 0, 0, 1, 1, 1, 1};
    g1.parent_rank = {0, 1, 2, 3, 5, 5, 6, 7};
    g1.parent_branch = {1, 1, 1, 1, 1, 2, 1, 1};
    tr.gens = {g0, g1};
    tr.jump_table.assign(16, 0.0);
    const auto vs = check_basic(tr);
    CHECK(find(vs, "descendants_doubling").conclusion == Conclusion::fail);
    CHECK(find(vs, "monotonicity").conclusion == Conclusion::pass);
    CHECK(find(vs, "second_rightmost").conclusion == Conclusion::pass);
    CHECK(find(vs, "path_sum").conclusion == Conclusion::pass);
}

TEST_CASE("check_basic flags a corrupted jump through the path-sum identity") {
    Trajectory tr = law_traj(16, 20, 4);
    const int p = tr.parent_of(8, 11);
    const int b = tr.branch_of(8, 11);
    tr.jump_table[(static_cast<std::size_t>(10) * 16 + (p - 1)) * 2 + (b - 1)] += 7.0;
    const auto vs = check_basic(tr);
    CHECK(find(vs, "path_sum").conclusion == Conclusion::fail);
    CHECK(find(vs, "monotonicity").conclusion == Conclusion::pass);
}

TEST_CASE("support lemmas pass on random engine trajectories") {
    const auto sched = relaxed_schedule(1.0, 1.0);
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const long n = 8 << (seed % 2);
        const int t = 5 * time_scale(n);
        ConstantSchedule s = sched;
        for (double rho_probe : {0.0, 0.3}) {
            EventParams params;
            params.rho_probe = rho_probe;
            const Trajectory tr = law_traj(n, t, seed);
            const auto vs = check_support_lemmas(tr, s, t, params);
            for (const auto& v : vs) CHECK(v.counterexample.empty());
            CHECK(check_prop_B(tr, s, t, params).counterexample.empty());
            CHECK(check_prop_C(tr, s, t, params).counterexample.empty());
        }
    }
}

TEST_CASE("prop B is not-evaluated at desk scale (size condition)") {
    const auto sched = relaxed_schedule(1.0, 1.0);
    const Trajectory tr = law_traj(16, 20, 1);
    const auto v = check_prop_B(tr, sched, 20);
    CHECK_FALSE(v.size_condition_holds);
    CHECK(v.detail.find("min N") != std::string::npos);
}

TEST_CASE("prop C size condition holds at desk scale") {
    const auto sched = relaxed_schedule(1.0, 1.0);
    const Trajectory tr = law_traj(256, 5 * 8, 1);
    const auto v = check_prop_C(tr, sched, 40);
    CHECK(v.size_condition_holds);
}

// Fault injections: each checker must flag a violation of its own conclusion
// while its hypotheses still hold.

namespace {

struct FixtureMaker {
    ConstantSchedule sched = relaxed_schedule(1.0, 1.0);
    long n = 2048;
    int t = 0;
    FixtureResult fx;

    explicit FixtureMaker(FixtureKind kind, long n_ = 2048) : n(n_) {
        t = 5 * time_scale(n);
        fx = build_fixture(kind, sched, n, t, 7);
    }
};

} // namespace

TEST_CASE("fault: lemma_C4 flags a big-jump-free displacement") {
    FixtureMaker m(FixtureKind::noRecord);
    Trajectory tr = m.fx.traj;
    // Raise the leader near the end without touching the jump table: the
    // C4 flag (jump sums) still holds, the positional conclusion breaks.
    tr.gens[static_cast<std::size_t>(m.t - 1)].positions.back() += 2.0 * m.sched.c1 * tr.scales.a;
    tr.gens[static_cast<std::size_t>(m.t)].positions.back() += 2.0 * m.sched.c1 * tr.scales.a;
    const auto vs = check_support_lemmas(tr, m.sched, m.t);
    const auto& v = find(vs, "lemma_C4");
    CHECK(v.hypotheses_hold);
    CHECK_FALSE(v.counterexample.empty());
}

TEST_CASE("fault: lemma_C3C4 flags drift past a big jump's landing") {
    FixtureMaker m(FixtureKind::noRecord);
    Trajectory tr = m.fx.traj;
    // The noRecord fixture has a record at s0 = t3 + 1; its descendants sit
    // near the landing. Push the leader two steps later past landing + c1 a_N.
    const int s0 = m.t - 3 * tr.scales.ell + 1;
    tr.gens[static_cast<std::size_t>(s0 + 2)].positions.back() += 2.0 * m.sched.c1 * tr.scales.a;
    const auto vs = check_support_lemmas(tr, m.sched, m.t);
    const auto& v = find(vs, "lemma_C3C4");
    CHECK(v.hypotheses_hold);
    CHECK_FALSE(v.counterexample.empty());
}

TEST_CASE("fault: lemma_breakRecordGap flags a non-offspring above the rho band") {
    FixtureMaker m(FixtureKind::noRecord);
    Trajectory tr = m.fx.traj;
    const int s0 = m.t - 3 * tr.scales.ell + 1;
    // At s0+1 the record holder leads by ~10 c3 a_N; lift the second particle
    // above X_N(s0) + rho a_N (it is not the jumping offspring).
    auto& pos = tr.gens[static_cast<std::size_t>(s0 + 1)].positions;
    pos[pos.size() - 2] = tr.gens[static_cast<std::size_t>(s0)].positions.back() +
                          2.0 * m.sched.rho * tr.scales.a;
    const auto vs = check_support_lemmas(tr, m.sched, m.t);
    const auto& v = find(vs, "lemma_breakRecordGap");
    CHECK(v.hypotheses_hold);
    CHECK_FALSE(v.counterexample.empty());
}

TEST_CASE("fault: lemma_bigJumpLeftmost flags a phantom big jump from the front") {
    // A hand-built two-cluster state: ranks 1-2 at 0, ranks 3-4 at 1, all
    // jumps zero, children of ranks 1 and 3 only. A big jump planted at the
    // childless rank 4 (far from the leftmost) leaves C3 and C4 intact
    // (no surviving offspring, zero path sums) but breaks the conclusion.
    const auto sched = relaxed_schedule(1.0, 1.0);
    Trajectory tr;
    tr.law = TailLaw(TailFamily::pareto, 1.0);
    tr.scales = make_scales(tr.law, 4);
    tr.initial = {0.0, 0.0, 1.0, 1.0};
    for (int s = 0; s <= 12; ++s) {
        Generation g;
        g.index = s;
        g.positions = tr.initial;
        if (s > 0) {
            g.parent_rank = {0, 0, 2, 2};
            g.parent_branch = {1, 2, 1, 2};
        }
        tr.gens.push_back(std::move(g));
    }
    tr.jump_table.assign(12 * 8, 0.0);
    tr.jump_table[(7 * 4 + 3) * 2 + 0] = 0.5; // (k=4, b=1, s=7), s in [t3, t-1]
    const auto vs = check_support_lemmas(tr, sched, 12);
    const auto& v = find(vs, "lemma_bigJumpLeftmost");
    CHECK(v.hypotheses_hold);
    CHECK_FALSE(v.counterexample.empty());
}

TEST_CASE("fault: cor_gaps flags a beating jump without the promised gap") {
    // Build a wide cloud (gap 2 c4 a_N) and a clean beating jump, then pull
    // the second-rightmost particle up to within (2 c2 - rho) a_N of the
    // leader at the landing time.
    const auto sched = relaxed_schedule(1.0, 1.0);
    FixtureResult fx = build_fixture(FixtureKind::propC_case2a, sched, 2048, 5 * 12, 7);
    Trajectory tr = fx.traj;
    const int s_hat = tr.duration() - 2 * tr.scales.ell + 2;
    auto& pos = tr.gens[static_cast<std::size_t>(s_hat + 1)].positions;
    pos[pos.size() - 2] = pos.back() - 0.5 * sched.rho * tr.scales.a;
    const auto vs = check_support_lemmas(tr, sched, tr.duration());
    const auto& v = find(vs, "cor_gaps");
    CHECK(v.hypotheses_hold);
    CHECK_FALSE(v.counterexample.empty());
    // The same doctored state also violates the stronger gap of cor_gaps2.
    const auto& v2 = find(vs, "cor_gaps2");
    CHECK(v2.hypotheses_hold);
    CHECK_FALSE(v2.counterexample.empty());
}

TEST_CASE("fault: cor_beatingLeader flags a surpass that is not a record") {
    FixtureMaker m(FixtureKind::noRecord);
    Trajectory tr = m.fx.traj;
    const int s0 = m.t - 3 * tr.scales.ell + 1;
    // Phantom big jump from the back at s0+2 whose landing would beat the
    // leader; the actual leader at s0+3 descends from the record holder, so
    // s0+2 joins S_hat but not S. Keep it outside the C2 band by landing
    // more than 2 c2 a_N above the leader.
    const long n = tr.n_particles();
    const double need = (tr.leader(s0 + 2) - tr.position(1, s0 + 2)) +
                        3.0 * m.sched.c3 * tr.scales.a;
    tr.jump_table[(static_cast<std::size_t>(s0 + 2) * n + 0) * 2 + 0] = need;
    const auto vs = check_support_lemmas(tr, m.sched, m.t);
    const auto& v = find(vs, "cor_beatingLeader");
    CHECK(v.hypotheses_hold);
    CHECK_FALSE(v.counterexample.empty());
}

TEST_CASE("fault: lemma_noRecord flags leader drift in a surpass-free stretch") {
    FixtureMaker m(FixtureKind::noRecord);
    Trajectory tr = m.fx.traj;
    const int s0 = m.t - 3 * tr.scales.ell + 1;
    // Drift the leader by more than c1 a_N inside the stretch without any
    // jump in the table.
    for (int s = s0 + 3; s <= m.t; ++s)
        tr.gens[static_cast<std::size_t>(s)].positions.back() += 2.0 * m.sched.c1 * tr.scales.a;
    const auto vs = check_support_lemmas(tr, m.sched, m.t);
    const auto& v = find(vs, "lemma_noRecord");
    CHECK(v.hypotheses_hold);
    CHECK_FALSE(v.counterexample.empty());
}

TEST_CASE("fault: lemma_diam_raN flags a diameter exceeding the window bound") {
    FixtureMaker m(FixtureKind::noRecord);
    Trajectory tr = m.fx.traj;
    // Stretch the diameter at t4 + ell beyond (max jump + c1) a_N by pulling
    // the leftmost particle down.
    const int at = m.t - 4 * tr.scales.ell + tr.scales.ell;
    tr.gens[static_cast<std::size_t>(at)].positions.front() -= 100.0 * m.sched.c3 * tr.scales.a;
    const auto vs = check_support_lemmas(tr, m.sched, m.t);
    const auto& v = find(vs, "lemma_diam_raN");
    CHECK(v.hypotheses_hold);
    CHECK_FALSE(v.counterexample.empty());
}

TEST_CASE("fault: lemma_A, prop B and prop C combiners flag doctored reports") {
    const auto sched = relaxed_schedule(1.0, 1.0);
    const Trajectory tr = law_traj(16, 20, 1);
    EventReport rep = evaluate_events(tr, sched, 20, {1}, 1);
    rep.b1.value = true;
    rep.b2.value = true;
    rep.a3.value = false;
    const auto va = check_lemma_a(rep);
    CHECK(va.hypotheses_hold);
    CHECK(va.conclusion == Conclusion::fail);
    CHECK_FALSE(va.counterexample.empty());

    for (int i = 0; i < 7; ++i) rep.c[i].value = true;
    for (int i = 0; i < 5; ++i) rep.d[i].value = true;
    rep.a1.value = false;
    const auto vb = check_prop_B(tr, sched, 20, rep);
    CHECK(vb.hypotheses_hold);
    CHECK(vb.conclusion == Conclusion::fail);
    // The size condition fails at this N, so the ledger records no formal
    // counterexample; the failing conjunct is still reported.
    CHECK_FALSE(vb.size_condition_holds);
    CHECK(vb.counterexample.empty());
    CHECK(vb.detail.find("A1") != std::string::npos);

    rep.c[0].value = false; // C1 fails while C2..C7 and D1..D5 hold
    const auto vc = check_prop_C(tr, sched, 20, rep);
    CHECK(vc.hypotheses_hold);
    CHECK(vc.size_condition_holds);
    CHECK(vc.conclusion == Conclusion::fail);
    CHECK_FALSE(vc.counterexample.empty());
}

TEST_CASE("rewrite bound checker") {
    RewriteStats stats;
    stats.replicates = 200;
    stats.a2_fail = 200; // freq 1
    stats.a3_fail = 30;
    stats.a4_fail = 180;
    // 2*0.15 + 0.9 + 0.5 >= 1: holds.
    auto v = check_lemma_rewrite_bound(stats, 0.5, 0.5 / 32.0, 4);
    CHECK(v.hypotheses_hold);
    CHECK(v.conclusion == Conclusion::pass);

    stats.a3_fail = 0;
    stats.a4_fail = 0;
    v = check_lemma_rewrite_bound(stats, 0.1, 0.1 / 32.0, 4);
    CHECK(v.conclusion == Conclusion::fail);
    CHECK_FALSE(v.counterexample.empty());

    stats.replicates = 50;
    v = check_lemma_rewrite_bound(stats, 0.5, 0.01, 4);
    CHECK_FALSE(v.hypotheses_hold);
    CHECK(v.conclusion == Conclusion::not_evaluated);

    stats.replicates = 200;
    v = check_lemma_rewrite_bound(stats, 0.5, 0.5, 4); // nu >= eta/M^2
    CHECK_FALSE(v.hypotheses_hold);
}

TEST_CASE("verdict JSON") {
    const auto sched = relaxed_schedule(1.0, 1.0);
    const Trajectory tr = law_traj(16, 20, 1);
    const auto vs = check_basic(tr);
    const auto text = verdicts_to_json(vs);
    CHECK(text.find("monotonicity") != std::string::npos);
    CHECK(text.find("\"counterexample\": \"none\"") != std::string::npos);
    CHECK_FALSE(any_counterexample(vs));
}
