#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "core/events.hpp"
#include "core/genealogy.hpp"
#include "naive_events.hpp"

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

struct Inj {
    int time;
    int rank; // 1-based, in the trajectory as of the previous pass
    double value;
};

// Tiny keyed base jumps plus branch-1 overrides addressed by the rank the
// target holds at injection time. Multi-pass: the prefix before each
// injection is unchanged by determinism.
Trajectory injected(long n, int t, double base_max, std::vector<Inj> injections,
                    double alpha = 1.0, std::vector<double> initial = {}) {
    TableJumpSource src(base_max, 99);
    EngineConfig cfg;
    cfg.law = TailLaw(TailFamily::pareto, alpha);
    cfg.n = n;
    cfg.t = t;
    cfg.initial = std::move(initial);
    cfg.source = &src;
    std::stable_sort(injections.begin(), injections.end(),
                     [](const Inj& a, const Inj& b) { return a.time < b.time; });
    Trajectory tr = run_direct(cfg);
    for (const auto& inj : injections) {
        const Label who =
            tr.gens[static_cast<std::size_t>(inj.time)].labels[static_cast<std::size_t>(inj.rank - 1)];
        src.set_override(who.lineage, who.path.child(inj.time, 1), inj.time + 1, inj.value);
        tr = run_direct(cfg);
    }
    return tr;
}

} // namespace

TEST_CASE("big_jumps windows and thresholds") {
    const Trajectory tr0 = injected(2, 6, 0.0, {});
    CHECK(big_jumps(tr0, 0.5, 0, 5).empty());

    // alpha=2 gives a_N = 2 at N = 2; one jump of 1.5 exceeds 0.5 * a_N = 1.
    const Trajectory tr1 = injected(2, 6, 0.0, {{3, 1, 1.5}}, 2.0);
    CHECK(tr1.scales.a == doctest::Approx(2.0));
    const auto bj = big_jumps(tr1, 0.5, 0, 5);
    REQUIRE(bj.size() == 1);
    CHECK(bj[0].time == 3);
    CHECK(bj[0].value == 1.5);

    // rho -> 0+ with positive base jumps: every jump is big.
    const Trajectory tr2 = injected(2, 6, 0.25, {});
    CHECK(big_jumps(tr2, 1e-12, 2, 4).size() == 2 * 2 * 3);
}

TEST_CASE("record vs surpass: the surpassed-but-not-record case") {
    // N=2, alpha=1, a_N = 4, big threshold 2 at rho = 0.5. At time 0 the
    // lagging particle jumps 11 (big, lands above the leader at 10), but the
    // leader's own small 1.5 jump lands higher still.
    const Trajectory tr =
        injected(2, 6, 1e-9, {{0, 1, 11.0}, {0, 2, 1.5}}, 1.0, {0.0, 10.0});
    CHECK(surpass_times(tr, 0.5, 0, 5) == std::vector<int>{0});
    CHECK(record_times(tr, 0.5, 0, 5).empty());

    // A clear winner is in both sets, and its landing respects monotonicity.
    const Trajectory tr2 = injected(2, 6, 1e-9, {{0, 1, 13.0}}, 1.0, {0.0, 10.0});
    CHECK(record_times(tr2, 0.5, 0, 5) == std::vector<int>{0});
    CHECK(surpass_times(tr2, 0.5, 0, 5) == std::vector<int>{0});
    for (int s : record_times(tr2, 0.5, 0, 5)) CHECK(tr2.leader(s + 1) >= tr2.leader(s));
}

TEST_CASE("last_record_time") {
    // N=4 (ell=2), t=12 > 8; t1 = 10, t4 = 4; a_N = 16, threshold 8.
    auto mk = [&](std::vector<Inj> inj) { return injected(4, 12, 1e-9, std::move(inj)); };
    CHECK(last_record_time(mk({}), 0.5, 12) == 0);
    CHECK(last_record_time(mk({{6, 4, 50.0}}), 0.5, 12) == 7);
    CHECK(last_record_time(mk({{5, 4, 50.0}, {8, 4, 50.0}}), 0.5, 12) == 9);
    CHECK(last_record_time(mk({{10, 4, 50.0}}), 0.5, 12) == 0); // at t1: out of scope
    CHECK_THROWS_AS(last_record_time(mk({}), 0.5, 8), domain_error);
}

TEST_CASE("population stats on {0,1,5}") {
    EngineConfig cfg;
    cfg.law = TailLaw(TailFamily::pareto, 1.0);
    cfg.n = 3;
    cfg.t = 0;
    cfg.initial = {0.0, 1.0, 5.0};
    const Trajectory tr = run_direct(cfg);
    const double a = tr.scales.a; // 2*3*2 = 12
    const auto st = population_stats(tr, 0, 1.0 / a, 4.5 / a);
    CHECK(st.d == 5.0);
    CHECK(st.L == 2);
    CHECK(st.R == 2);
    REQUIRE(st.z.size() == 3);
    CHECK(st.z[0] == 5.0);
    CHECK(st.z[2] == 0.0);
}

TEST_CASE("landmark times") {
    const auto sched = relaxed_schedule(1.0, 1.0);
    // Zero jumps: diameter constant zero, so tau2 = t2 and tau1 never fires.
    const Trajectory tr = injected(8, 16, 0.0, {}); // ell=3, t2=10
    const auto lm = landmark_times(tr, sched, 16);
    REQUIRE(lm.tau2.has_value());
    CHECK(*lm.tau2 == 10);
    CHECK_FALSE(lm.tau1.has_value());
    // No surpass times at all: tau3 is the window start t2 - ceil(c5 ell).
    REQUIRE(lm.tau3.has_value());
    CHECK(*lm.tau3 == 10 - static_cast<int>(std::ceil(sched.c5 * 3)));
}

TEST_CASE("evaluate_events on the zero-jump trajectory") {
    const auto sched = relaxed_schedule(1.0, 1.0);
    const Trajectory tr = injected(8, 16, 0.0, {});
    const auto rep = evaluate_events(tr, sched, 16, {1, 2}, 1);
    CHECK(rep.a1.is_true()); // everyone within 0 of the leftmost
    CHECK(rep.big_jump_set.empty());
    CHECK(rep.T == 0);
    CHECK_FALSE(rep.a4.value.has_value()); // undefined when T = 0
    CHECK(rep.a3.is_false());
    for (double d : rep.diameter_series) CHECK(d == 0.0);
    CHECK(rep.c[4].is_true());
    CHECK(rep.c[6].is_true());
}

TEST_CASE("the G event fires on a single huge jump in the window") {
    const auto sched = relaxed_schedule(1.0, 1.0);
    // N=16 -> ell=4, a=128, t=20, t2=12; B_N' window is [13, 14].
    const Trajectory tr = injected(16, 20, 1e-4, {{13, 3, 4.6 * 128.0}});
    CHECK(tr.scales.a == doctest::Approx(128.0));
    const auto rep = evaluate_events(tr, sched, 20, {1}, 1);
    CHECK(rep.g.is_true());
    CHECK(rep.g.witness.find("s=13") != std::string::npos);
    CHECK(rep.T == 14); // the huge jump is the last record before t1

    // A second above-a_N jump outside B_N' breaks G.
    const Trajectory tr2 =
        injected(16, 20, 1e-4, {{13, 3, 4.6 * 128.0}, {9, 5, 200.0}});
    CHECK(evaluate_events(tr2, sched, 20, {1}, 1).g.is_false());
}

TEST_CASE("stopping times") {
    const auto sched = relaxed_schedule(1.0, 1.0);
    // N=4 (ell=2), t=12, t1=10, t2=8, margin=1; T_0 = 8, records count in [8, 8].
    auto mk = [&](std::vector<Inj> inj) { return injected(4, 12, 1e-9, std::move(inj)); };
    CHECK(stopping_times(mk({}), sched, 12, 0.5) == std::vector<int>{10});
    CHECK(stopping_times(mk({{8, 4, 50.0}}), sched, 12, 0.5) == std::vector<int>({9, 10}));
    // A record before T_0 is ignored.
    CHECK(stopping_times(mk({{6, 4, 50.0}}), sched, 12, 0.5) == std::vector<int>{10});
}

TEST_CASE("medium jump diagnostics") {
    const auto sched = relaxed_schedule(1.0, 1.0);
    const Trajectory tr = injected(16, 20, 0.0, {}); // ell=4, a=128
    const double d1 = sched.delta / 16.0;
    const double d2 = sched.delta * sched.delta / 2.0;
    // No records: T_1 = t1, theta = 0, a_hat = h^-1(d1 * ell) = 0 at this scale.
    const auto diag = medium_jump_diagnostics(tr, sched, 20, 1, d1, d2);
    CHECK(diag.theta == 0.0);
    CHECK(diag.a_hat == tr.law.h_inverse(d1 * 4.0));
    CHECK(diag.medium.empty()); // all jumps are exactly zero

    CHECK_THROWS_AS(medium_jump_diagnostics(tr, sched, 20, 1, sched.delta, d2), domain_error);
    CHECK_THROWS_AS(medium_jump_diagnostics(tr, sched, 20, 1, d1, sched.delta), domain_error);

    // With a record inside the stopping-time window, theta > 0 and, at this
    // scale, the medium threshold collapses to zero: every positive jump in
    // [t2, t-1] is medium.
    const Trajectory tr2 = injected(16, 20, 1e-6, {{13, 3, 600.0}});
    const auto diag2 = medium_jump_diagnostics(tr2, sched, 20, 1, d1, d2, 0.5);
    CHECK(diag2.theta > 0.0);
    CHECK(diag2.medium.size() == 2u * 16u * (19 - 12 + 1));

    // The alpha=1 closed form h^-1(y) = y backing a_hat, at an argument in
    // the regularly varying range.
    CHECK(tr.law.h_inverse(123456.0) == doctest::Approx(123456.0));
}

TEST_CASE("production flags equal the naive transcription on random trajectories") {
    const auto sched_big = relaxed_schedule(1.0, 1.0);
    const auto sched_small = relaxed_schedule(0.6, 1.0);
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        for (double alpha : {0.7, 1.0, 2.0}) {
            const long n = 8 + static_cast<long>(seed % 3) * 4; // 8, 12, 16
            const int ell = time_scale(n);
            const int t = 5 * ell + static_cast<int>(seed % 2);
            const Trajectory tr = law_traj(n, t, seed, alpha);
            const auto sample = sample_uniform(tr, t, 3, seed);
            const int eps_ell = tr.scales.eps_ell;
            for (double rho_probe : {0.0, 0.4}) {
                ConstantSchedule s = (seed % 2) ? sched_big : sched_small;
                s.alpha = alpha;
                EventParams params;
                params.rho_probe = rho_probe;
                const auto rep = evaluate_events(tr, s, t, sample, eps_ell, params);
                const auto ref = naive::evaluate(tr, s, t, sample, eps_ell, params.s1, params.s2,
                                                 params.r_g, params.nu, rho_probe);
                CHECK(rep.T == ref.T);
                CHECK(rep.record_set == ref.record_set);
                CHECK(rep.surpass_set == ref.surpass_set);
                CHECK(rep.landmarks.tau1 == ref.tau1);
                CHECK(rep.landmarks.tau2 == ref.tau2);
                CHECK(rep.landmarks.tau3 == ref.tau3);
                CHECK(rep.a1.is_true() == ref.a1);
                CHECK(rep.a2.is_true() == ref.a2);
                CHECK(rep.a2prime.is_true() == ref.a2prime);
                CHECK(rep.a3.is_true() == ref.a3);
                CHECK(rep.a4.value == ref.a4);
                CHECK(rep.b1.is_true() == ref.b1);
                CHECK(rep.b2.is_true() == ref.b2);
                for (int i = 0; i < 7; ++i) CHECK(rep.c[i].is_true() == ref.c[i]);
                for (int i = 0; i < 5; ++i) CHECK(rep.d[i].is_true() == ref.d[i]);
                CHECK(rep.g.is_true() == ref.g);
                ++checked;
            }
        }
    }
    CHECK(checked == 60);
}

TEST_CASE("report serialisation") {
    const auto sched = relaxed_schedule(1.0, 1.0);
    const Trajectory tr = law_traj(8, 16, 3);
    const auto rep = evaluate_events(tr, sched, 16, {1, 2}, 1);
    const auto text = event_report_to_json(rep);
    CHECK(text.find("\"events\"") != std::string::npos);
    CHECK(text.find("\"A2prime\"") != std::string::npos);
    CHECK(text.find("\"tau1\"") != std::string::npos);
    const auto table = event_report_table(rep);
    CHECK(table.find("C7") != std::string::npos);
}

TEST_CASE("evaluate_events preconditions") {
    const auto sched = relaxed_schedule(1.0, 1.0);
    const Trajectory tr = law_traj(8, 16, 3); // ell = 3
    CHECK_THROWS_AS(evaluate_events(tr, sched, 12, {1}, 1), domain_error); // t <= 4 ell
    CHECK_THROWS_AS(evaluate_events(tr, sched, 17, {1}, 1), domain_error); // beyond duration
    CHECK_THROWS_AS(evaluate_events(tr, sched, 16, {9}, 1), domain_error); // bad sample
    CHECK_THROWS_AS(evaluate_events(tr, sched, 16, {}, 1), domain_error);  // empty sample
    CHECK_THROWS_AS(evaluate_events(tr, sched, 16, {1}, 9), domain_error); // eps_ell > ell
}
