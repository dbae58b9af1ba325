#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "core/engine.hpp"
#include "core/rng.hpp"

using namespace nbrw;

TEST_CASE("philox known answers") {
    // Reference vectors for philox4x32-10.
    {
        const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
        CHECK(out[0] == 0x6627e8d5u);
        CHECK(out[1] == 0xe169c58du);
        CHECK(out[2] == 0xbc57ac4cu);
        CHECK(out[3] == 0x9b00dbd8u);
    }
    {
        const auto out = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                    {0xa4093822u, 0x299f31d0u});
        CHECK(out[0] == 0xd16cfe09u);
        CHECK(out[1] == 0x94fdccebu);
        CHECK(out[2] == 0x5001e420u);
        CHECK(out[3] == 0x24126ea1u);
    }
}

TEST_CASE("jump values are a pure function of (seed, key)") {
    TailLaw law(TailFamily::pareto, 2.0);
    LawJumpSource src(law, 123, 4);
    PathCode u = PathCode{}.child(0, 2).child(1, 1).child(2, 2);
    const double a = src.jump(7, u, 3);
    const double b = src.jump(7, u, 3);
    CHECK(a == b);
    CHECK(a >= 1.0); // pareto support starts at 1

    LawJumpSource other_rep(law, 123, 5);
    CHECK(other_rep.jump(7, u, 3) != a);
    LawJumpSource other_seed(law, 124, 4);
    CHECK(other_seed.jump(7, u, 3) != a);
    CHECK(src.jump(8, u, 3) != a);
}

TEST_CASE("branch-sibling uniforms are uncorrelated") {
    const long pairs = 100000;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (long i = 0; i < pairs; ++i) {
        PathCode base;
        const auto lineage = static_cast<std::int32_t>(i % 1024 + 1);
        const int depth = static_cast<int>(i % 60) + 1;
        for (int l = 0; l + 1 < depth; ++l)
            base = base.child(l, 1 + static_cast<int>((i >> (l % 16)) & 1));
        const PathCode u1 = base.child(depth - 1, 1);
        const PathCode u2 = base.child(depth - 1, 2);
        const double x = keyed_uniform(99, StreamDomain::jump, JumpKey{0, lineage, depth, u1});
        const double y = keyed_uniform(99, StreamDomain::jump, JumpKey{0, lineage, depth, u2});
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    const double n = static_cast<double>(pairs);
    const double corr =
        (sxy - sx * sy / n) / std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
    CHECK(std::abs(corr) < 0.01);
}

namespace {

Generation make_gen(std::vector<double> positions) {
    Generation g;
    g.index = 0;
    g.positions = std::move(positions);
    g.labels.resize(g.positions.size());
    for (std::size_t i = 0; i < g.labels.size(); ++i)
        g.labels[i] = Label{static_cast<std::int32_t>(i + 1), PathCode{}};
    return g;
}

// A fully specified jump table for one step: jumps[lineage-1][branch-1].
class StepTable final : public JumpSource {
  public:
    explicit StepTable(std::vector<std::array<double, 2>> jumps) : jumps_(std::move(jumps)) {}
    double jump(std::int32_t lineage, const PathCode& child, int) const override {
        const int b = child.branch_at(0);
        return jumps_[static_cast<std::size_t>(lineage - 1)][static_cast<std::size_t>(b - 1)];
    }

  private:
    std::vector<std::array<double, 2>> jumps_;
};

} // namespace

TEST_CASE("step: top-2 of the four offspring") {
    auto gen = make_gen({0.0, 0.0});
    StepTable table({{{1.0, 3.0}}, {{2.0, 5.0}}});
    const Generation next = step(gen, table, nullptr);
    REQUIRE(next.positions.size() == 2);
    CHECK(next.positions[0] == 3.0);
    CHECK(next.positions[1] == 5.0);
}

TEST_CASE("step: both offspring of the rightmost survive when all jumps are zero") {
    auto gen = make_gen({0.0, 10.0});
    StepTable table({{{0.0, 0.0}}, {{0.0, 0.0}}});
    const Generation next = step(gen, table, nullptr);
    CHECK(next.positions[0] == 10.0);
    CHECK(next.positions[1] == 10.0);
    CHECK(next.parent_rank[0] == 1);
    CHECK(next.parent_rank[1] == 1);
}

TEST_CASE("step: ties at the cut go to the smallest lexicographic label") {
    // N = 4; offspring values 9, 8, then three tied at 5; two slots remain at
    // the cut after 9 and 8. Compare against a brute-force enumeration.
    auto gen = make_gen({0.0, 0.0, 0.0, 0.0});
    StepTable table({{{9.0, 5.0}}, {{8.0, 5.0}}, {{5.0, 1.0}}, {{1.0, 0.0}}});
    const Generation next = step(gen, table, nullptr);
    REQUIRE(next.positions.size() == 4);
    CHECK(next.positions == std::vector<double>({5.0, 5.0, 8.0, 9.0}));

    // Tied candidates: (1, b2), (2, b2), (3, b1) at value 5; the two smallest
    // labels survive.
    REQUIRE(next.labels.size() == 4);
    CHECK(next.labels[0].lineage == 1);
    CHECK(next.labels[0].path.branch_at(0) == 2);
    CHECK(next.labels[1].lineage == 2);
    CHECK(next.labels[1].path.branch_at(0) == 2);

    struct Cand {
        double v;
        int lineage;
        int branch;
    };
    std::vector<Cand> cands;
    const double tab[4][2] = {{9.0, 5.0}, {8.0, 5.0}, {5.0, 1.0}, {1.0, 0.0}};
    for (int i = 0; i < 4; ++i)
        for (int b = 1; b <= 2; ++b)
            cands.push_back({tab[i][b - 1], i + 1, b});
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.v != b.v) return a.v > b.v;
        return std::pair(a.lineage, a.branch) < std::pair(b.lineage, b.branch);
    });
    std::vector<double> expect;
    for (int i = 0; i < 4; ++i) expect.push_back(cands[static_cast<std::size_t>(i)].v);
    std::sort(expect.begin(), expect.end());
    CHECK(next.positions == expect);
}

TEST_CASE("run_direct basics") {
    EngineConfig cfg;
    cfg.law = TailLaw(TailFamily::pareto, 1.0);
    cfg.n = 8;
    cfg.t = 0;
    cfg.seed = 5;
    const Trajectory tr = run_direct(cfg);
    CHECK(tr.duration() == 0);
    CHECK(tr.gens.size() == 1);
    CHECK(tr.gens[0].positions == std::vector<double>(8, 0.0));

    cfg.t = 40;
    const Trajectory tr2 = run_direct(cfg);
    for (int s = 0; s < 40; ++s)
        for (int i = 1; i <= 8; ++i) CHECK(tr2.position(i, s + 1) >= tr2.position(i, s));
}

TEST_CASE("engine validation and capacity guards") {
    EngineConfig cfg;
    cfg.law = TailLaw(TailFamily::pareto, 1.0);
    cfg.n = 1;
    cfg.t = 1;
    CHECK_THROWS_AS(run_direct(cfg), domain_error);
    cfg.n = 4;
    cfg.t = 200;
    CHECK_THROWS_AS(run_direct(cfg), capacity_error);
    cfg.t = 4;
    cfg.initial = {3.0, 2.0, 1.0, 0.0};
    CHECK_THROWS_AS(run_direct(cfg), domain_error);
    cfg.initial = {0.0, 1.0, 2.0};
    CHECK_THROWS_AS(run_direct(cfg), domain_error);
    cfg.initial.clear();
    cfg.law = TailLaw(TailFamily::pareto, 0.25);
    cfg.n = 1 << 14;
    CHECK_THROWS_AS(run_direct(cfg), capacity_error);
}

TEST_CASE("custom initial configuration is generation zero") {
    EngineConfig cfg;
    cfg.law = TailLaw(TailFamily::pareto, 1.0);
    cfg.n = 4;
    cfg.t = 3;
    cfg.initial = {-1.0, 0.0, 0.5, 2.0};
    cfg.seed = 3;
    const Trajectory tr = run_direct(cfg);
    CHECK(tr.gens[0].positions == cfg.initial);
}

TEST_CASE("the two constructions are identical") {
    for (long n : {2L, 4L, 8L, 16L}) {
        for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
            EngineConfig cfg;
            cfg.law = TailLaw(TailFamily::pareto, 2.0);
            cfg.n = n;
            cfg.t = 64;
            cfg.seed = seed;
            const Trajectory a = run_direct(cfg);
            const Trajectory b = run_brw_construction(cfg);
            CHECK(identical(a, b));
        }
    }
    EngineConfig cfg;
    cfg.law = TailLaw(TailFamily::pareto_log, 0.8);
    cfg.n = 16;
    cfg.t = 30;
    cfg.seed = 9;
    CHECK(identical(run_direct(cfg), run_brw_construction(cfg)));
}

TEST_CASE("H_0 labels are (lineage, empty path)") {
    EngineConfig cfg;
    cfg.law = TailLaw(TailFamily::pareto, 1.0);
    cfg.n = 4;
    cfg.t = 2;
    const Trajectory tr = run_brw_construction(cfg);
    for (int i = 0; i < 4; ++i) {
        CHECK(tr.gens[0].labels[static_cast<std::size_t>(i)].lineage == i + 1);
        CHECK(tr.gens[0].labels[static_cast<std::size_t>(i)].path == PathCode{});
    }
}

TEST_CASE("descendants doubling bound, exhaustive on small runs") {
    for (std::uint64_t seed : {1ull, 7ull}) {
        EngineConfig cfg;
        cfg.law = TailLaw(TailFamily::pareto, 1.0);
        cfg.n = 16;
        cfg.t = 32;
        cfg.seed = seed;
        const Trajectory tr = run_direct(cfg);
        std::vector<double> xs;
        for (const auto& g : tr.gens) xs.insert(xs.end(), g.positions.begin(), g.positions.end());
        for (double x : xs) {
            std::vector<long> count(static_cast<std::size_t>(tr.duration()) + 1);
            for (int s = 0; s <= tr.duration(); ++s) {
                long c = 0;
                for (int i = 1; i <= 16; ++i)
                    if (tr.position(i, s) >= x) ++c;
                count[static_cast<std::size_t>(s)] = c;
            }
            for (int s = 0; s <= tr.duration(); ++s)
                for (int k = 0; s + k <= tr.duration(); ++k) {
                    const double want = std::min(
                        16.0, std::ldexp(static_cast<double>(count[static_cast<std::size_t>(s)]), k));
                    CHECK(count[static_cast<std::size_t>(s + k)] >= want);
                }
        }
    }
}

TEST_CASE("path-sum identity within 16 ULP per step") {
    EngineConfig cfg;
    cfg.law = TailLaw(TailFamily::pareto, 0.7);
    cfg.n = 32;
    cfg.t = 30;
    cfg.seed = 11;
    const Trajectory tr = run_direct(cfg);
    std::vector<double> recon = tr.gens[0].positions;
    for (int s = 0; s < tr.duration(); ++s) {
        std::vector<double> next(recon.size());
        for (int c = 1; c <= 32; ++c) {
            const int p = tr.parent_of(c, s + 1);
            next[static_cast<std::size_t>(c - 1)] =
                recon[static_cast<std::size_t>(p - 1)] + tr.jump(p, tr.branch_of(c, s + 1), s);
            const double stored = tr.position(c, s + 1);
            const double base = std::max(std::abs(stored), 1.0);
            const double ulp = std::nextafter(base, 1e300) - base;
            CHECK(std::abs(next[static_cast<std::size_t>(c - 1)] - stored) <= 16.0 * (s + 1) * ulp);
        }
        recon = next;
    }
}

TEST_CASE("keep_labels=false strips intermediate labels but not results") {
    EngineConfig cfg;
    cfg.law = TailLaw(TailFamily::pareto, 1.0);
    cfg.n = 8;
    cfg.t = 10;
    cfg.seed = 2;
    Trajectory with = run_direct(cfg);
    cfg.keep_labels = false;
    Trajectory without = run_direct(cfg);
    CHECK(identical(with, without));
    CHECK(without.gens[5].labels.empty());
    CHECK_FALSE(with.gens[5].labels.empty());
}
