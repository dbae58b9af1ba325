#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "core/pathcode.hpp"
#include "core/rng.hpp"
#include "core/tails.hpp"

namespace nbrw {

// Supplies the jump Y_{j,u} addressed by tree coordinates. Both engine
// constructions consume the same source, so a run is a pure function of
// (source, initial configuration) regardless of which construction executes.
class JumpSource {
  public:
    virtual ~JumpSource() = default;
    // `child` is the full path u of the offspring (depth levels, the last one
    // being the branch taken); the jump leads INTO that offspring.
    virtual double jump(std::int32_t lineage, const PathCode& child, int depth) const = 0;
};

// Law-distributed jumps through the keyed counter stream.
class LawJumpSource final : public JumpSource {
  public:
    LawJumpSource(TailLaw law, std::uint64_t seed, std::uint64_t replicate)
        : law_(law), seed_(seed), replicate_(replicate) {}
    double jump(std::int32_t lineage, const PathCode& child, int depth) const override;

  private:
    TailLaw law_;
    std::uint64_t seed_;
    std::uint64_t replicate_;
};

// Deterministic synthetic stream for fixtures: a small keyed base jump in
// [0, base_max), plus explicit overrides addressed by tree coordinates.
// A vertex is (lineage, path, depth): the depth matters because branch-1
// levels contribute zero bits to the path code.
class TableJumpSource final : public JumpSource {
  public:
    TableJumpSource(double base_max, std::uint64_t seed) : base_max_(base_max), seed_(seed) {}
    void set_override(std::int32_t lineage, const PathCode& child, int depth, double value);
    double jump(std::int32_t lineage, const PathCode& child, int depth) const override;

  private:
    struct Addr {
        std::int32_t lineage;
        int depth;
        PathCode child;
        friend auto operator<=>(const Addr&, const Addr&) = default;
    };
    double base_max_;
    std::uint64_t seed_;
    std::map<Addr, double> overrides_;
};

struct Generation {
    int index = 0;
    std::vector<double> positions;            // ascending; ties ascending by label
    std::vector<Label> labels;                // empty when labels are not kept
    std::vector<std::int32_t> parent_rank;    // empty at index 0
    std::vector<std::uint8_t> parent_branch;  // 1 or 2
};

struct Trajectory {
    TailLaw law;
    Scales scales;
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
    std::vector<double> initial;
    std::vector<Generation> gens; // [0, t]
    std::vector<double> jump_table; // X_{i,b,n}: ((n*N)+i)*2 + (b-1), n in [0, t-1]

    long n_particles() const { return static_cast<long>(initial.size()); }
    int duration() const { return static_cast<int>(gens.size()) - 1; }

    // rank is 1-based (paper convention), branch in {1, 2}.
    double position(int rank, int time) const { return gens[time].positions[rank - 1]; }
    double jump(int rank, int branch, int time) const {
        return jump_table[(static_cast<std::size_t>(time) * initial.size() + (rank - 1)) * 2 +
                          (branch - 1)];
    }
    int parent_of(int rank, int time) const { return gens[time].parent_rank[rank - 1] + 1; }
    int branch_of(int rank, int time) const { return gens[time].parent_branch[rank - 1]; }

    double leader(int time) const { return gens[time].positions.back(); }
    double leftmost(int time) const { return gens[time].positions.front(); }
    double diameter(int time) const { return leader(time) - leftmost(time); }
};

struct EngineConfig {
    TailLaw law;
    long n = 2;
    int t = 1;
    std::vector<double> initial; // empty = all zeros; must be ascending
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
    bool keep_labels = true;
    const JumpSource* source = nullptr; // default: LawJumpSource(law, seed, replicate)
};

// One branching + selection step. `gen` must carry labels. Exposed separately
// so tie-breaking can be pinned down by table-driven tests.
Generation step(const Generation& gen, const JumpSource& source,
                std::vector<double>* jump_row_out);

// Direct construction: N ranked particles, each spawning two offspring, keep
// the N rightmost with deterministic lexicographic tie-breaking.
Trajectory run_direct(const EngineConfig& cfg);

// Construction from N independent BRWs: survivor sets H_n over tree labels,
// ranks emitted through the order-preserving relabelling. Identical output to
// run_direct by construction; equality is enforced by tests.
Trajectory run_brw_construction(const EngineConfig& cfg);

// Positions, parent links and jump tables all bitwise equal.
bool identical(const Trajectory& a, const Trajectory& b);

double max_position_magnitude(const Trajectory& traj);

} // namespace nbrw
