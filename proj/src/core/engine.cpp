#include "core/engine.hpp"

#include <algorithm>
#include <cmath>

namespace nbrw {

double LawJumpSource::jump(std::int32_t lineage, const PathCode& child, int depth) const {
    JumpKey key{replicate_, lineage, depth, child};
    return law_.sample(keyed_uniform(seed_, StreamDomain::jump, key));
}

void TableJumpSource::set_override(std::int32_t lineage, const PathCode& child, int depth,
                                   double value) {
    overrides_[Addr{lineage, depth, child}] = value;
}

double TableJumpSource::jump(std::int32_t lineage, const PathCode& child, int depth) const {
    if (auto it = overrides_.find(Addr{lineage, depth, child}); it != overrides_.end())
        return it->second;
    JumpKey key{0, lineage, depth, child};
    return base_max_ * bits_to_open_unit(keyed_bits(seed_, StreamDomain::scratch, key));
}

namespace {

struct Candidate {
    double value;
    Label label;
    std::int32_t parent_rank; // 0-based
    std::uint8_t branch;
};

// Survival order: larger value first; at equal values the lexicographically
// smaller label survives.
inline bool survives_before(const Candidate& a, const Candidate& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.label < b.label;
}

// Rank order within a generation: ascending value, ties ascending by label.
inline bool ranks_before(const Candidate& a, const Candidate& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.label < b.label;
}

Generation emit(std::vector<Candidate>& survivors, int index, bool keep_labels) {
    std::sort(survivors.begin(), survivors.end(), ranks_before);
    Generation next;
    next.index = index;
    next.positions.reserve(survivors.size());
    next.parent_rank.reserve(survivors.size());
    next.parent_branch.reserve(survivors.size());
    if (keep_labels) next.labels.reserve(survivors.size());
    for (const Candidate& c : survivors) {
        next.positions.push_back(c.value);
        next.parent_rank.push_back(c.parent_rank);
        next.parent_branch.push_back(c.branch);
        if (keep_labels) next.labels.push_back(c.label);
    }
    return next;
}

void validate(const EngineConfig& cfg) {
    if (cfg.n < 2) throw domain_error("N >= 2 required");
    if (cfg.t < 0) throw domain_error("t >= 0 required");
    if (cfg.t > PathCode::max_depth)
        throw capacity_error("t exceeds the maximum tree depth of " +
                             std::to_string(PathCode::max_depth));
    if (!cfg.initial.empty()) {
        if (static_cast<long>(cfg.initial.size()) != cfg.n)
            throw domain_error("initial configuration must have N entries");
        if (!std::is_sorted(cfg.initial.begin(), cfg.initial.end()))
            throw domain_error("initial configuration must be ascending");
    }
}

Trajectory init_trajectory(const EngineConfig& cfg) {
    Trajectory traj;
    traj.law = cfg.law;
    traj.scales = make_scales(cfg.law, cfg.n);
    traj.seed = cfg.seed;
    traj.replicate = cfg.replicate;
    traj.initial = cfg.initial.empty() ? std::vector<double>(cfg.n, 0.0) : cfg.initial;

    if (cfg.source == nullptr) {
        // Worst-case magnitude guard keeps path-sum reconstruction within the
        // documented ULP budget.
        const double worst = traj.scales.a * std::max(cfg.t, 1);
        if (worst > 0x1.0p50)
            throw capacity_error("configured worst-case magnitude a_N*t exceeds 2^50");
    }

    Generation g0;
    g0.index = 0;
    g0.positions = traj.initial;
    g0.labels.resize(traj.initial.size());
    for (std::size_t i = 0; i < g0.labels.size(); ++i)
        g0.labels[i] = Label{static_cast<std::int32_t>(i + 1), PathCode{}};
    traj.gens.reserve(static_cast<std::size_t>(cfg.t) + 1);
    traj.gens.push_back(std::move(g0));
    traj.jump_table.assign(static_cast<std::size_t>(cfg.t) * 2 * cfg.n, 0.0);
    return traj;
}

} // namespace

Generation step(const Generation& gen, const JumpSource& source,
                std::vector<double>* jump_row_out) {
    const auto n = static_cast<std::int32_t>(gen.positions.size());
    const int depth = gen.index + 1;
    std::vector<Candidate> cands;
    cands.reserve(2 * static_cast<std::size_t>(n));
    for (std::int32_t i = 0; i < n; ++i) {
        const Label& parent = gen.labels[i];
        for (std::uint8_t b = 1; b <= 2; ++b) {
            Label child{parent.lineage, parent.path.child(gen.index, b)};
            const double x = source.jump(child.lineage, child.path, depth);
            if (jump_row_out) (*jump_row_out)[static_cast<std::size_t>(i) * 2 + (b - 1)] = x;
            cands.push_back(Candidate{gen.positions[i] + x, child, i, b});
        }
    }
    // Expected-linear cut of the N survivors, then sort only them.
    std::nth_element(cands.begin(), cands.begin() + (n - 1), cands.end(), survives_before);
    cands.resize(static_cast<std::size_t>(n));
    return emit(cands, gen.index + 1, true);
}

Trajectory run_direct(const EngineConfig& cfg) {
    validate(cfg);
    Trajectory traj = init_trajectory(cfg);
    LawJumpSource default_source(cfg.law, cfg.seed, cfg.replicate);
    const JumpSource& source = cfg.source ? *cfg.source : default_source;

    std::vector<double> row(2 * static_cast<std::size_t>(cfg.n));
    for (int n = 0; n < cfg.t; ++n) {
        Generation next = step(traj.gens.back(), source, &row);
        std::copy(row.begin(), row.end(),
                  traj.jump_table.begin() + static_cast<std::size_t>(n) * 2 * cfg.n);
        if (!cfg.keep_labels && n > 0) traj.gens.back().labels.clear();
        traj.gens.push_back(std::move(next));
    }
    if (!cfg.keep_labels && cfg.t > 0) traj.gens.back().labels.clear();
    return traj;
}

Trajectory run_brw_construction(const EngineConfig& cfg) {
    validate(cfg);
    Trajectory traj = init_trajectory(cfg);
    LawJumpSource default_source(cfg.law, cfg.seed, cfg.replicate);
    const JumpSource& source = cfg.source ? *cfg.source : default_source;

    // Frontier H_n kept in tree order (lineage, path), not rank order. Each
    // node remembers the rank it received when the sigma map last emitted it,
    // which is how parent links land back in rank coordinates.
    struct Node {
        std::int32_t lineage;
        PathCode path;
        double pos;
        std::int32_t rank; // 0-based rank in the emitted generation
    };
    std::vector<Node> frontier;
    frontier.reserve(cfg.n);
    for (std::int32_t j = 0; j < cfg.n; ++j)
        frontier.push_back(Node{j + 1, PathCode{}, traj.initial[j], j});

    for (int n = 0; n < cfg.t; ++n) {
        std::vector<Candidate> offspring;
        offspring.reserve(2 * frontier.size());
        for (const Node& node : frontier) {
            for (std::uint8_t b = 1; b <= 2; ++b) {
                Label child{node.lineage, node.path.child(n, b)};
                const double x = source.jump(child.lineage, child.path, n + 1);
                traj.jump_table[(static_cast<std::size_t>(n) * cfg.n + node.rank) * 2 + (b - 1)] =
                    x;
                offspring.push_back(Candidate{node.pos + x, child, node.rank, b});
            }
        }
        // Full descending sort; H_{n+1} is the prefix. Deliberately a
        // different selection path from run_direct.
        std::sort(offspring.begin(), offspring.end(), survives_before);
        offspring.resize(static_cast<std::size_t>(cfg.n));
        Generation next = emit(offspring, n + 1, true);

        frontier.clear();
        for (std::int32_t i = 0; i < cfg.n; ++i)
            frontier.push_back(Node{next.labels[i].lineage, next.labels[i].path,
                                    next.positions[i], i});
        // Tree order of the surviving set.
        std::sort(frontier.begin(), frontier.end(), [](const Node& a, const Node& b) {
            return std::pair(a.lineage, a.path) < std::pair(b.lineage, b.path);
        });

        if (!cfg.keep_labels) next.labels.clear();
        traj.gens.push_back(std::move(next));
    }
    return traj;
}

bool identical(const Trajectory& a, const Trajectory& b) {
    if (a.n_particles() != b.n_particles() || a.duration() != b.duration()) return false;
    for (int n = 0; n <= a.duration(); ++n) {
        const Generation& ga = a.gens[n];
        const Generation& gb = b.gens[n];
        if (ga.positions != gb.positions) return false;
        if (ga.parent_rank != gb.parent_rank) return false;
        if (ga.parent_branch != gb.parent_branch) return false;
    }
    return a.jump_table == b.jump_table;
}

double max_position_magnitude(const Trajectory& traj) {
    double m = 0.0;
    for (const Generation& g : traj.gens)
        for (double x : g.positions) m = std::max(m, std::abs(x));
    return m;
}

} // namespace nbrw
