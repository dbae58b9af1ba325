#include "core/serialize.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace nbrw {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'N', 'B', 'R', 'W', 'T', 'R', 'J', '1'};

template <typename T> void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T> T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw parse_error("unexpected end of binary trajectory");
    return v;
}

template <typename T> void put_vec(std::ostream& out, const std::vector<T>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T> void get_vec(std::istream& in, std::vector<T>& v, std::size_t count) {
    v.resize(count);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(T)));
    if (!in) throw parse_error("unexpected end of binary trajectory");
}

json header_json(const Trajectory& traj) {
    return json{{"format", "nbrw-trajectory"},
                {"version", 1},
                {"law", {{"family", to_string(traj.law.family)}, {"alpha", traj.law.alpha}}},
                {"n", traj.n_particles()},
                {"t", traj.duration()},
                {"seed", traj.seed},
                {"replicate", traj.replicate},
                {"initial", traj.initial}};
}

void apply_header(Trajectory& traj, const json& h) {
    traj.law = TailLaw(tail_family_from_string(h.at("law").at("family").get<std::string>()),
                       h.at("law").at("alpha").get<double>());
    traj.seed = h.at("seed").get<std::uint64_t>();
    traj.replicate = h.at("replicate").get<std::uint64_t>();
    traj.initial = h.at("initial").get<std::vector<double>>();
    traj.scales = make_scales(traj.law, static_cast<long>(traj.initial.size()));
}

} // namespace

void recompute_labels(Trajectory& traj) {
    if (traj.gens.empty()) return;
    auto& g0 = traj.gens[0];
    g0.labels.resize(g0.positions.size());
    for (std::size_t i = 0; i < g0.labels.size(); ++i)
        g0.labels[i] = Label{static_cast<std::int32_t>(i + 1), PathCode{}};
    for (std::size_t n = 1; n < traj.gens.size(); ++n) {
        auto& g = traj.gens[n];
        const auto& prev = traj.gens[n - 1];
        g.labels.resize(g.positions.size());
        for (std::size_t i = 0; i < g.labels.size(); ++i) {
            const Label& p = prev.labels[static_cast<std::size_t>(g.parent_rank[i])];
            g.labels[i] =
                Label{p.lineage, p.path.child(static_cast<int>(n) - 1, g.parent_branch[i])};
        }
    }
}

void write_trajectory_jsonl(const Trajectory& traj, std::ostream& out) {
    out << header_json(traj).dump() << '\n';
    const long n = traj.n_particles();
    for (int m = 1; m <= traj.duration(); ++m) {
        const Generation& g = traj.gens[m];
        std::vector<double> jumps(2 * static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i)
            for (int b = 1; b <= 2; ++b)
                jumps[static_cast<std::size_t>(i) * 2 + (b - 1)] =
                    traj.jump(static_cast<int>(i) + 1, b, m - 1);
        json line{{"gen", m},
                  {"positions", g.positions},
                  {"parent_rank", g.parent_rank},
                  {"parent_branch", g.parent_branch},
                  {"jumps_prev", jumps}};
        out << line.dump() << '\n';
    }
}

Trajectory read_trajectory_jsonl(std::istream& in) {
    Trajectory traj;
    std::string line;
    if (!std::getline(in, line)) throw parse_error("empty trajectory file");
    json h;
    try {
        h = json::parse(line);
    } catch (const json::exception& e) {
        throw parse_error(std::string("trajectory header: ") + e.what());
    }
    apply_header(traj, h);
    const long n = static_cast<long>(traj.initial.size());
    const int t = h.at("t").get<int>();

    Generation g0;
    g0.index = 0;
    g0.positions = traj.initial;
    traj.gens.push_back(std::move(g0));
    traj.jump_table.assign(static_cast<std::size_t>(t) * 2 * n, 0.0);

    int lineno = 1;
    for (int m = 1; m <= t; ++m) {
        if (!std::getline(in, line))
            throw parse_error("trajectory truncated at generation " + std::to_string(m));
        ++lineno;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw parse_error("line " + std::to_string(lineno) + ": " + e.what());
        }
        Generation g;
        g.index = m;
        g.positions = rec.at("positions").get<std::vector<double>>();
        g.parent_rank = rec.at("parent_rank").get<std::vector<std::int32_t>>();
        g.parent_branch = rec.at("parent_branch").get<std::vector<std::uint8_t>>();
        const auto jumps = rec.at("jumps_prev").get<std::vector<double>>();
        if (g.positions.size() != static_cast<std::size_t>(n) ||
            jumps.size() != 2 * static_cast<std::size_t>(n))
            throw parse_error("line " + std::to_string(lineno) + ": wrong record width");
        std::copy(jumps.begin(), jumps.end(),
                  traj.jump_table.begin() + static_cast<std::size_t>(m - 1) * 2 * n);
        traj.gens.push_back(std::move(g));
    }
    recompute_labels(traj);
    return traj;
}

void write_trajectory_binary(const Trajectory& traj, std::ostream& out) {
    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, traj.law.family == TailFamily::pareto ? 0u : 1u);
    put<double>(out, traj.law.alpha);
    put<std::int64_t>(out, traj.n_particles());
    put<std::int32_t>(out, traj.duration());
    put<std::uint64_t>(out, traj.seed);
    put<std::uint64_t>(out, traj.replicate);
    put_vec(out, traj.initial);
    for (int m = 1; m <= traj.duration(); ++m) {
        const Generation& g = traj.gens[m];
        put_vec(out, g.positions);
        put_vec(out, g.parent_rank);
        put_vec(out, g.parent_branch);
    }
    put_vec(out, traj.jump_table);
}

Trajectory read_trajectory_binary(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw parse_error("not a binary trajectory (bad magic)");
    Trajectory traj;
    const auto fam = get<std::uint32_t>(in);
    const auto alpha = get<double>(in);
    traj.law = TailLaw(fam == 0 ? TailFamily::pareto : TailFamily::pareto_log, alpha);
    const auto n = get<std::int64_t>(in);
    const auto t = get<std::int32_t>(in);
    traj.seed = get<std::uint64_t>(in);
    traj.replicate = get<std::uint64_t>(in);
    get_vec(in, traj.initial, static_cast<std::size_t>(n));
    traj.scales = make_scales(traj.law, static_cast<long>(n));

    Generation g0;
    g0.index = 0;
    g0.positions = traj.initial;
    traj.gens.push_back(std::move(g0));
    for (int m = 1; m <= t; ++m) {
        Generation g;
        g.index = m;
        get_vec(in, g.positions, static_cast<std::size_t>(n));
        get_vec(in, g.parent_rank, static_cast<std::size_t>(n));
        get_vec(in, g.parent_branch, static_cast<std::size_t>(n));
        traj.gens.push_back(std::move(g));
    }
    get_vec(in, traj.jump_table, static_cast<std::size_t>(t) * 2 * static_cast<std::size_t>(n));
    recompute_labels(traj);
    return traj;
}

void save_trajectory(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parse_error("cannot open " + path + " for writing");
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0)
        write_trajectory_binary(traj, out);
    else
        write_trajectory_jsonl(traj, out);
}

Trajectory load_trajectory(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open " + path);
    const int first = in.peek();
    if (first == 'N') return read_trajectory_binary(in);
    return read_trajectory_jsonl(in);
}

} // namespace nbrw
