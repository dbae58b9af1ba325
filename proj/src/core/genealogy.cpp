#include "core/genealogy.hpp"

#include <algorithm>

namespace nbrw {

namespace {

void check_time_rank(const Trajectory& traj, int rank, int time) {
    if (time < 0 || time > traj.duration())
        throw domain_error("time out of range");
    if (rank < 1 || rank > traj.n_particles())
        throw domain_error("rank out of range");
}

} // namespace

int ancestor_index(const Trajectory& traj, int rank, int m, int n) {
    check_time_rank(traj, rank, m);
    if (n < 0 || n > m) throw domain_error("ancestor time must satisfy 0 <= n <= m");
    int r = rank;
    for (int s = m; s > n; --s) r = traj.parent_of(r, s);
    return r;
}

std::vector<std::int32_t> descendants(const Trajectory& traj, int rank, int n, int k) {
    check_time_rank(traj, rank, n);
    if (k < n || k > traj.duration()) throw domain_error("descendant time must satisfy n <= k <= t");
    std::vector<std::int32_t> out;
    for (int j = 1; j <= traj.n_particles(); ++j)
        if (ancestor_index(traj, j, k, n) == rank) out.push_back(j);
    return out;
}

std::vector<std::int32_t> descendants_branch(const Trajectory& traj, int rank, int branch, int n,
                                             int k) {
    check_time_rank(traj, rank, n);
    if (branch != 1 && branch != 2) throw domain_error("branch must be 1 or 2");
    if (k <= n || k > traj.duration())
        throw domain_error("branch descendants need n < k <= t");
    std::vector<std::int32_t> out;
    for (int j = 1; j <= traj.n_particles(); ++j) {
        const int a1 = ancestor_index(traj, j, k, n + 1);
        if (traj.parent_of(a1, n + 1) == rank && traj.branch_of(a1, n + 1) == branch)
            out.push_back(j);
    }
    return out;
}

std::vector<PathStep> lineage_path(const Trajectory& traj, int i0, int n, int ik, int nk) {
    check_time_rank(traj, i0, n);
    check_time_rank(traj, ik, nk);
    if (n >= nk) throw domain_error("path requires n < nk");
    std::vector<PathStep> rev;
    int r = ik;
    for (int s = nk; s > n; --s) {
        const int parent = traj.parent_of(r, s);
        rev.push_back(PathStep{static_cast<std::int32_t>(parent),
                               static_cast<std::uint8_t>(traj.branch_of(r, s)), s - 1,
                               traj.jump(parent, traj.branch_of(r, s), s - 1)});
        r = parent;
    }
    if (r != i0) return {};
    std::reverse(rev.begin(), rev.end());
    return rev;
}

std::vector<std::int32_t> sample_uniform(const Trajectory& traj, int t, int m_sample,
                                         std::uint64_t seed) {
    if (t < 0 || t > traj.duration()) throw domain_error("sample time out of range");
    const long n = traj.n_particles();
    if (m_sample < 1 || m_sample > n) throw domain_error("sample size must satisfy 1 <= M <= N");

    // Partial Fisher-Yates over [1, N] with counter-keyed uniforms; the swap
    // targets only ever touch the first M slots plus the sparse remainder.
    std::vector<std::int32_t> ids(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(i + 1);
    for (int i = 0; i < m_sample; ++i) {
        const std::uint64_t bits =
            keyed_bits(seed, StreamDomain::sample, traj.replicate, static_cast<std::uint64_t>(t),
                       static_cast<std::uint64_t>(i));
        const auto span = static_cast<std::uint64_t>(n - i);
        const auto off = static_cast<long>(bits % span);
        std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(i + off)]);
    }
    ids.resize(static_cast<std::size_t>(m_sample));
    std::sort(ids.begin(), ids.end());
    return ids;
}

CoalescenceProfile coalescence_profile(const Trajectory& traj,
                                       const std::vector<std::int32_t>& sample, int t) {
    const int m = static_cast<int>(sample.size());
    if (m < 1) throw domain_error("sample must be non-empty");
    for (auto r : sample) check_time_rank(traj, r, t);

    CoalescenceProfile prof;
    prof.sample = sample;
    prof.pairwise.assign(static_cast<std::size_t>(m),
                         std::vector<int>(static_cast<std::size_t>(m), -1));

    // Synchronised backward walks: advance every lineage one generation at a
    // time and record, per pair, the last time the two ranks agreed.
    std::vector<int> cur(sample.begin(), sample.end());
    for (int i = 0; i < m; ++i) prof.pairwise[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = t;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (cur[static_cast<std::size_t>(i)] == cur[static_cast<std::size_t>(j)]) {
                prof.pairwise[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = t;
                prof.pairwise[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = t;
            }
    for (int s = t; s > 0; --s) {
        for (int i = 0; i < m; ++i)
            cur[static_cast<std::size_t>(i)] = traj.parent_of(cur[static_cast<std::size_t>(i)], s);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                auto& pij = prof.pairwise[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (pij < 0 && cur[static_cast<std::size_t>(i)] == cur[static_cast<std::size_t>(j)]) {
                    pij = s - 1;
                    prof.pairwise[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = s - 1;
                }
            }
    }

    bool all = true;
    int lo = t, hi = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const int v = prof.pairwise[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (v < 0)
                all = false;
            else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    if (m == 1) {
        prof.mrca_time = t;
        prof.mrca_rank = sample[0];
        prof.star_spread = 0;
        return prof;
    }
    if (all) {
        prof.mrca_time = lo;
        prof.mrca_rank = ancestor_index(traj, sample[0], t, lo);
        prof.star_spread = hi - lo;
    }
    return prof;
}

} // namespace nbrw
