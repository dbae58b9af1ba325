#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/engine.hpp"

namespace nbrw {

// All ranks are 1-based and all queries are read-only over an immutable
// trajectory, so everything here is safe to call concurrently.

// zeta_{i,m}(n): rank of the time-n ancestor of particle (i, m).
int ancestor_index(const Trajectory& traj, int rank, int m, int n);

// Descendant set of (rank, n) at time k, ascending.
std::vector<std::int32_t> descendants(const Trajectory& traj, int rank, int n, int k);
// Descendants reached through offspring branch b only.
std::vector<std::int32_t> descendants_branch(const Trajectory& traj, int rank, int branch, int n,
                                             int k);

struct PathStep {
    std::int32_t rank; // ancestor rank at `time`
    std::uint8_t branch;
    int time;
    double jump;
};

// The jump sequence connecting (i0, n) to (ik, nk); empty when (i0, n) is not
// an ancestor of (ik, nk).
std::vector<PathStep> lineage_path(const Trajectory& traj, int i0, int n, int ik, int nk);

// M distinct ranks at time t, uniform over M-subsets, drawn from the sampling
// key domain so the jump stream is untouched.
std::vector<std::int32_t> sample_uniform(const Trajectory& traj, int t, int m_sample,
                                         std::uint64_t seed);

struct CoalescenceProfile {
    std::vector<std::int32_t> sample;
    std::optional<int> mrca_time;
    std::optional<std::int32_t> mrca_rank;
    // pairwise[i][j]: most recent common ancestor time of sample i and j; -1
    // encodes "none" (no common ancestor inside the trajectory window).
    std::vector<std::vector<int>> pairwise;
    std::optional<int> star_spread; // max - min over distinct pairs; none if any pair is "none"
};

CoalescenceProfile coalescence_profile(const Trajectory& traj,
                                       const std::vector<std::int32_t>& sample, int t);

} // namespace nbrw
