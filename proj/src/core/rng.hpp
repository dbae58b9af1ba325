#pragma once

#include <array>
#include <cstdint>

#include "core/pathcode.hpp"

namespace nbrw {

// Philox4x32-10 counter-based generator. One block of the keyed permutation
// gives 128 output bits; every draw in the toolkit is one block addressed by
// (key, counter), so identical addresses always reproduce identical values
// and distinct addresses are independent for all practical purposes.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

// Separate key domains keep the jump stream and the sampling stream disjoint.
enum class StreamDomain : std::uint32_t {
    jump = 0x4a55u,
    sample = 0x5a4du,
    scratch = 0x3c77u,
};

// Addresses the jump Y_{j,u} of a replicate's tree. The counter carries the
// full 128-bit path; lineage, depth, replicate and seed are folded into the
// key so that equal (seed, replicate, j, u) always yields the same uniform.
struct JumpKey {
    std::uint64_t replicate = 0;
    std::int32_t lineage = 0;
    int depth = 0; // |u|
    PathCode path;
};

std::uint64_t keyed_bits(std::uint64_t seed, StreamDomain domain, const JumpKey& key);

// Generic counter stream for non-tree draws (uniform sampling etc.).
std::uint64_t keyed_bits(std::uint64_t seed, StreamDomain domain, std::uint64_t replicate,
                         std::uint64_t a, std::uint64_t b);

// Maps 64 random bits to the open interval (0, 1).
inline double bits_to_open_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

inline double keyed_uniform(std::uint64_t seed, StreamDomain domain, const JumpKey& key) {
    return bits_to_open_unit(keyed_bits(seed, domain, key));
}

} // namespace nbrw
