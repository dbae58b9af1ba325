#include "core/rng.hpp"

namespace nbrw {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline std::uint32_t mulhi32(std::uint32_t a, std::uint32_t b) {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) >> 32);
}

inline void philox_round(std::array<std::uint32_t, 4>& c, const std::array<std::uint32_t, 2>& k) {
    const std::uint32_t hi0 = mulhi32(kPhiloxM0, c[0]);
    const std::uint32_t lo0 = kPhiloxM0 * c[0];
    const std::uint32_t hi1 = mulhi32(kPhiloxM1, c[2]);
    const std::uint32_t lo1 = kPhiloxM1 * c[2];
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        philox_round(ctr, key);
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

namespace {

inline std::uint64_t run_block(std::uint64_t key64, std::uint64_t ctr_lo, std::uint64_t ctr_hi) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(ctr_lo), static_cast<std::uint32_t>(ctr_lo >> 32),
        static_cast<std::uint32_t>(ctr_hi), static_cast<std::uint32_t>(ctr_hi >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(key64),
                                              static_cast<std::uint32_t>(key64 >> 32)};
    const auto out = philox4x32(ctr, key);
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

} // namespace

std::uint64_t keyed_bits(std::uint64_t seed, StreamDomain domain, const JumpKey& key) {
    std::uint64_t k = splitmix64(seed);
    k = splitmix64(k ^ key.replicate);
    k = splitmix64(k ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(key.lineage)) |
                        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(key.depth)) << 32)));
    k = splitmix64(k ^ static_cast<std::uint64_t>(domain));
    return run_block(k, key.path.lo, key.path.hi);
}

std::uint64_t keyed_bits(std::uint64_t seed, StreamDomain domain, std::uint64_t replicate,
                         std::uint64_t a, std::uint64_t b) {
    std::uint64_t k = splitmix64(seed);
    k = splitmix64(k ^ replicate);
    k = splitmix64(k ^ static_cast<std::uint64_t>(domain));
    return run_block(k, a, b);
}

} // namespace nbrw
