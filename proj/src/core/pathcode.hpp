#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "core/errors.hpp"

namespace nbrw {

// A vertex of the binary genealogy tree, encoded as the branch choices taken
// from the root. Level l (root = level 0) occupies bit (127 - l), so paths of
// equal depth compare lexicographically by plain numeric comparison, branch 1
// before branch 2. Depth is tracked by the caller (it equals the generation).
struct PathCode {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    static constexpr int max_depth = 128;

    PathCode child(int level, int branch) const {
        if (level < 0 || level >= max_depth)
            throw capacity_error("path depth exceeds " + std::to_string(max_depth) + " generations");
        PathCode c = *this;
        if (branch == 2) {
            if (level < 64)
                c.hi |= (std::uint64_t{1} << (63 - level));
            else
                c.lo |= (std::uint64_t{1} << (127 - level));
        }
        return c;
    }

    int branch_at(int level) const {
        std::uint64_t bit = level < 64 ? (hi >> (63 - level)) & 1u : (lo >> (127 - level)) & 1u;
        return bit ? 2 : 1;
    }

    friend auto operator<=>(const PathCode&, const PathCode&) = default;

    std::string to_string(int depth) const {
        std::string s;
        s.reserve(static_cast<std::size_t>(depth));
        for (int l = 0; l < depth; ++l) s.push_back(branch_at(l) == 1 ? '1' : '2');
        return s;
    }
};

// Tree coordinates (j, u) of one particle: initial lineage plus tree path.
struct Label {
    std::int32_t lineage = 0;
    PathCode path;

    friend auto operator<=>(const Label&, const Label&) = default;
};

} // namespace nbrw
