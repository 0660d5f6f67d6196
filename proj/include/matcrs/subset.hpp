#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace matcrs {

// Subsets of a ground set {0,...,n-1} are uint64_t bitmasks; n is capped at
// 63 so that (1<<n) never overflows. Exhaustive routines carry their own,
// smaller caps.
using Mask = std::uint64_t;

constexpr int kMaxGroundSet = 63;

inline constexpr Mask bit(int i) { return Mask{1} << i; }
inline constexpr bool has(Mask s, int i) { return (s >> i) & 1u; }
inline constexpr int popcount(Mask s) { return std::popcount(s); }
inline constexpr Mask full_mask(int n) { return n == 0 ? 0 : (~Mask{0} >> (64 - n)); }

inline Mask mask_of(const std::vector<int>& elems) {
    Mask s = 0;
    for (int e : elems) s |= bit(e);
    return s;
}

inline std::vector<int> elements(Mask s) {
    std::vector<int> out;
    while (s != 0) {
        out.push_back(std::countr_zero(s));
        s &= s - 1;
    }
    return out;
}

/// Calls f on every subset of `universe`, in increasing bitmask order.
template <typename F>
void for_each_subset(Mask universe, F&& f) {
    // Ascending order keeps argmax witnesses deterministic: the first
    // maximizer found is the smallest bitmask.
    Mask s = 0;
    while (true) {
        f(s);
        if (s == universe) break;
        s = (s - universe) & universe;  // next subset in ascending mask order
    }
}

inline std::string mask_to_string(Mask s) {
    std::string out = "{";
    bool first = true;
    for (int e : elements(s)) {
        if (!first) out += ",";
        out += std::to_string(e);
        first = false;
    }
    return out + "}";
}

}  // namespace matcrs
