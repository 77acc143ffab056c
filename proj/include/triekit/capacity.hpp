#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace triekit {

// f(l) = floor(2^((3/2)^l)) for every l whose value fits in 64 bits.
inline constexpr std::array<std::uint64_t, 11> kCapacityTable = {
    2ULL, 2ULL, 4ULL, 10ULL, 33ULL, 193ULL, 2684ULL, 139116ULL, 51888311ULL,
    373769884171ULL, 228510656987187971ULL,
};

inline constexpr unsigned kMaxLevel = 10;
inline constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

[[nodiscard]] constexpr std::uint64_t capacity(unsigned level) noexcept {
    return level < kCapacityTable.size() ? kCapacityTable[level] : kUnbounded;
}

/// 2 f(level + 1): the weight at which a level-`level` structure must split.
/// The top level never splits.
[[nodiscard]] constexpr std::uint64_t split_weight(unsigned level) noexcept {
    return level + 1 < kCapacityTable.size() ? 2 * kCapacityTable[level + 1] : kUnbounded;
}

/// f(level) - f(level - 1), the lower bound on adjacent splitter groups.
[[nodiscard]] constexpr std::uint64_t group_floor(unsigned level) noexcept {
    return level == 0 ? 0 : capacity(level) - capacity(level - 1);
}

/// Smallest level whose split weight exceeds w.
[[nodiscard]] constexpr unsigned level_for_weight(std::uint64_t w) noexcept {
    unsigned l = 0;
    while (l < kMaxLevel && w >= split_weight(l)) ++l;
    return l;
}

[[nodiscard]] inline std::uint64_t ceil_sqrt(std::uint64_t w) noexcept {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(w)));
    while (r * r < w) ++r;
    while (r > 0 && (r - 1) * (r - 1) >= w) --r;
    return r;
}

}  // namespace triekit
