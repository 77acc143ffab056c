#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace triekit {

/// Character code. 0 is the sentinel and never appears in user data.
using Code = std::uint32_t;
inline constexpr Code kSentinel = 0;

struct Alphabet {
    std::uint32_t sigma = 256;

    [[nodiscard]] constexpr bool contains(Code c) const noexcept { return c >= 1 && c <= sigma; }
};

/// An integer-coded text. The sentinel is implicit and not stored.
struct Text {
    std::vector<Code> codes;
    Alphabet alphabet;

    [[nodiscard]] std::size_t size() const noexcept { return codes.size(); }
    [[nodiscard]] bool empty() const noexcept { return codes.empty(); }
    [[nodiscard]] Code operator[](std::size_t i) const noexcept { return codes[i]; }

    /// Copy of the codes with the sentinel appended.
    [[nodiscard]] std::vector<Code> terminated() const {
        std::vector<Code> out(codes);
        out.push_back(kSentinel);
        return out;
    }
};

inline void check_codes(std::span<const Code> codes, Alphabet alphabet) {
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (!alphabet.contains(codes[i])) {
            throw Error(ErrorCode::alphabet_overflow,
                        "code " + std::to_string(codes[i]) + " at offset " + std::to_string(i) +
                            " outside [1, " + std::to_string(alphabet.sigma) + "]");
        }
    }
}

/// Byte coding: byte b maps to b - base + 1, preserving byte order.
[[nodiscard]] inline Text encode_text(std::string_view raw, std::uint32_t sigma, unsigned char base = 0) {
    Text t;
    t.alphabet = Alphabet{sigma};
    t.codes.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto b = static_cast<unsigned char>(raw[i]);
        if (b < base) {
            throw Error(ErrorCode::alphabet_overflow,
                        "byte " + std::to_string(b) + " at offset " + std::to_string(i) + " below base");
        }
        t.codes.push_back(static_cast<Code>(b - base) + 1);
    }
    check_codes(t.codes, t.alphabet);
    return t;
}

[[nodiscard]] inline Text encode_codes(std::vector<Code> codes, std::uint32_t sigma) {
    Text t{std::move(codes), Alphabet{sigma}};
    check_codes(t.codes, t.alphabet);
    return t;
}

[[nodiscard]] inline std::string decode_text(std::span<const Code> codes, unsigned char base = 0) {
    std::string out;
    out.reserve(codes.size());
    for (Code c : codes) {
        if (c == kSentinel) break;
        out.push_back(static_cast<char>(c - 1 + base));
    }
    return out;
}

}  // namespace triekit
