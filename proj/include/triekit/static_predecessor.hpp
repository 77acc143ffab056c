#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "det_dictionary.hpp"
#include "error.hpp"
#include "probes.hpp"

namespace triekit {

namespace detail {

inline void check_sorted_keys(const std::vector<std::uint64_t>& keys, std::uint64_t universe) {
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (keys[i] >= universe) {
            throw Error(ErrorCode::invalid_input,
                        "key " + std::to_string(keys[i]) + " outside universe " + std::to_string(universe));
        }
        if (i > 0 && keys[i] <= keys[i - 1]) {
            throw Error(ErrorCode::invalid_input, "keys not strictly increasing at index " + std::to_string(i));
        }
    }
}

}  // namespace detail

/// Static predecessor search over sorted keys from [0, u).
///
/// Every `sample_rate`-th key goes into an x-fast trie whose prefixes live in
/// one DetDictionary; a query binary searches over prefix lengths to find the
/// sampled predecessor and then binary searches the block of keys that
/// follows it. Both phases take O(lg lg u) steps, and the trie holds
/// O(k / rate * lg u) = O(k) prefixes for the default rate of ceil(lg u).
class StaticPredecessor {
public:
    using Key = std::uint64_t;

    static constexpr unsigned kMaxUniverseBits = 57;

    StaticPredecessor() = default;

    /// `sample_rate == 0` selects the default of ceil(lg u).
    StaticPredecessor(std::vector<Key> keys, Key universe, std::size_t sample_rate = 0)
        : keys_(std::move(keys)) {
        detail::check_sorted_keys(keys_, universe);
        bits_ = std::max<unsigned>(1, static_cast<unsigned>(std::bit_width(universe > 0 ? universe - 1 : 0)));
        if (bits_ > kMaxUniverseBits) {
            throw Error(ErrorCode::invalid_input, "universe wider than 2^57 is not supported");
        }
        rate_ = sample_rate ? sample_rate : bits_;
        build_trie();
    }

    [[nodiscard]] std::size_t size() const noexcept { return keys_.size(); }
    [[nodiscard]] bool empty() const noexcept { return keys_.empty(); }
    [[nodiscard]] const std::vector<Key>& keys() const noexcept { return keys_; }
    [[nodiscard]] Key key(std::size_t i) const { return keys_[i]; }
    [[nodiscard]] std::size_t sample_rate() const noexcept { return rate_; }
    [[nodiscard]] unsigned universe_bits() const noexcept { return bits_; }

    /// Index of max{y <= x}, or nullopt if x is below every key.
    [[nodiscard]] std::optional<std::size_t> pred_index(Key x) const {
        auto& pc = probes();
        ++pc.static_pred_queries;
        if (keys_.empty()) return std::nullopt;
        const Key top = (Key{1} << bits_) - 1;
        if (x > top) x = top;

        // Longest prefix of x present in the trie. The empty prefix covers
        // every sample and needs no lookup.
        unsigned lo = 0, hi = bits_;
        std::uint64_t range = root_range_;
        while (lo < hi) {
            const unsigned mid = (lo + hi + 1) / 2;
            auto r = trie_.find(prefix_key(x, mid));
            pc.static_pred_probes += DetDictionary<std::uint64_t>::kMaxProbes;
            if (r) {
                lo = mid;
                range = *r;
            } else {
                hi = mid - 1;
            }
        }
        const std::size_t mn = static_cast<std::size_t>(range >> 32);
        const std::size_t mx = static_cast<std::size_t>(range & 0xffffffffu);
        std::size_t sample;
        if (lo == bits_) {
            sample = mn;
        } else if ((x >> (bits_ - lo - 1)) & 1) {
            // The 1-branch is missing, so everything below this prefix is < x.
            sample = mx;
        } else {
            if (mn == 0) return std::nullopt;
            sample = mn - 1;
        }

        std::size_t first = sample * rate_;
        std::size_t last = std::min(keys_.size(), first + rate_);
        // keys_[first] <= x < keys_[last]
        while (last - first > 1) {
            const std::size_t mid = first + (last - first) / 2;
            ++pc.static_pred_probes;
            if (keys_[mid] <= x) first = mid;
            else last = mid;
        }
        return first;
    }

    [[nodiscard]] std::optional<Key> pred(Key x) const {
        auto i = pred_index(x);
        if (!i) return std::nullopt;
        return keys_[*i];
    }

private:
    [[nodiscard]] Key prefix_key(Key x, unsigned level) const noexcept {
        const Key prefix = level == 0 ? 0 : (x >> (bits_ - level));
        return (prefix << 6) | level;
    }

    void build_trie() {
        if (keys_.empty()) return;
        const std::size_t samples = (keys_.size() + rate_ - 1) / rate_;
        std::vector<std::pair<std::uint64_t, std::uint64_t>> entries;
        root_range_ = samples - 1;
        entries.reserve(samples * bits_);
        for (unsigned level = 1; level <= bits_; ++level) {
            Key current = 0;
            bool open = false;
            std::uint64_t mn = 0;
            for (std::size_t j = 0; j < samples; ++j) {
                const Key k = prefix_key(keys_[j * rate_], level);
                if (!open || k != current) {
                    if (open) entries.emplace_back(current, (mn << 32) | (j - 1));
                    current = k;
                    mn = j;
                    open = true;
                }
            }
            entries.emplace_back(current, (mn << 32) | (samples - 1));
        }
        trie_.build(std::move(entries));
    }

    std::vector<Key> keys_;
    unsigned bits_ = 1;
    std::size_t rate_ = 1;
    std::uint64_t root_range_ = 0;
    // (prefix << 6 | level) -> (first sample index << 32 | last sample index)
    DetDictionary<std::uint64_t> trie_;
};

/// Two-level indirection: about sqrt(k) evenly spaced keys go into a top
/// structure, and the keys strictly between consecutive chosen keys form
/// separately built groups. Same contract as StaticPredecessor.
template <typename Inner = StaticPredecessor>
class LayeredPredecessor {
public:
    using Key = std::uint64_t;

    LayeredPredecessor() = default;

    LayeredPredecessor(std::vector<Key> keys, Key universe) : keys_(std::move(keys)) {
        detail::check_sorted_keys(keys_, universe);
        if (keys_.empty()) {
            top_ = Inner({}, universe);
            return;
        }
        step_ = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(keys_.size()))));
        std::vector<Key> chosen;
        for (std::size_t i = 0; i < keys_.size(); i += step_) chosen.push_back(keys_[i]);
        top_ = Inner(std::move(chosen), universe);
        for (std::size_t i = 0; i < keys_.size(); i += step_) {
            const std::size_t end = std::min(keys_.size(), i + step_);
            groups_.emplace_back(std::vector<Key>(keys_.begin() + static_cast<std::ptrdiff_t>(i + 1),
                                                  keys_.begin() + static_cast<std::ptrdiff_t>(end)),
                                 universe);
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return keys_.size(); }
    [[nodiscard]] bool empty() const noexcept { return keys_.empty(); }
    [[nodiscard]] const std::vector<Key>& keys() const noexcept { return keys_; }
    [[nodiscard]] Key key(std::size_t i) const { return keys_[i]; }

    [[nodiscard]] std::optional<std::size_t> pred_index(Key x) const {
        auto block = top_.pred_index(x);
        if (!block) return std::nullopt;
        const std::size_t base = *block * step_;
        auto inner = groups_[*block].pred_index(x);
        // Nothing in the group is <= x: the chosen key itself is the answer.
        if (!inner) return base;
        return base + 1 + *inner;
    }

    [[nodiscard]] std::optional<Key> pred(Key x) const {
        auto i = pred_index(x);
        if (!i) return std::nullopt;
        return keys_[*i];
    }

private:
    std::vector<Key> keys_;
    std::size_t step_ = 1;
    Inner top_;
    std::vector<Inner> groups_;
};

using LayeredStaticPredecessor = LayeredPredecessor<StaticPredecessor>;

}  // namespace triekit
