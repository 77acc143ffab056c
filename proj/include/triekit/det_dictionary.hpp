#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "error.hpp"
#include "probes.hpp"

namespace triekit {

namespace detail {

[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

}  // namespace detail

/// Static dictionary with constant-probe lookups and a deterministic build.
///
/// Keys are split into buckets by a fixed mix function; each bucket then gets
/// the smallest displacement that sends all of its keys to free cells of the
/// table. A lookup reads one displacement and one table cell, so every lookup
/// touches exactly two cells regardless of the number of keys.
///
/// `lookup` bumps the shared dict_probes counter once per call; `find` is the
/// same operation without bumping dict_probes (cells are always counted), for use inside other structures.
template <typename Value = std::uint32_t>
class DetDictionary {
public:
    using Key = std::uint64_t;

    static constexpr std::size_t kMaxProbes = 2;

    DetDictionary() = default;

    explicit DetDictionary(std::vector<std::pair<Key, Value>> pairs) { build(std::move(pairs)); }

    void build(std::vector<std::pair<Key, Value>> pairs) {
        std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < pairs.size(); ++i) {
            if (pairs[i].first == pairs[i - 1].first) {
                throw Error(ErrorCode::duplicate_key, "dictionary key " + std::to_string(pairs[i].first));
            }
        }
        size_ = pairs.size();
        disp_.clear();
        keys_.clear();
        values_.clear();
        used_.clear();
        if (pairs.empty()) return;
        std::size_t table = std::max<std::size_t>(2, 2 * pairs.size());
        while (!try_build(pairs, table)) table = table * 2 + 1;
    }

    [[nodiscard]] std::optional<Value> lookup(Key key) const {
        probes().dict_probes += 1;
        return find(key);
    }

    [[nodiscard]] std::optional<Value> find(Key key) const {
        if (size_ == 0) return std::nullopt;
        probes().dict_cells += kMaxProbes;
        const std::uint64_t d = disp_[bucket_of(key)];
        const std::size_t slot = slot_of(key, d, keys_.size());
        if (used_[slot] && keys_[slot] == key) return values_[slot];
        return std::nullopt;
    }

    [[nodiscard]] bool contains(Key key) const { return find(key).has_value(); }

    /// Replaces the value stored for an existing key. Returns false if absent.
    bool assign(Key key, Value value) {
        if (size_ == 0) return false;
        const std::size_t slot = slot_of(key, disp_[bucket_of(key)], keys_.size());
        if (!used_[slot] || keys_[slot] != key) return false;
        values_[slot] = value;
        return true;
    }

    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] bool empty() const noexcept { return size_ == 0; }
    [[nodiscard]] std::size_t table_size() const noexcept { return keys_.size(); }

    [[nodiscard]] std::vector<std::pair<Key, Value>> entries() const {
        std::vector<std::pair<Key, Value>> out;
        out.reserve(size_);
        for (std::size_t i = 0; i < keys_.size(); ++i) {
            if (used_[i]) out.emplace_back(keys_[i], values_[i]);
        }
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        return out;
    }

private:
    [[nodiscard]] std::size_t bucket_of(Key key) const noexcept {
        return detail::mix64(key ^ 0x2545f4914f6cdd1dULL) % disp_.size();
    }

    [[nodiscard]] static std::size_t slot_of(Key key, std::uint64_t d, std::size_t m) noexcept {
        return detail::mix64(key + (d + 1) * 0x9e3779b97f4a7c15ULL) % m;
    }

    bool try_build(const std::vector<std::pair<Key, Value>>& pairs, std::size_t table) {
        constexpr std::uint64_t kMaxDisplacement = 1u << 16;
        const std::size_t nb = std::max<std::size_t>(1, pairs.size());
        disp_.assign(nb, 0);
        keys_.assign(table, 0);
        values_.assign(table, Value{});
        used_.assign(table, false);

        std::vector<std::vector<std::size_t>> buckets(nb);
        for (std::size_t i = 0; i < pairs.size(); ++i) buckets[bucket_of(pairs[i].first)].push_back(i);
        std::vector<std::size_t> order(nb);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return buckets[a].size() > buckets[b].size(); });

        std::vector<std::size_t> slots;
        for (std::size_t b : order) {
            const auto& members = buckets[b];
            if (members.empty()) break;
            bool placed = false;
            for (std::uint64_t d = 0; d < kMaxDisplacement && !placed; ++d) {
                slots.clear();
                bool ok = true;
                for (std::size_t i : members) {
                    const std::size_t s = slot_of(pairs[i].first, d, table);
                    if (used_[s] || std::find(slots.begin(), slots.end(), s) != slots.end()) {
                        ok = false;
                        break;
                    }
                    slots.push_back(s);
                }
                if (!ok) continue;
                for (std::size_t j = 0; j < members.size(); ++j) {
                    used_[slots[j]] = true;
                    keys_[slots[j]] = pairs[members[j]].first;
                    values_[slots[j]] = pairs[members[j]].second;
                }
                disp_[b] = d;
                placed = true;
            }
            if (!placed) return false;
        }
        return true;
    }

    std::size_t size_ = 0;
    std::vector<std::uint64_t> disp_;
    std::vector<Key> keys_;
    std::vector<Value> values_;
    std::vector<bool> used_;
};

}  // namespace triekit
