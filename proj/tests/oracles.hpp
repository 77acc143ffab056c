#pragma once

// Brute-force reference implementations shared by the unit and acceptance
// tests. Everything here is deliberately naive.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "triekit/compacted_trie.hpp"
#include "triekit/text.hpp"

namespace oracle {

using triekit::Code;
using triekit::Text;

inline Text random_text(std::mt19937_64& rng, std::size_t n, std::uint32_t sigma) {
    Text t;
    t.alphabet.sigma = sigma;
    t.codes.resize(n);
    for (auto& c : t.codes) c = 1 + static_cast<Code>(rng() % sigma);
    return t;
}

// Text with repeats: built by copying earlier chunks, so suffix trees get deep.
inline Text repetitive_text(std::mt19937_64& rng, std::size_t n, std::uint32_t sigma) {
    Text t;
    t.alphabet.sigma = sigma;
    while (t.codes.size() < n) {
        if (t.codes.size() > 4 && rng() % 2) {
            const std::size_t from = rng() % t.codes.size();
            const std::size_t len = 1 + rng() % std::min<std::size_t>(64, t.codes.size() - from);
            for (std::size_t i = 0; i < len && t.codes.size() < n; ++i) t.codes.push_back(t.codes[from + i]);
        } else {
            t.codes.push_back(1 + static_cast<Code>(rng() % sigma));
        }
    }
    return t;
}

inline std::vector<std::uint64_t> naive_suffix_array(const Text& t) {
    const auto s = t.terminated();
    std::vector<std::uint64_t> sa(s.size());
    for (std::size_t i = 0; i < sa.size(); ++i) sa[i] = i;
    std::sort(sa.begin(), sa.end(), [&](std::uint64_t a, std::uint64_t b) {
        return std::lexicographical_compare(s.begin() + static_cast<std::ptrdiff_t>(a), s.end(),
                                            s.begin() + static_cast<std::ptrdiff_t>(b), s.end());
    });
    return sa;
}

inline std::vector<std::uint64_t> naive_lcp(const Text& t, const std::vector<std::uint64_t>& sa) {
    const auto s = t.terminated();
    std::vector<std::uint64_t> lcp(sa.size(), 0);
    for (std::size_t i = 1; i < sa.size(); ++i) {
        std::uint64_t h = 0;
        while (sa[i] + h < s.size() && sa[i - 1] + h < s.size() && s[sa[i] + h] == s[sa[i - 1] + h]) ++h;
        lcp[i] = h;
    }
    return lcp;
}

// Suffix tree by inserting every suffix into a compacted trie.
inline triekit::CompactedTrie naive_suffix_tree(const Text& t) {
    triekit::CompactedTrie trie;
    const auto id = trie.add_terminated_string(t.terminated());
    for (std::uint64_t i = 0; i <= t.size(); ++i) trie.insert(triekit::LeafRef{id, i}, i);
    trie.finalize();
    return trie;
}

// Sorted collection of sentinel-terminated strings with brute-force queries.
struct SortedStrings {
    std::vector<std::vector<Code>> items;  // terminated, sorted
    std::vector<std::uint64_t> ids;        // leaf id per rank

    static SortedStrings of_suffixes(const Text& t) {
        SortedStrings out;
        const auto s = t.terminated();
        for (std::uint64_t i = 0; i < s.size(); ++i) {
            out.items.emplace_back(s.begin() + static_cast<std::ptrdiff_t>(i), s.end());
            out.ids.push_back(i);
        }
        out.sort();
        return out;
    }

    static SortedStrings of_strings(const std::vector<std::vector<Code>>& v) {
        SortedStrings out;
        for (std::uint64_t i = 0; i < v.size(); ++i) {
            auto s = v[i];
            s.push_back(triekit::kSentinel);
            out.items.push_back(std::move(s));
            out.ids.push_back(i);
        }
        out.sort();
        return out;
    }

    void sort() {
        std::vector<std::size_t> ord(items.size());
        for (std::size_t i = 0; i < ord.size(); ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return items[a] < items[b]; });
        std::vector<std::vector<Code>> it2;
        std::vector<std::uint64_t> id2;
        for (std::size_t i : ord) {
            it2.push_back(items[i]);
            id2.push_back(ids[i]);
        }
        items.swap(it2);
        ids.swap(id2);
    }

    struct Prefix {
        bool found = false;
        std::uint64_t lo = 0, hi = 0, matched_len = 0;
    };

    [[nodiscard]] Prefix prefix(const std::vector<Code>& p) const {
        Prefix out;
        for (std::size_t r = 0; r < items.size(); ++r) {
            std::uint64_t h = 0;
            while (h < p.size() && h < items[r].size() && items[r][h] == p[h]) ++h;
            out.matched_len = std::max(out.matched_len, h);
            if (h == p.size()) {
                if (!out.found) out.lo = r;
                out.found = true;
                out.hi = r;
            }
        }
        return out;
    }

    // Largest rank whose string is <= p + sentinel.
    [[nodiscard]] std::optional<std::uint64_t> predecessor(const std::vector<Code>& p) const {
        auto key = p;
        key.push_back(triekit::kSentinel);
        std::optional<std::uint64_t> best;
        for (std::size_t r = 0; r < items.size(); ++r) {
            if (items[r] <= key) best = r;
        }
        return best;
    }
};

// Pattern generator: substrings of the stored data, random strings, and
// stored prefixes with a mutated tail.
inline std::vector<Code> random_pattern(std::mt19937_64& rng, const std::vector<std::vector<Code>>& pool,
                                        std::uint32_t sigma) {
    const int kind = static_cast<int>(rng() % 4);
    if (pool.empty() || kind == 0) {
        std::vector<Code> p(rng() % 8);
        for (auto& c : p) c = 1 + static_cast<Code>(rng() % sigma);
        return p;
    }
    const auto& s = pool[rng() % pool.size()];
    std::size_t real = s.size();
    while (real > 0 && s[real - 1] == triekit::kSentinel) --real;
    const std::size_t from = real ? rng() % (real + 1) : 0;
    const std::size_t len = real - from ? rng() % (real - from + 1) : 0;
    std::vector<Code> p(s.begin() + static_cast<std::ptrdiff_t>(from),
                        s.begin() + static_cast<std::ptrdiff_t>(from + len));
    if (kind == 2 && !p.empty()) p.back() = 1 + static_cast<Code>(rng() % sigma);
    if (kind == 3) p.push_back(1 + static_cast<Code>(rng() % sigma));
    return p;
}

}  // namespace oracle
