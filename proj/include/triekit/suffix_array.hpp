#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "compacted_trie.hpp"
#include "text.hpp"

namespace triekit {

/// Suffix array over text + sentinel. sa[i] is a start position in [0, n];
/// lcp[i] is the common prefix length of suffixes sa[i-1] and sa[i], lcp[0] = 0.
struct SuffixArrayIndex {
    std::vector<std::uint64_t> sa;
    std::vector<std::uint64_t> lcp;
};

namespace detail {

// Prefix doubling with two radix passes per round. Ranks stay below n + 1 so
// the counting arrays are linear in the text length regardless of sigma.
inline std::vector<std::uint64_t> prefix_doubling(const std::vector<Code>& s) {
    const std::size_t n = s.size();
    std::vector<std::uint64_t> sa(n), rank(n), tmp(n), next(n);
    std::iota(sa.begin(), sa.end(), 0);
    std::sort(sa.begin(), sa.end(), [&](std::uint64_t a, std::uint64_t b) { return s[a] < s[b]; });
    rank[sa[0]] = 0;
    for (std::size_t i = 1; i < n; ++i) rank[sa[i]] = rank[sa[i - 1]] + (s[sa[i]] != s[sa[i - 1]]);
    std::vector<std::uint64_t> cnt(n + 1);
    for (std::size_t k = 1; rank[sa[n - 1]] + 1 < n; k <<= 1) {
        // Second key: rank[i + k] (or -1 past the end). Sorting by it is a
        // shift of the current order.
        std::size_t p = 0;
        for (std::size_t i = n - k; i < n; ++i) tmp[p++] = i;
        for (std::size_t i = 0; i < n; ++i) {
            if (sa[i] >= k) tmp[p++] = sa[i] - k;
        }
        std::fill(cnt.begin(), cnt.end(), 0);
        for (std::size_t i = 0; i < n; ++i) ++cnt[rank[i]];
        for (std::size_t i = 1; i <= n; ++i) cnt[i] += cnt[i - 1];
        for (std::size_t i = n; i-- > 0;) sa[--cnt[rank[tmp[i]]]] = tmp[i];
        next[sa[0]] = 0;
        for (std::size_t i = 1; i < n; ++i) {
            const std::uint64_t a = sa[i - 1], b = sa[i];
            const bool same = rank[a] == rank[b] &&
                              (a + k < n ? static_cast<std::int64_t>(rank[a + k]) : -1) ==
                                  (b + k < n ? static_cast<std::int64_t>(rank[b + k]) : -1);
            next[b] = next[a] + (same ? 0 : 1);
        }
        rank.swap(next);
    }
    return sa;
}

}  // namespace detail

[[nodiscard]] inline SuffixArrayIndex build_suffix_array(const Text& text) {
    const std::vector<Code> s = text.terminated();
    SuffixArrayIndex out;
    out.sa = detail::prefix_doubling(s);
    const std::size_t n = s.size();
    // Kasai et al.: walk positions in text order, carrying h down by one.
    std::vector<std::uint64_t> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[out.sa[i]] = i;
    out.lcp.assign(n, 0);
    std::uint64_t h = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (rank[i] == 0) {
            h = 0;
            continue;
        }
        const std::uint64_t j = out.sa[rank[i] - 1];
        while (i + h < n && j + h < n && s[i + h] == s[j + h]) ++h;
        out.lcp[rank[i]] = h;
        if (h) --h;
    }
    return out;
}

/// Suffix tree from the suffix array: suffixes are inserted in lexicographic
/// order, the LCP value telling where the new leaf branches off the rightmost
/// path. Leaf ids are suffix start positions; leaf ranks equal SA ranks.
[[nodiscard]] inline CompactedTrie build_suffix_tree(const SuffixArrayIndex& index, const Text& text) {
    CompactedTrie trie;
    const std::uint32_t str = trie.add_terminated_string(text.terminated());
    const std::size_t n = index.sa.size();
    std::vector<NodeId> path{trie.root()};
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t pos = index.sa[i];
        const std::uint64_t l = index.lcp[i];
        NodeId last = kNoNode;
        while (trie.node(path.back()).depth > l) {
            last = path.back();
            path.pop_back();
        }
        NodeId parent = path.back();
        if (trie.node(parent).depth < l) {
            // Branch point lies inside the edge into `last`.
            parent = trie.split_edge(last, l - trie.node(parent).depth);
            path.push_back(parent);
        }
        NodeId leaf = trie.new_leaf(parent, LeafRef{str, pos}, pos);
        path.push_back(leaf);
    }
    trie.finalize();
    return trie;
}

[[nodiscard]] inline CompactedTrie build_suffix_tree(const Text& text) {
    return build_suffix_tree(build_suffix_array(text), text);
}

}  // namespace triekit
