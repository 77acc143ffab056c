#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "text.hpp"

namespace triekit {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class Outcome { matched_at_node, matched_on_edge, not_found };

[[nodiscard]] inline const char* to_string(Outcome o) noexcept {
    switch (o) {
        case Outcome::matched_at_node: return "MATCHED_AT_NODE";
        case Outcome::matched_on_edge: return "MATCHED_ON_EDGE";
        case Outcome::not_found: return "NOT_FOUND";
    }
    return "?";
}

/// Result of a prefix search. `node`/`offset` give the locus: the lower end of
/// the edge where matching stopped and how many characters of that edge were
/// consumed. `lo`/`hi` is the leaf-rank interval and is only meaningful when
/// the outcome is a match.
struct MatchResult {
    Outcome outcome = Outcome::not_found;
    NodeId node = kNoNode;
    std::uint64_t offset = 0;
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    std::uint64_t matched_len = 0;

    [[nodiscard]] bool found() const noexcept { return outcome != Outcome::not_found; }
    [[nodiscard]] std::uint64_t count() const noexcept { return found() ? hi - lo + 1 : 0; }
};

/// A leaf spells strings[str][offset..] including the terminating sentinel.
struct LeafRef {
    std::uint32_t str = 0;
    std::uint64_t offset = 0;

    friend bool operator==(const LeafRef&, const LeafRef&) = default;
};

struct TrieNode {
    NodeId parent = kNoNode;
    // Edge label strings[str][start, end).
    std::uint32_t str = 0;
    std::uint64_t start = 0;
    std::uint64_t end = 0;
    std::uint64_t depth = 0;
    // Sorted by first edge character.
    std::vector<std::pair<Code, NodeId>> children;
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    bool leaf = false;
    LeafRef ref;
    // Caller-visible leaf identifier: string id, or suffix start position.
    std::uint64_t leaf_id = 0;

    [[nodiscard]] std::uint64_t edge_length() const noexcept { return end - start; }
};

/// Arena-backed compacted trie over sentinel-terminated strings. Edge labels
/// are ranges into the stored strings and are never copied.
class CompactedTrie {
public:
    CompactedTrie() { nodes_.emplace_back(); }

    [[nodiscard]] NodeId root() const noexcept { return 0; }
    [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }
    [[nodiscard]] std::size_t leaf_count() const noexcept { return leaf_count_; }
    [[nodiscard]] const TrieNode& node(NodeId v) const { return nodes_[v]; }
    [[nodiscard]] TrieNode& node_mut(NodeId v) { return nodes_[v]; }
    [[nodiscard]] const std::vector<TrieNode>& nodes() const noexcept { return nodes_; }

    [[nodiscard]] std::size_t string_count() const noexcept { return strings_.size(); }
    [[nodiscard]] const std::vector<Code>& string(std::uint32_t id) const { return strings_[id]; }
    [[nodiscard]] const std::vector<std::vector<Code>>& strings() const noexcept { return strings_; }

    /// Stores a string (sentinel appended) without inserting a path for it.
    std::uint32_t add_string(std::span<const Code> codes) {
        std::vector<Code> s(codes.begin(), codes.end());
        s.push_back(kSentinel);
        strings_.push_back(std::move(s));
        return static_cast<std::uint32_t>(strings_.size() - 1);
    }

    std::uint32_t add_terminated_string(std::vector<Code> terminated) {
        strings_.push_back(std::move(terminated));
        return static_cast<std::uint32_t>(strings_.size() - 1);
    }

    [[nodiscard]] Code label_char(NodeId v, std::uint64_t k) const {
        const TrieNode& n = nodes_[v];
        return strings_[n.str][n.start + k];
    }

    [[nodiscard]] Code first_char(NodeId v) const { return label_char(v, 0); }

    [[nodiscard]] Code leaf_char(LeafRef ref, std::uint64_t k) const {
        return strings_[ref.str][ref.offset + k];
    }

    [[nodiscard]] std::uint64_t leaf_length(LeafRef ref) const {
        return strings_[ref.str].size() - ref.offset;
    }

    [[nodiscard]] NodeId child(NodeId v, Code c) const {
        const auto& ch = nodes_[v].children;
        auto it = std::lower_bound(ch.begin(), ch.end(), c,
                                   [](const auto& e, Code x) { return e.first < x; });
        return (it != ch.end() && it->first == c) ? it->second : kNoNode;
    }

    NodeId new_node(NodeId parent, std::uint32_t str, std::uint64_t start, std::uint64_t end) {
        TrieNode n;
        n.parent = parent;
        n.str = str;
        n.start = start;
        n.end = end;
        n.depth = (parent == kNoNode ? 0 : nodes_[parent].depth) + (end - start);
        nodes_.push_back(std::move(n));
        return static_cast<NodeId>(nodes_.size() - 1);
    }

    NodeId new_leaf(NodeId parent, LeafRef ref, std::uint64_t leaf_id) {
        const std::uint64_t pd = nodes_[parent].depth;
        NodeId id = new_node(parent, ref.str, ref.offset + pd, strings_[ref.str].size());
        nodes_[id].leaf = true;
        nodes_[id].ref = ref;
        nodes_[id].leaf_id = leaf_id;
        ++leaf_count_;
        attach(parent, id);
        return id;
    }

    /// Adds `child` to the sorted child list of `parent`.
    void attach(NodeId parent, NodeId child) {
        const Code c = first_char(child);
        auto& ch = nodes_[parent].children;
        if (ch.empty() || ch.back().first < c) {
            ch.emplace_back(c, child);
            return;
        }
        auto it = std::lower_bound(ch.begin(), ch.end(), c,
                                   [](const auto& e, Code x) { return e.first < x; });
        if (it != ch.end() && it->first == c) {
            it->second = child;
        } else {
            ch.insert(it, {c, child});
        }
    }

    /// Splits the edge into `v` after `k` characters; returns the new middle node.
    NodeId split_edge(NodeId v, std::uint64_t k) {
        const NodeId p = nodes_[v].parent;
        const TrieNode old = nodes_[v];
        NodeId mid = new_node(p, old.str, old.start, old.start + k);
        nodes_[v].start = old.start + k;
        nodes_[v].parent = mid;
        nodes_[mid].children.emplace_back(label_char(v, 0), v);
        nodes_[mid].lo = old.lo;
        nodes_[mid].hi = old.hi;
        attach(p, mid);
        return mid;
    }

    /// Inserts the path for strings[ref.str][ref.offset..]. At most one edge is
    /// split and one leaf edge added.
    NodeId insert(LeafRef ref, std::uint64_t leaf_id) {
        const auto& s = strings_[ref.str];
        const std::uint64_t len = s.size() - ref.offset;
        NodeId v = root();
        std::uint64_t d = 0;
        while (true) {
            NodeId w = child(v, s[ref.offset + d]);
            if (w == kNoNode) return new_leaf(v, ref, leaf_id);
            const std::uint64_t el = nodes_[w].edge_length();
            std::uint64_t j = 0;
            while (j < el && d + j < len && label_char(w, j) == s[ref.offset + d + j]) ++j;
            if (j == el) {
                if (nodes_[w].leaf) {
                    throw Error(ErrorCode::duplicate_key, "string already stored");
                }
                v = w;
                d += el;
                continue;
            }
            NodeId mid = split_edge(w, j);
            return new_leaf(mid, ref, leaf_id);
        }
    }

    /// Stores `codes` and inserts its path; the leaf id is the new string id.
    NodeId insert_string(std::span<const Code> codes) {
        std::uint32_t id = add_string(codes);
        try {
            return insert(LeafRef{id, 0}, id);
        } catch (...) {
            strings_.pop_back();
            throw;
        }
    }

    /// Assigns leaf ranks in lexicographic DFS order and the [lo, hi] intervals.
    void finalize() {
        leaf_of_rank_.clear();
        leaf_of_rank_.reserve(leaf_count_);
        std::vector<std::pair<NodeId, std::size_t>> stack{{root(), 0}};
        if (nodes_[root()].children.empty() && !nodes_[root()].leaf) {
            nodes_[root()].lo = 1;
            nodes_[root()].hi = 0;
            return;
        }
        while (!stack.empty()) {
            auto& [v, i] = stack.back();
            TrieNode& n = nodes_[v];
            if (i == 0) n.lo = leaf_of_rank_.size();
            if (n.leaf) leaf_of_rank_.push_back(v);
            if (i < n.children.size()) {
                NodeId c = n.children[i++].second;
                stack.emplace_back(c, 0);
            } else {
                n.hi = leaf_of_rank_.size() - 1;
                stack.pop_back();
            }
        }
    }

    [[nodiscard]] const std::vector<NodeId>& leaves_by_rank() const noexcept { return leaf_of_rank_; }
    std::vector<NodeId>& leaves_by_rank_mut() noexcept { return leaf_of_rank_; }
    void set_leaf_count(std::size_t n) noexcept { leaf_count_ = n; }

    /// Number of leaves in the subtree of v (requires finalize()).
    [[nodiscard]] std::uint64_t leaves_below(NodeId v) const {
        const TrieNode& n = nodes_[v];
        return n.hi + 1 - n.lo;
    }

    /// Pre-order description with children in character order: depth, first
    /// edge character, leaf id (or -1) and degree per node. Two tries over the
    /// same strings have equal forms iff they are identical.
    struct CanonEntry {
        std::uint64_t depth;
        std::int64_t first;
        std::int64_t leaf_id;
        std::size_t degree;
        friend bool operator==(const CanonEntry&, const CanonEntry&) = default;
    };

    [[nodiscard]] std::vector<CanonEntry> canonical_form() const {
        std::vector<CanonEntry> out;
        out.reserve(nodes_.size());
        std::vector<NodeId> stack{root()};
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            const TrieNode& n = nodes_[v];
            out.push_back({n.depth, v == root() ? -1 : static_cast<std::int64_t>(first_char(v)),
                           n.leaf ? static_cast<std::int64_t>(n.leaf_id) : -1, n.children.size()});
            for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(it->second);
        }
        return out;
    }

    /// Nested rendering with expanded edge labels, e.g. "(1 2 (3 0)(4 0))".
    /// Meant for small tests.
    [[nodiscard]] std::string expanded_form() const { return expand(root()); }

    /// Structural self-check: compactedness, distinct first characters,
    /// depth consistency and (after finalize) interval consistency.
    [[nodiscard]] std::vector<std::string> audit() const {
        std::vector<std::string> bad;
        for (NodeId v = 0; v < nodes_.size(); ++v) {
            const TrieNode& n = nodes_[v];
            if (v != root() && !n.leaf && n.children.size() < 2) {
                bad.push_back("node " + std::to_string(v) + " is internal with < 2 children");
            }
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                NodeId c = n.children[i].second;
                if (nodes_[c].parent != v) bad.push_back("parent link broken at " + std::to_string(c));
                if (first_char(c) != n.children[i].first) bad.push_back("child key mismatch at " + std::to_string(c));
                if (i > 0 && !(n.children[i - 1].first < n.children[i].first)) {
                    bad.push_back("children unsorted at " + std::to_string(v));
                }
                if (nodes_[c].depth != n.depth + nodes_[c].edge_length()) {
                    bad.push_back("depth mismatch at " + std::to_string(c));
                }
            }
            if (!leaf_of_rank_.empty() && !n.children.empty()) {
                if (n.lo != nodes_[n.children.front().second].lo || n.hi != nodes_[n.children.back().second].hi) {
                    bad.push_back("interval mismatch at " + std::to_string(v));
                }
                for (std::size_t i = 1; i < n.children.size(); ++i) {
                    if (nodes_[n.children[i].second].lo != nodes_[n.children[i - 1].second].hi + 1) {
                        bad.push_back("intervals not contiguous at " + std::to_string(v));
                    }
                }
            }
        }
        return bad;
    }

private:
    [[nodiscard]] std::string expand(NodeId v) const {
        const TrieNode& n = nodes_[v];
        std::string out = "(";
        for (std::uint64_t k = 0; k < n.edge_length(); ++k) {
            if (k) out += ' ';
            out += std::to_string(label_char(v, k));
        }
        for (const auto& [c, w] : n.children) out += expand(w);
        out += ')';
        return out;
    }

    std::vector<std::vector<Code>> strings_;
    std::vector<TrieNode> nodes_;
    std::vector<NodeId> leaf_of_rank_;
    std::size_t leaf_count_ = 0;
};

}  // namespace triekit
