#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "compacted_trie.hpp"
#include "error.hpp"
#include "text.hpp"

namespace triekit {

/// Suffix tree of a text that grows by prepending letters, one suffix per step.
///
/// Labels are read from `rev_`, the terminated text stored right to left, so a
/// suffix is identified by its length and never moves when letters arrive at
/// the front. Every node keeps its a-links in a small sorted map: a hard link
/// names the node spelling a·str(u), a soft link names the lower end of the
/// edge whose interior holds that locus.
class OnlineSuffixTree {
public:
    using Node = std::uint32_t;
    static constexpr Node kNil = 0xffffffffu;

    struct Link {
        Node target = kNil;
        bool hard = false;
    };

    explicit OnlineSuffixTree(std::uint32_t sigma) : alphabet_{sigma} {
        rev_.push_back(kSentinel);
        nodes_.push_back(NodeRec{kNil, 0, 1, {}, {}});
        last_leaf_ = add_child(kRoot, 1, 1);
    }

    [[nodiscard]] std::uint32_t sigma() const noexcept { return alphabet_.sigma; }
    [[nodiscard]] std::size_t size() const noexcept { return rev_.size() - 1; }
    [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }
    [[nodiscard]] std::uint64_t steps() const noexcept { return steps_; }
    [[nodiscard]] Node last_leaf() const noexcept { return last_leaf_; }

    /// Current text, left to right, without the sentinel.
    [[nodiscard]] Text text() const {
        Text t;
        t.alphabet = alphabet_;
        t.codes.assign(rev_.rbegin(), rev_.rend() - 1);
        return t;
    }

    [[nodiscard]] std::optional<Link> link(Node u, Code a) const {
        const auto& ls = nodes_[u].links;
        auto it = std::lower_bound(ls.begin(), ls.end(), a, [](const auto& e, Code x) { return e.first < x; });
        if (it == ls.end() || it->first != a) return std::nullopt;
        return it->second;
    }

    /// T := a·T.
    void prepend(Code a) {
        if (!alphabet_.contains(a)) {
            throw Error(ErrorCode::alphabet_overflow, "code " + std::to_string(a) + " outside [1, " +
                                                          std::to_string(alphabet_.sigma) + "]");
        }
        const Node old_leaf = last_leaf_;
        Node v = old_leaf;
        std::optional<Link> lv;
        while (v != kNil) {
            ++steps_;
            lv = link(v, a);
            if (lv) break;
            v = nodes_[v].parent;
        }
        rev_.push_back(a);
        const auto len = static_cast<std::uint32_t>(rev_.size());

        Node leaf;
        if (v == kNil) {
            leaf = add_child(kRoot, len, len);
        } else if (lv->hard) {
            leaf = add_child(lv->target, len, len);
        } else {
            const Node m = split(lv->target, nodes_[v].depth + 1);
            leaf = add_child(m, len, len);
            set_link(v, a, Link{m, true});
            // Ancestors whose soft link ran past the new node now end at it.
            for (Node u = nodes_[v].parent; u != kNil; u = nodes_[u].parent) {
                ++steps_;
                auto l = link(u, a);
                if (!l || l->hard || l->target != lv->target) break;
                set_link(u, a, Link{m, false});
            }
        }
        set_link(old_leaf, a, Link{leaf, true});
        for (Node u = nodes_[old_leaf].parent; u != v; u = nodes_[u].parent) {
            ++steps_;
            set_link(u, a, Link{leaf, false});
        }
        last_leaf_ = leaf;
    }

    void prepend_all(const std::vector<Code>& left_to_right) {
        for (auto it = left_to_right.rbegin(); it != left_to_right.rend(); ++it) prepend(*it);
    }

    /// Nested rendering with children ordered by first code; matches
    /// CompactedTrie::expanded_form for the same text.
    [[nodiscard]] std::string canonical_form() const {
        std::string out;
        render(kRoot, out);
        return out;
    }

    /// Linear-size signature: preorder (depth, first code, leaf start or
    /// kInner, child count). Depths and leaf starts fix every label.
    [[nodiscard]] std::vector<std::uint64_t> shape() const {
        std::vector<std::uint64_t> out;
        std::vector<Node> stack{kRoot};
        while (!stack.empty()) {
            const Node u = stack.back();
            stack.pop_back();
            const NodeRec& n = nodes_[u];
            out.push_back(n.depth);
            out.push_back(u == kRoot ? 0 : char_at(u, nodes_[n.parent].depth));
            out.push_back(n.children.empty() ? rev_.size() - n.suf : kInner);
            out.push_back(n.children.size());
            for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(it->second);
        }
        return out;
    }

    static constexpr std::uint64_t kInner = ~std::uint64_t{0};

    /// Test hook: breaks the newest leaf so verification has something to catch.
    void corrupt_last_leaf() { ++nodes_[last_leaf_].depth; }

    /// Link and shape check. Empty when healthy.
    [[nodiscard]] std::vector<std::string> audit() const {
        std::vector<std::string> bad;
        auto fail = [&](Node u, const std::string& what) { bad.push_back("node " + std::to_string(u) + ": " + what); };
        // Letters preceding some leaf of each subtree decide which links must exist.
        std::vector<std::vector<Code>> before(nodes_.size());
        std::vector<Node> order{kRoot};
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (const auto& [c, w] : nodes_[order[i]].children) order.push_back(w);
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const NodeRec& n = nodes_[*it];
            auto& b = before[*it];
            if (n.children.empty() && n.suf < rev_.size()) b.push_back(rev_[n.suf]);
            for (const auto& [c, w] : n.children) b.insert(b.end(), before[w].begin(), before[w].end());
            std::sort(b.begin(), b.end());
            b.erase(std::unique(b.begin(), b.end()), b.end());
        }
        for (Node u : order) {
            const NodeRec& n = nodes_[u];
            if (u != kRoot && n.children.size() == 1) fail(u, "internal node with one child");
            for (const auto& [c, w] : n.children) {
                if (nodes_[w].parent != u) fail(w, "parent link broken");
                if (char_at(w, n.depth) != c) fail(w, "child key mismatch");
            }
            std::vector<Code> have;
            for (const auto& [a, l] : n.links) {
                have.push_back(a);
                if (u != kRoot && !link(n.parent, a)) fail(u, "link without parent link (monotonicity)");
                check_link(u, a, l, fail);
            }
            if (have != before[u]) fail(u, "link set differs from the letters that precede its occurrences");
        }
        return bad;
    }

private:
    static constexpr Node kRoot = 0;

    struct NodeRec {
        Node parent;
        std::uint32_t depth;
        std::uint32_t suf;  // length of one terminated suffix through this node
        std::vector<std::pair<Code, Node>> children;
        std::vector<std::pair<Code, Link>> links;
    };

    // k-th character of str(u).
    [[nodiscard]] Code char_at(Node u, std::uint32_t k) const { return rev_[nodes_[u].suf - 1 - k]; }

    Node add_child(Node p, std::uint32_t depth, std::uint32_t suf) {
        nodes_.push_back(NodeRec{p, depth, suf, {}, {}});
        const auto id = static_cast<Node>(nodes_.size() - 1);
        attach(p, char_at(id, nodes_[p].depth), id);
        return id;
    }

    void attach(Node p, Code c, Node child) {
        auto& ch = nodes_[p].children;
        auto it = std::lower_bound(ch.begin(), ch.end(), c, [](const auto& e, Code x) { return e.first < x; });
        if (it != ch.end() && it->first == c) {
            it->second = child;
        } else {
            ch.insert(it, {c, child});
        }
    }

    // New node at `depth` on the edge into w; it inherits w's links as soft ones.
    Node split(Node w, std::uint32_t depth) {
        const Node p = nodes_[w].parent;
        nodes_.push_back(NodeRec{p, depth, nodes_[w].suf, {}, {}});
        const auto m = static_cast<Node>(nodes_.size() - 1);
        attach(p, char_at(m, nodes_[p].depth), m);
        nodes_[w].parent = m;
        attach(m, char_at(w, depth), w);
        auto links = nodes_[w].links;
        for (auto& [a, l] : links) l.hard = false;
        steps_ += links.size();
        nodes_[m].links = std::move(links);
        return m;
    }

    void set_link(Node u, Code a, Link l) {
        auto& ls = nodes_[u].links;
        auto it = std::lower_bound(ls.begin(), ls.end(), a, [](const auto& e, Code x) { return e.first < x; });
        if (it != ls.end() && it->first == a) {
            it->second = l;
        } else {
            ls.insert(it, {a, l});
        }
    }

    template <typename Fail>
    void check_link(Node u, Code a, Link l, Fail& fail) const {
        if (l.target >= nodes_.size()) {
            fail(u, "link target out of range");
            return;
        }
        const NodeRec& t = nodes_[l.target];
        const std::uint32_t want = nodes_[u].depth + 1;
        if (l.hard ? t.depth != want : !(nodes_[t.parent].depth < want && want < t.depth)) {
            fail(u, std::string(l.hard ? "hard" : "soft") + " link depth wrong for letter " + std::to_string(a));
            return;
        }
        // str(target) must start with a·str(u).
        if (char_at(l.target, 0) != a) {
            fail(u, "link target does not start with its letter");
            return;
        }
        for (std::uint32_t k = 0; k + 1 < want; ++k) {
            if (char_at(l.target, k + 1) != char_at(u, k)) {
                fail(u, "link target spells a different string");
                return;
            }
        }
    }

    void render(Node u, std::string& out) const {
        const NodeRec& n = nodes_[u];
        out += '(';
        const std::uint32_t from = n.parent == kNil ? 0 : nodes_[n.parent].depth;
        for (std::uint32_t k = from; k < n.depth; ++k) {
            if (k != from) out += ' ';
            out += std::to_string(char_at(u, k));
        }
        for (const auto& [c, w] : n.children) render(w, out);
        out += ')';
    }

    Alphabet alphabet_;
    std::vector<Code> rev_;
    std::vector<NodeRec> nodes_;
    Node last_leaf_ = kNil;
    std::uint64_t steps_ = 0;
};

/// Same signature as OnlineSuffixTree::shape for a suffix tree whose leaf ids
/// are start positions.
[[nodiscard]] inline std::vector<std::uint64_t> suffix_tree_shape(const CompactedTrie& t) {
    std::vector<std::uint64_t> out;
    std::vector<NodeId> stack{t.root()};
    while (!stack.empty()) {
        const NodeId u = stack.back();
        stack.pop_back();
        const TrieNode& n = t.node(u);
        out.push_back(n.depth);
        out.push_back(u == t.root() ? 0 : t.first_char(u));
        out.push_back(n.leaf ? n.leaf_id : OnlineSuffixTree::kInner);
        out.push_back(n.children.size());
        for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(it->second);
    }
    return out;
}

/// Dynamic rooted tree answering lowest-marked-ancestor queries while the
/// marked set grows downward from the root.
///
/// Shortcuts only ever point at unmarked ancestors; since marks are closed
/// under taking ancestors, everything a valid shortcut skips is unmarked too.
/// A shortcut whose target has since been marked is ignored and rebuilt.
class FmaTree {
public:
    using Node = std::uint32_t;
    static constexpr Node kNil = 0xffffffffu;

    FmaTree() { nodes_.push_back(Rec{kNil, false, 0}); }

    [[nodiscard]] static constexpr Node root() noexcept { return 0; }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] Node parent(Node v) const { return nodes_.at(v).parent; }
    [[nodiscard]] bool marked(Node v) const { return nodes_.at(v).marked; }
    [[nodiscard]] std::uint64_t steps() const noexcept { return steps_; }

    /// New unmarked leaf below p.
    Node insert_leaf(Node p) {
        check(p);
        return push(p, false);
    }

    /// New node on the edge above v; it copies its parent's mark.
    Node insert_middle(Node v) {
        check(v);
        if (v == root()) throw Error(ErrorCode::invalid_input, "the root has no edge above it");
        const Node p = nodes_[v].parent;
        const Node m = push(p, nodes_[p].marked);
        nodes_[v].parent = m;
        return m;
    }

    void mark(Node v) {
        check(v);
        const Node p = nodes_[v].parent;
        if (p != kNil && !nodes_[p].marked) {
            throw Error(ErrorCode::mark_order_violation, "parent of node " + std::to_string(v) + " is unmarked");
        }
        nodes_[v].marked = true;
    }

    /// Lowest marked ancestor of v (v itself counts), or kNil.
    [[nodiscard]] Node query(Node v) {
        check(v);
        if (nodes_[v].marked) return v;
        path_.clear();
        Node u = v;
        Node answer = kNil;
        while (true) {
            ++steps_;
            path_.push_back(u);
            const Node j = nodes_[u].jump;
            if (j != u && !nodes_[j].marked) {
                u = j;
                continue;
            }
            const Node p = nodes_[u].parent;
            if (p == kNil || nodes_[p].marked) {
                answer = p;
                break;
            }
            u = p;
        }
        for (Node x : path_) nodes_[x].jump = u;
        return answer;
    }

private:
    struct Rec {
        Node parent;
        bool marked;
        Node jump;
    };

    void check(Node v) const {
        if (v >= nodes_.size()) throw Error(ErrorCode::invalid_handle, "unknown node " + std::to_string(v));
    }

    Node push(Node p, bool marked) {
        const auto id = static_cast<Node>(nodes_.size());
        nodes_.push_back(Rec{p, marked, id});
        return id;
    }

    std::vector<Rec> nodes_;
    std::vector<Node> path_;
    std::uint64_t steps_ = 0;
};

}  // namespace triekit
