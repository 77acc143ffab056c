#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "capacity.hpp"
#include "compacted_trie.hpp"
#include "det_dictionary.hpp"
#include "dynamic_predecessor.hpp"
#include "error.hpp"
#include "probes.hpp"
#include "text.hpp"
#include "wexp_tree.hpp"

namespace triekit {

/// Insert-only compacted trie with amortized O(m + lg lg sigma)-style search.
///
/// Top level: nodes with many leaves are heavy and route with a full child
/// array (two or more heavy children), a single heavy-child link, and a
/// dynamic predecessor structure over all children. Every light node whose
/// parent is heavy roots a small tree with an explicit leaf counter; when
/// the counter reaches s = sigma the small tree is traversed and every node
/// with more than s/2 leaves becomes heavy.
///
/// Inside a small tree each node has a level, and maximal same-level
/// connected pieces form fragments whose roots keep leaf counters. A node
/// routes to same-level children with a static dictionary and to
/// lower-level children (fragment roots) with a WexpTree whose stored
/// weights stay within [ceil(sqrt(w)), w]. A fragment of level l whose
/// counter reaches 2 f(l+1) is promoted.
class DynTrieIndex {
public:
    static constexpr NodeId kTombstone = kNoNode;

    explicit DynTrieIndex(std::uint32_t sigma) : sigma_(sigma), s_(std::max<std::uint32_t>(sigma, 2)) {
        if (sigma == 0) throw Error(ErrorCode::invalid_input, "sigma must be positive");
        nodes_.resize(1);
        fresh_small_tree(trie_.root());
    }

    [[nodiscard]] std::uint32_t sigma() const noexcept { return sigma_; }
    [[nodiscard]] std::uint64_t threshold() const noexcept { return s_; }
    [[nodiscard]] std::size_t size() const noexcept { return trie_.string_count(); }
    [[nodiscard]] const CompactedTrie& trie() const noexcept { return trie_; }
    [[nodiscard]] bool heavy(NodeId v) const { return nodes_[v].heavy; }
    [[nodiscard]] unsigned level(NodeId v) const { return nodes_[v].level; }
    [[nodiscard]] std::uint64_t leaves(NodeId v) const { return nodes_[v].leaves; }

    [[nodiscard]] std::size_t heavy_count() const {
        return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const DynNode& n) { return n.heavy; }));
    }

    [[nodiscard]] std::vector<Code> string(std::uint64_t id) const {
        const auto& s = trie_.string(static_cast<std::uint32_t>(id));
        return {s.begin(), s.end() - 1};
    }

    /// Adds a string; returns its id (insertion order).
    std::uint64_t insert(std::span<const Code> codes) {
        check_codes(codes, Alphabet{sigma_});
        auto at = [&](std::uint64_t i) { return i < codes.size() ? codes[i] : kSentinel; };

        // Locate the insertion point before touching anything.
        NodeId v = trie_.root();
        std::uint64_t d = 0;
        NodeId split_child = kNoNode;
        std::uint64_t split_at = 0;
        while (true) {
            const NodeId w = trie_.child(v, at(d));
            if (w == kNoNode) break;
            const std::uint64_t el = trie_.node(w).edge_length();
            std::uint64_t j = 1;
            while (j < el && trie_.label_char(w, j) == at(d + j)) ++j;
            if (j == el) {
                if (trie_.node(w).leaf) throw Error(ErrorCode::duplicate_key, "string already stored");
                v = w;
                d += el;
                continue;
            }
            split_child = w;
            split_at = j;
            break;
        }

        const std::uint32_t id = trie_.add_string(codes);
        NodeId parent = v;
        if (split_child != kNoNode) {
            parent = trie_.split_edge(split_child, split_at);
            grow();
            nodes_[parent].leaves = nodes_[split_child].leaves;
            adopt_middle(v, parent, split_child);
        }
        const NodeId x = trie_.new_leaf(parent, LeafRef{id, 0}, id);
        grow();
        for (NodeId u = x; u != kNoNode; u = trie_.node(u).parent) ++nodes_[u].leaves;
        attach_leaf(parent, x);
        return id;
    }

    /// Prefix search. The interval is in leaf ranks of the current set.
    [[nodiscard]] MatchResult search(std::span<const Code> p) const {
        check_codes(p, Alphabet{sigma_});
        const std::uint64_t m = p.size();
        if (trie_.leaf_count() == 0) return MatchResult{};
        NodeId v = trie_.root();
        std::uint64_t d = 0;
        while (true) {
            if (d == m) return matched(v, trie_.node(v).edge_length(), m);
            const NodeId w = route(v, p[d]);
            if (w == kNoNode) return miss(d);
            const TrieNode& wn = trie_.node(w);
            std::uint64_t j = 1;
            auto& pc = probes();
            while (j < wn.edge_length() && d + j < m) {
                ++pc.chars_compared;
                if (trie_.label_char(w, j) != p[d + j]) break;
                ++j;
            }
            if (d + j == m) return matched(w, j, m);
            if (j < wn.edge_length()) return miss(d + j);
            v = w;
            d += j;
        }
    }

    /// Id of the largest stored string S with S$ <= P$, or nullopt.
    [[nodiscard]] std::optional<std::uint64_t> predecessor(std::span<const Code> p) const {
        check_codes(p, Alphabet{sigma_});
        const std::uint64_t m = p.size();
        if (trie_.leaf_count() == 0) return std::nullopt;
        NodeId v = trie_.root();
        std::uint64_t d = 0;
        while (true) {
            const TrieNode& vn = trie_.node(v);
            if (d == m) {
                if (!vn.children.empty() && vn.children.front().first == kSentinel) {
                    return trie_.node(vn.children.front().second).leaf_id;
                }
                return left_of(v);
            }
            const NodeId w = route(v, p[d]);
            if (w == kNoNode) {
                const NodeId b = child_below(v, p[d]);
                return b == kNoNode ? left_of(v) : std::optional<std::uint64_t>(rightmost_leaf(b));
            }
            const TrieNode& wn = trie_.node(w);
            std::uint64_t j = 1;
            while (j < wn.edge_length() && d + j < m && trie_.label_char(w, j) == p[d + j]) ++j;
            if (j < wn.edge_length()) {
                if (d + j == m && trie_.label_char(w, j) == kSentinel) return wn.leaf_id;
                if (d + j == m || trie_.label_char(w, j) > p[d + j]) return left_of(w);
                return rightmost_leaf(w);
            }
            v = w;
            d += j;
        }
    }

    /// Full consistency check; one line per violation.
    [[nodiscard]] std::vector<std::string> audit() const;

private:
    static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

    struct HeavyPart {
        DynamicPredecessor children;
        NodeId heavy_child = kNoNode;
        std::vector<NodeId> array;  // sigma + 1 cells once branching
    };

    struct DynNode {
        bool heavy = false;
        std::uint64_t leaves = 0;
        std::unique_ptr<HeavyPart> hp;
        // Light-node state.
        std::uint32_t small = kNone;
        std::uint32_t frag = kNone;
        unsigned level = 0;
        DetDictionary<NodeId> same;
        std::unique_ptr<WexpTree<NodeId>> lower;
        ElementHandle handle;  // entry in the parent's `lower` while a fragment root
    };

    struct SmallTree {
        NodeId root = kNoNode;
        std::uint64_t counter = 0;
        bool live = true;
    };

    struct Fragment {
        NodeId root = kNoNode;
        unsigned level = 0;
        std::uint64_t counter = 0;
        std::vector<NodeId> members;
        bool live = true;
    };

    void grow() {
        if (nodes_.size() < trie_.node_count()) nodes_.resize(trie_.node_count());
    }

    [[nodiscard]] std::uint64_t universe() const { return std::uint64_t{sigma_} + 1; }

    [[nodiscard]] bool in_small_tree_below(NodeId v) const {
        const NodeId p = trie_.node(v).parent;
        return p != kNoNode && !nodes_[p].heavy;
    }

    // ---- queries ---------------------------------------------------------

    [[nodiscard]] NodeId route(NodeId v, Code c) const {
        const DynNode& n = nodes_[v];
        if (n.heavy) {
            const HeavyPart& hp = *n.hp;
            if (!hp.array.empty()) {
                if (hp.array[c] != kNoNode) return hp.array[c];
            } else if (hp.heavy_child != kNoNode && trie_.first_char(hp.heavy_child) == c) {
                return hp.heavy_child;
            }
            auto e = hp.children.pred_entry(c);
            return e && e->first == c ? e->second : kNoNode;
        }
        if (auto w = n.same.lookup(c)) return *w;
        if (n.lower) {
            auto f = n.lower->pred(c);
            if (f && f->key == c && f->value != kTombstone) return f->value;
        }
        return kNoNode;
    }

    [[nodiscard]] NodeId child_below(NodeId v, Code c) const {
        const DynNode& n = nodes_[v];
        if (n.heavy) {
            auto e = n.hp->children.pred_entry(c - 1);
            return e ? e->second : kNoNode;
        }
        const auto& ch = trie_.node(v).children;
        auto it = std::lower_bound(ch.begin(), ch.end(), c, [](const auto& e, Code x) { return e.first < x; });
        return it == ch.begin() ? kNoNode : std::prev(it)->second;
    }

    [[nodiscard]] std::uint64_t rightmost_leaf(NodeId v) const {
        while (!trie_.node(v).leaf) v = trie_.node(v).children.back().second;
        return trie_.node(v).leaf_id;
    }

    // Rightmost leaf strictly left of v's subtree.
    [[nodiscard]] std::optional<std::uint64_t> left_of(NodeId v) const {
        while (v != trie_.root()) {
            const NodeId p = trie_.node(v).parent;
            const auto& ch = trie_.node(p).children;
            auto it = std::lower_bound(ch.begin(), ch.end(), trie_.first_char(v),
                                       [](const auto& e, Code x) { return e.first < x; });
            if (it != ch.begin()) return rightmost_leaf(std::prev(it)->second);
            v = p;
        }
        return std::nullopt;
    }

    static MatchResult miss(std::uint64_t matched) {
        MatchResult r;
        r.matched_len = matched;
        return r;
    }

    // Rank interval from the leaf counts of left siblings along the path.
    [[nodiscard]] MatchResult matched(NodeId v, std::uint64_t offset, std::uint64_t m) const {
        std::uint64_t lo = 0;
        for (NodeId u = v; u != trie_.root(); u = trie_.node(u).parent) {
            const NodeId p = trie_.node(u).parent;
            for (const auto& [c, w] : trie_.node(p).children) {
                if (w == u) break;
                lo += nodes_[w].leaves;
            }
        }
        const bool at_node = offset == trie_.node(v).edge_length();
        return MatchResult{at_node ? Outcome::matched_at_node : Outcome::matched_on_edge, v, offset, lo,
                           lo + nodes_[v].leaves - 1, m};
    }

    // ---- updates ---------------------------------------------------------

    // `mid` was just created on the edge p -> w.
    void adopt_middle(NodeId p, NodeId mid, NodeId w) {
        const Code c = trie_.first_char(mid);
        DynNode& wn = nodes_[w];
        DynNode& mn = nodes_[mid];
        if (wn.heavy) {
            mn.heavy = true;
            mn.hp = std::make_unique<HeavyPart>();
            mn.hp->children = DynamicPredecessor(universe());
            mn.hp->children.insert(trie_.first_char(w), w);
            mn.hp->heavy_child = w;
            HeavyPart& php = *nodes_[p].hp;
            php.children.set_value(c, mid);
            if (!php.array.empty()) php.array[c] = mid;
            if (php.heavy_child == w) php.heavy_child = mid;
            return;
        }
        // mid takes w's place in w's small tree and fragment.
        mn.small = wn.small;
        mn.frag = wn.frag;
        mn.level = wn.level;
        mn.same.build({{trie_.first_char(w), w}});
        Fragment& f = frags_[wn.frag];
        f.members.push_back(mid);
        if (f.root == w) {
            f.root = mid;
            mn.handle = wn.handle;
            wn.handle = ElementHandle{};
        }
        if (smalls_[wn.small].root == w) smalls_[wn.small].root = mid;
        DynNode& pn = nodes_[p];
        if (pn.heavy) {
            pn.hp->children.set_value(c, mid);
        } else if (f.root == mid) {
            pn.lower->set_value(mn.handle, mid);
        } else {
            pn.same.assign(c, mid);
        }
    }

    void attach_leaf(NodeId v, NodeId x) {
        const Code c = trie_.first_char(x);
        DynNode& vn = nodes_[v];
        if (vn.heavy) {
            vn.hp->children.insert(c, x);
            fresh_small_tree(x);
            return;
        }
        DynNode& xn = nodes_[x];
        xn.small = vn.small;
        xn.level = 0;
        if (vn.level == 0) {
            xn.frag = vn.frag;
            frags_[vn.frag].members.push_back(x);
            auto entries = vn.same.entries();
            entries.emplace_back(c, x);
            vn.same.build(std::move(entries));
        } else {
            xn.frag = new_fragment(x, 0, 0);
            frags_[xn.frag].members.push_back(x);
            xn.handle = lower_insert(v, c, x, 1);
        }
        count_new_leaf(x);
    }

    // Registers child x of v (key c) in v's WexpTree with stored weight w.
    ElementHandle lower_insert(NodeId v, Code c, NodeId x, std::uint64_t w) {
        DynNode& vn = nodes_[v];
        if (!vn.lower) vn.lower = std::make_unique<WexpTree<NodeId>>(universe());
        if (auto f = vn.lower->find(c)) {
            // A tombstone left by an earlier promotion: revive it.
            vn.lower->set_value(f->handle, x);
            for (std::uint64_t k = f->weight; k < w; ++k) vn.lower->increase(f->handle);
            return f->handle;
        }
        return vn.lower->insert_weighted(c, x, w);
    }

    std::uint32_t new_fragment(NodeId root, unsigned level, std::uint64_t counter) {
        frags_.push_back(Fragment{root, level, counter, {}, true});
        return static_cast<std::uint32_t>(frags_.size() - 1);
    }

    void count_new_leaf(NodeId x) {
        SmallTree& st = smalls_[nodes_[x].small];
        ++st.counter;
        if (st.counter >= s_) {
            rebalance(st.root);
            return;
        }
        // Fragments above x, listed bottom-up, updated top-down.
        std::vector<std::uint32_t> path;
        for (NodeId v = x; v != kNoNode && !nodes_[v].heavy;) {
            const std::uint32_t f = nodes_[v].frag;
            path.push_back(f);
            v = trie_.node(frags_[f].root).parent;
        }
        std::reverse(path.begin(), path.end());
        for (std::uint32_t f : path) {
            Fragment& fr = frags_[f];
            ++fr.counter;
            if (in_small_tree_below(fr.root)) {
                const NodeId p = trie_.node(fr.root).parent;
                WexpTree<NodeId>& t = *nodes_[p].lower;
                const ElementHandle h = nodes_[fr.root].handle;
                if (t.weight(h) < ceil_sqrt(fr.counter)) t.increase(h);
            }
        }
        for (std::uint32_t f : path) {
            if (frags_[f].live && frags_[f].counter >= split_weight(frags_[f].level)) promote(f);
        }
    }

    // Fragment weights by depth-first search over the members.
    std::vector<std::pair<NodeId, std::uint64_t>> fragment_weights(std::uint32_t f) {
        std::vector<std::pair<NodeId, std::uint64_t>> out;
        auto& pc = probes();
        std::vector<std::pair<NodeId, bool>> stack{{frags_[f].root, false}};
        std::vector<std::uint64_t> acc;
        weight_scratch_.resize(trie_.node_count());
        while (!stack.empty()) {
            auto [v, done] = stack.back();
            stack.pop_back();
            const TrieNode& tn = trie_.node(v);
            if (!done) {
                stack.emplace_back(v, true);
                for (const auto& [c, w] : tn.children) {
                    if (nodes_[w].frag == f) stack.emplace_back(w, false);
                }
                continue;
            }
            std::uint64_t w = tn.leaf ? 1 : 0;
            for (const auto& [c, u] : tn.children) {
                ++pc.promotion_steps;
                w += nodes_[u].frag == f ? weight_scratch_[u] : frags_[nodes_[u].frag].counter;
            }
            weight_scratch_[v] = w;
            out.emplace_back(v, w);
        }
        return out;
    }

    void promote(std::uint32_t f) {
        auto& pc = probes();
        ++pc.promotions;
        const unsigned l = frags_[f].level;
        const NodeId r = frags_[f].root;
        (void)fragment_weights(f);
        const std::uint64_t bar = capacity(l + 1);

        std::vector<NodeId> tail{r};
        while (true) {
            NodeId next = kNoNode;
            for (const auto& [c, w] : trie_.node(tail.back()).children) {
                if (nodes_[w].frag == f && weight_scratch_[w] > bar) next = w;
            }
            if (next == kNoNode) break;
            tail.push_back(next);
        }

        const NodeId p = trie_.node(r).parent;
        const bool join = p != kNoNode && !nodes_[p].heavy && nodes_[p].level == l + 1;
        std::uint32_t g;
        if (join) {
            g = nodes_[p].frag;
            nodes_[p].lower->set_value(nodes_[r].handle, kTombstone);
            nodes_[r].handle = ElementHandle{};
            auto entries = nodes_[p].same.entries();
            entries.emplace_back(trie_.first_char(r), r);
            pc.promotion_steps += entries.size();
            nodes_[p].same.build(std::move(entries));
        } else {
            g = new_fragment(r, l + 1, frags_[f].counter);
        }
        frags_[f].live = false;
        frags_[f].members.clear();
        for (NodeId t : tail) {
            nodes_[t].level = l + 1;
            nodes_[t].frag = g;
            frags_[g].members.push_back(t);
        }
        for (std::size_t i = 0; i < tail.size(); ++i) {
            const NodeId t = tail[i];
            const NodeId keep = i + 1 < tail.size() ? tail[i + 1] : kNoNode;
            std::vector<NodeId> split_off;
            for (const auto& [c, w] : trie_.node(t).children) {
                if (w != keep && nodes_[w].frag == f) split_off.push_back(w);
            }
            for (NodeId w : split_off) {
                const std::uint32_t h = new_fragment(w, l, weight_scratch_[w]);
                collect_members(w, f, h);
                nodes_[w].handle = lower_insert(t, trie_.first_char(w), w, ceil_sqrt(weight_scratch_[w]));
                ++pc.promotion_steps;
            }
            if (keep != kNoNode) {
                nodes_[t].same.build({{trie_.first_char(keep), keep}});
            } else {
                nodes_[t].same.build({});
            }
            ++pc.promotion_steps;
        }
    }

    // Moves the members of fragment `from` below (and including) v into `to`.
    void collect_members(NodeId v, std::uint32_t from, std::uint32_t to) {
        std::vector<NodeId> stack{v};
        auto& pc = probes();
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            nodes_[u].frag = to;
            frags_[to].members.push_back(u);
            ++pc.promotion_steps;
            for (const auto& [c, w] : trie_.node(u).children) {
                if (nodes_[w].frag == from) stack.push_back(w);
            }
        }
    }

    // Small-tree root counter reached s: every node with more than s/2 leaves
    // in the subtree becomes heavy; the remaining light parts become fresh
    // small trees.
    void rebalance(NodeId r) {
        auto& pc = probes();
        smalls_[nodes_[r].small].live = false;
        std::vector<NodeId> order;
        std::vector<NodeId> stack{r};
        while (!stack.empty()) {
            const NodeId v = stack.back();
            stack.pop_back();
            order.push_back(v);
            ++pc.rebalance_steps;
            if (nodes_[v].frag != kNone) frags_[nodes_[v].frag].live = false;
            for (const auto& [c, w] : trie_.node(v).children) stack.push_back(w);
        }
        weight_scratch_.resize(trie_.node_count());
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const TrieNode& tn = trie_.node(*it);
            std::uint64_t w = tn.leaf ? 1 : 0;
            for (const auto& [c, u] : tn.children) w += weight_scratch_[u];
            weight_scratch_[*it] = w;
        }
        std::vector<NodeId> made;
        for (NodeId v : order) {
            if (2 * weight_scratch_[v] > s_) made.push_back(v);
        }
        for (NodeId v : made) {
            DynNode& n = nodes_[v];
            n.heavy = true;
            n.small = kNone;
            n.frag = kNone;
            n.level = 0;
            n.same = DetDictionary<NodeId>();
            n.lower.reset();
            n.handle = ElementHandle{};
            n.hp = std::make_unique<HeavyPart>();
            n.hp->children = DynamicPredecessor(universe());
            for (const auto& [c, w] : trie_.node(v).children) n.hp->children.insert(c, w);
        }
        for (NodeId v : made) {
            link_heavy_children(v);
            for (const auto& [c, w] : trie_.node(v).children) {
                if (!nodes_[w].heavy) fresh_small_tree(w);
            }
        }
        const NodeId p = trie_.node(r).parent;
        if (p != kNoNode && nodes_[r].heavy) link_heavy_children(p);
    }

    void link_heavy_children(NodeId v) {
        HeavyPart& hp = *nodes_[v].hp;
        std::vector<NodeId> hc;
        for (const auto& [c, w] : trie_.node(v).children) {
            if (nodes_[w].heavy) hc.push_back(w);
        }
        hp.heavy_child = hc.size() == 1 ? hc.front() : kNoNode;
        if (hc.size() >= 2) {
            if (hp.array.empty()) {
                hp.array.assign(std::size_t{sigma_} + 1, kNoNode);
                probes().rebalance_steps += sigma_ + 1;
            }
            for (NodeId w : hc) hp.array[trie_.first_char(w)] = w;
        }
    }

    // Builds the small-tree machinery for the light subtree rooted at q.
    void fresh_small_tree(NodeId q) {
        auto& pc = probes();
        smalls_.push_back(SmallTree{q, 0, true});
        const auto sid = static_cast<std::uint32_t>(smalls_.size() - 1);
        std::vector<NodeId> order;
        std::vector<NodeId> stack{q};
        while (!stack.empty()) {
            const NodeId v = stack.back();
            stack.pop_back();
            order.push_back(v);
            ++pc.rebalance_steps;
            for (const auto& [c, w] : trie_.node(v).children) stack.push_back(w);
        }
        weight_scratch_.resize(trie_.node_count());
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const TrieNode& tn = trie_.node(*it);
            std::uint64_t w = tn.leaf ? 1 : 0;
            for (const auto& [c, u] : tn.children) w += weight_scratch_[u];
            weight_scratch_[*it] = w;
        }
        smalls_[sid].counter = weight_scratch_[q];
        for (NodeId v : order) {
            DynNode& n = nodes_[v];
            n.small = sid;
            n.level = level_for_weight(weight_scratch_[v]);
            n.lower.reset();
            n.handle = ElementHandle{};
        }
        for (NodeId v : order) {
            DynNode& n = nodes_[v];
            if (v == q || nodes_[trie_.node(v).parent].level != n.level) {
                n.frag = new_fragment(v, n.level, weight_scratch_[v]);
            } else {
                n.frag = nodes_[trie_.node(v).parent].frag;
            }
            frags_[n.frag].members.push_back(v);
        }
        for (NodeId v : order) {
            std::vector<std::pair<std::uint64_t, NodeId>> same;
            for (const auto& [c, w] : trie_.node(v).children) {
                if (nodes_[w].level == nodes_[v].level) {
                    same.emplace_back(c, w);
                } else {
                    nodes_[w].handle = lower_insert(v, c, w, ceil_sqrt(weight_scratch_[w]));
                }
            }
            nodes_[v].same.build(std::move(same));
        }
    }

    CompactedTrie trie_;
    std::uint32_t sigma_;
    std::uint64_t s_;
    std::vector<DynNode> nodes_;
    std::vector<SmallTree> smalls_;
    std::vector<Fragment> frags_;
    std::vector<std::uint64_t> weight_scratch_;
};

inline std::vector<std::string> DynTrieIndex::audit() const {
    std::vector<std::string> bad;
    auto fail = [&](NodeId v, const std::string& what) { bad.push_back("node " + std::to_string(v) + ": " + what); };
    for (const auto& msg : trie_.audit()) {
        if (msg.find("interval") == std::string::npos) bad.push_back(msg);
    }
    const std::size_t n = trie_.node_count();
    if (nodes_.size() != n) {
        bad.push_back("node table size mismatch");
        return bad;
    }
    // True leaf counts.
    std::vector<std::uint64_t> lv(n, 0);
    std::vector<NodeId> order;
    std::vector<NodeId> stack{trie_.root()};
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (const auto& [c, w] : trie_.node(v).children) stack.push_back(w);
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const TrieNode& tn = trie_.node(*it);
        lv[*it] = tn.leaf ? 1 : 0;
        for (const auto& [c, w] : tn.children) lv[*it] += lv[w];
    }
    std::vector<std::size_t> frag_members(frags_.size(), 0);
    for (NodeId v : order) {
        const DynNode& dn = nodes_[v];
        const TrieNode& tn = trie_.node(v);
        if (dn.leaves != lv[v]) fail(v, "leaf count " + std::to_string(dn.leaves) + " != " + std::to_string(lv[v]));
        const NodeId p = tn.parent;
        if (dn.heavy) {
            if (2 * lv[v] <= s_) fail(v, "heavy with only " + std::to_string(lv[v]) + " leaves");
            if (p != kNoNode && !nodes_[p].heavy) fail(v, "heavy node below a light parent");
            if (!dn.hp) {
                fail(v, "heavy node without payload");
                continue;
            }
            const HeavyPart& hp = *dn.hp;
            if (hp.children.size() != tn.children.size()) fail(v, "child predecessor size mismatch");
            std::vector<NodeId> hc;
            for (const auto& [c, w] : tn.children) {
                auto e = hp.children.tree().find(c);
                if (!e || e->value != w) fail(v, "child predecessor entry wrong for " + std::to_string(c));
                if (nodes_[w].heavy) hc.push_back(w);
            }
            if (hc.size() >= 2) {
                if (hp.array.empty()) {
                    fail(v, "branching heavy node without array");
                } else {
                    for (NodeId w : hc) {
                        if (hp.array[trie_.first_char(w)] != w) fail(v, "array entry wrong");
                    }
                }
            } else if (hc.size() == 1 && hp.heavy_child != hc.front()) {
                fail(v, "heavy-child link wrong");
            } else if (hc.empty() && hp.heavy_child != kNoNode) {
                fail(v, "stale heavy-child link");
            }
            auto pr = hp.children.tree().audit();
            for (auto& m : pr) fail(v, "child predecessor: " + m);
            continue;
        }
        // Light node.
        if (lv[v] >= s_ && s_ > 0) fail(v, "light with " + std::to_string(lv[v]) + " leaves");
        if (dn.small >= smalls_.size() || !smalls_[dn.small].live) {
            fail(v, "bad small-tree link");
            continue;
        }
        const SmallTree& st = smalls_[dn.small];
        const bool is_small_root = p == kNoNode || nodes_[p].heavy;
        if (is_small_root) {
            if (st.root != v) fail(v, "small-tree record does not point back");
            if (st.counter != lv[v]) fail(v, "small-tree counter " + std::to_string(st.counter) + " != " + std::to_string(lv[v]));
        } else if (nodes_[p].small != dn.small) {
            fail(v, "small-tree link differs from parent");
        }
        if (dn.frag >= frags_.size() || !frags_[dn.frag].live) {
            fail(v, "bad fragment link");
            continue;
        }
        ++frag_members[dn.frag];
        const Fragment& fr = frags_[dn.frag];
        if (fr.level != dn.level) fail(v, "fragment level differs from node level");
        const bool is_frag_root = is_small_root || nodes_[p].level != dn.level;
        if (!is_small_root && nodes_[p].level < dn.level) fail(v, "level above parent level");
        if (is_frag_root) {
            if (fr.root != v) fail(v, "fragment root mismatch (not maximal or stale)");
            if (fr.counter != lv[v]) fail(v, "fragment counter " + std::to_string(fr.counter) + " != " + std::to_string(lv[v]));
            if (fr.counter >= split_weight(fr.level)) fail(v, "fragment weight at promotion threshold");
            if (!is_small_root) {
                const auto* t = nodes_[p].lower.get();
                if (!t) {
                    fail(v, "lower-level child without parent wexp tree");
                } else {
                    const auto f = t->find(trie_.first_char(v));
                    if (!f || f->value != v) {
                        fail(v, "missing from parent wexp tree");
                    } else {
                        if (!(f->handle == dn.handle)) fail(v, "stale wexp handle");
                        if (f->weight < ceil_sqrt(lv[v]) || f->weight > lv[v]) {
                            fail(v, "stored weight " + std::to_string(f->weight) + " outside window for " +
                                        std::to_string(lv[v]));
                        }
                    }
                }
            }
        } else if (nodes_[p].frag != dn.frag) {
            fail(v, "same-level parent in another fragment");
        }
        // Routing tables.
        std::size_t same_count = 0;
        for (const auto& [c, w] : tn.children) {
            if (nodes_[w].level == dn.level) {
                ++same_count;
                if (dn.same.find(c) != std::optional<NodeId>(w)) fail(v, "dictionary entry wrong");
            } else if (dn.same.find(c)) {
                fail(v, "lower-level child in dictionary");
            }
        }
        if (dn.same.size() != same_count) fail(v, "dictionary size mismatch");
        if (dn.lower) {
            for (const auto& e : dn.lower->elements()) {
                if (e.value == kTombstone) continue;
                const NodeId w = trie_.child(v, static_cast<Code>(e.key));
                if (w != e.value || nodes_[w].level == dn.level) fail(v, "wexp entry does not name a lower-level child");
            }
            for (auto& m : dn.lower->audit()) fail(v, "wexp: " + m);
        }
    }
    for (std::size_t f = 0; f < frags_.size(); ++f) {
        if (!frags_[f].live) continue;
        if (frags_[f].members.size() != frag_members[f]) {
            bad.push_back("fragment " + std::to_string(f) + " member list has " + std::to_string(frags_[f].members.size()) +
                          " entries, " + std::to_string(frag_members[f]) + " nodes point to it");
        }
    }
    return bad;
}

}  // namespace triekit
