#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "capacity.hpp"
#include "error.hpp"
#include "probes.hpp"
#include "static_predecessor.hpp"

namespace triekit {

struct ElementHandle {
    static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    std::uint32_t id = kNone;

    [[nodiscard]] bool valid() const noexcept { return id != kNone; }
    friend bool operator==(const ElementHandle&, const ElementHandle&) = default;
};

/// Weighted exponential search tree (amortized variant).
///
/// A tree of level l holds total weight W < 2 f(l+1). Non-base nodes keep
/// their splitters in a static predecessor structure (`Index`) with one child
/// of level l-1 between consecutive splitters; children are created on first
/// use. Level-1 nodes are the base case: a sorted array scanned linearly, all
/// of whose elements act as splitters.
///
/// Weights only grow. A node whose weight reaches 2 f(l+1) is split at once
/// around a splitter chosen by a single left-to-right sweep, and that splitter
/// moves into the parent, whose index is rebuilt.
template <typename Value, typename Index = StaticPredecessor>
class WexpTree {
public:
    using Key = std::uint64_t;

    struct Found {
        Key key;
        std::uint64_t weight;
        Value value;
        ElementHandle handle;
    };

    explicit WexpTree(Key universe = Key{1} << 32) : universe_(universe) {}

    [[nodiscard]] Key universe() const noexcept { return universe_; }
    [[nodiscard]] std::size_t size() const noexcept { return elems_.size(); }
    [[nodiscard]] bool empty() const noexcept { return elems_.empty(); }
    [[nodiscard]] std::uint64_t total_weight() const noexcept { return root_ == kNil ? 0 : nodes_[root_].weight; }
    [[nodiscard]] unsigned root_level() const noexcept { return root_ == kNil ? 0 : nodes_[root_].level; }

    ElementHandle insert(Key key, Value value) {
        if (key >= universe_) throw Error(ErrorCode::invalid_input, "key outside universe");
        if (root_ == kNil) root_ = new_node(1, kNil, 0);
        std::uint32_t v = root_;
        while (nodes_[v].level > 1) {
            std::size_t slot = 0;
            if (!nodes_[v].elems.empty()) {
                auto idx = nodes_[v].index.pred_index(key);
                if (idx) {
                    if (elems_[nodes_[v].elems[*idx]].key == key) {
                        throw Error(ErrorCode::duplicate_key, "key " + std::to_string(key));
                    }
                    slot = *idx + 1;
                }
            }
            std::uint32_t c = nodes_[v].children[slot];
            if (c == kNil) {
                c = new_node(nodes_[v].level - 1, v, static_cast<std::uint32_t>(slot));
                nodes_[v].children[slot] = c;
            }
            v = c;
        }
        auto& base = nodes_[v].elems;
        auto it = std::lower_bound(base.begin(), base.end(), key,
                                   [&](std::uint32_t e, Key k) { return elems_[e].key < k; });
        if (it != base.end() && elems_[*it].key == key) {
            throw Error(ErrorCode::duplicate_key, "key " + std::to_string(key));
        }
        const auto id = static_cast<std::uint32_t>(elems_.size());
        elems_.push_back(Element{key, 1, value, v});
        base.insert(it, id);
        add_weight_from(v);
        return ElementHandle{id};
    }

    /// Inserts with weight one, then raises the weight one step at a time.
    ElementHandle insert_weighted(Key key, Value value, std::uint64_t weight) {
        ElementHandle h = insert(key, value);
        for (std::uint64_t w = 1; w < weight; ++w) increase(h);
        return h;
    }

    void increase(ElementHandle h) {
        check(h);
        Element& e = elems_[h.id];
        ++e.weight;
        add_weight_from(e.node);
    }

    [[nodiscard]] std::optional<Found> pred(Key x) const {
        std::optional<Found> best;
        std::uint32_t v = root_;
        auto& pc = probes();
        while (v != kNil) {
            ++pc.wexp_levels_descended;
            const Node& n = nodes_[v];
            if (n.level == 1) {
                for (std::uint32_t e : n.elems) {
                    ++pc.chars_compared;
                    if (elems_[e].key > x) break;
                    best = found(e);
                }
                break;
            }
            std::size_t slot = 0;
            if (!n.elems.empty()) {
                auto idx = n.index.pred_index(x);
                if (idx) {
                    const std::uint32_t e = n.elems[*idx];
                    best = found(e);
                    if (elems_[e].key == x) break;
                    slot = *idx + 1;
                }
            }
            v = n.children[slot];
        }
        return best;
    }

    [[nodiscard]] std::optional<Found> find(Key x) const {
        auto f = pred(x);
        if (f && f->key == x) return f;
        return std::nullopt;
    }

    [[nodiscard]] Key key(ElementHandle h) const { return check(h).key; }
    [[nodiscard]] std::uint64_t weight(ElementHandle h) const { return check(h).weight; }
    [[nodiscard]] const Value& value(ElementHandle h) const { return check(h).value; }
    void set_value(ElementHandle h, Value v) { check_mut(h).value = v; }

    /// Level of the node where the element is a splitter (or base entry).
    [[nodiscard]] unsigned container_level(ElementHandle h) const { return nodes_[check(h).node].level; }

    /// Number of edges from the root to the node holding the element.
    [[nodiscard]] unsigned depth(ElementHandle h) const {
        unsigned d = 0;
        for (std::uint32_t v = check(h).node; nodes_[v].parent != kNil; v = nodes_[v].parent) ++d;
        return d;
    }

    /// All elements as (key, weight, value, handle), in key order.
    [[nodiscard]] std::vector<Found> elements() const {
        std::vector<Found> out;
        out.reserve(elems_.size());
        for (std::uint32_t i = 0; i < elems_.size(); ++i) out.push_back(found(i));
        std::sort(out.begin(), out.end(), [](const Found& a, const Found& b) { return a.key < b.key; });
        return out;
    }

    /// Full structural check; returns one line per violation.
    [[nodiscard]] std::vector<std::string> audit() const {
        std::vector<std::string> bad;
        if (root_ == kNil) {
            if (!elems_.empty()) bad.push_back("elements without a root");
            return bad;
        }
        if (nodes_[root_].parent != kNil) bad.push_back("root has a parent");
        std::size_t seen = 0;
        audit_node(root_, std::nullopt, std::nullopt, bad, seen);
        if (seen != elems_.size()) {
            bad.push_back("reachable elements " + std::to_string(seen) + " != " + std::to_string(elems_.size()));
        }
        const unsigned top = nodes_[root_].level;
        const bool proper = nodes_[root_].weight >= 2 * capacity(top);
        for (std::uint32_t i = 0; i < elems_.size(); ++i) {
            const Element& e = elems_[i];
            const Node& n = nodes_[e.node];
            if (n.dead || std::find(n.elems.begin(), n.elems.end(), i) == n.elems.end()) {
                bad.push_back("handle " + std::to_string(i) + " points to a node not holding it");
                continue;
            }
            // Not a splitter at level c + 1, so its weight is below 2 f(c + 1).
            if (n.level < top && e.weight >= 2 * capacity(n.level + 1)) {
                bad.push_back("element " + std::to_string(e.key) + " of weight " + std::to_string(e.weight) +
                              " is not a splitter at level " + std::to_string(n.level + 1));
            }
            if (proper) {
                const unsigned lglg = floor_lglg(std::max<std::uint64_t>(e.weight, 4));
                const unsigned allowed = top - std::min(top, lglg > 1 ? lglg - 1 : 0u);
                if (depth(ElementHandle{i}) > allowed) {
                    bad.push_back("element " + std::to_string(e.key) + " too deep for its weight");
                }
            }
        }
        return bad;
    }

private:
    static constexpr std::uint32_t kNil = std::numeric_limits<std::uint32_t>::max();

    struct Element {
        Key key;
        std::uint64_t weight;
        Value value;
        std::uint32_t node;
    };

    struct Node {
        unsigned level = 1;
        std::uint64_t weight = 0;
        std::uint32_t parent = kNil;
        std::uint32_t slot = 0;
        bool dead = false;
        // Sorted by key. For base nodes these are all elements.
        std::vector<std::uint32_t> elems;
        // elems.size() + 1 entries for non-base nodes, kNil when empty.
        std::vector<std::uint32_t> children;
        Index index;
    };

    static unsigned floor_lglg(std::uint64_t w) {
        unsigned lg = 0;
        while ((w >> (lg + 1)) != 0) ++lg;
        unsigned r = 0;
        while ((lg >> (r + 1)) != 0) ++r;
        return r;
    }

    const Element& check(ElementHandle h) const {
        if (h.id >= elems_.size()) throw Error(ErrorCode::invalid_handle, "unknown element handle");
        return elems_[h.id];
    }

    Element& check_mut(ElementHandle h) {
        if (h.id >= elems_.size()) throw Error(ErrorCode::invalid_handle, "unknown element handle");
        return elems_[h.id];
    }

    [[nodiscard]] Found found(std::uint32_t e) const {
        return Found{elems_[e].key, elems_[e].weight, elems_[e].value, ElementHandle{e}};
    }

    std::uint32_t new_node(unsigned level, std::uint32_t parent, std::uint32_t slot) {
        Node n;
        n.level = level;
        n.parent = parent;
        n.slot = slot;
        if (level > 1) {
            n.children.assign(1, kNil);
            n.index = Index({}, universe_);
        }
        nodes_.push_back(std::move(n));
        return static_cast<std::uint32_t>(nodes_.size() - 1);
    }

    void rebuild_index(std::uint32_t v) {
        Node& n = nodes_[v];
        if (n.level == 1) return;
        std::vector<Key> keys;
        keys.reserve(n.elems.size());
        for (std::uint32_t e : n.elems) keys.push_back(elems_[e].key);
        n.index = Index(std::move(keys), universe_);
    }

    // Adds one unit of weight to v and every ancestor, splitting bottom-up.
    void add_weight_from(std::uint32_t v) {
        while (v != kNil) {
            const std::uint32_t up = nodes_[v].parent;
            if (++nodes_[v].weight >= split_weight(nodes_[v].level)) split(v);
            v = up;
        }
    }

    std::uint64_t child_weight(const Node& n, std::size_t slot) const {
        if (n.children.empty()) return 0;
        const std::uint32_t c = n.children[slot];
        return c == kNil ? 0 : nodes_[c].weight;
    }

    void split(std::uint32_t v) {
        ++probes().splits;
        const unsigned level = nodes_[v].level;
        const std::uint64_t total = nodes_[v].weight;
        const std::uint64_t hi = capacity(level + 1) + capacity(level);
        const std::uint64_t lo = capacity(level + 1) - capacity(level);

        // Sweep for the first splitter e_i with both sides light enough and
        // both sides-plus-e_i heavy enough.
        std::size_t pick = nodes_[v].elems.size();
        std::uint64_t before = child_weight(nodes_[v], 0);
        std::uint64_t left_weight = 0;
        for (std::size_t i = 0; i < nodes_[v].elems.size(); ++i) {
            const std::uint64_t w = elems_[nodes_[v].elems[i]].weight;
            const std::uint64_t after = total - before - w;
            if (before < hi && after < hi && before + w >= lo && after + w >= lo) {
                pick = i;
                left_weight = before;
                break;
            }
            before += w + child_weight(nodes_[v], i + 1);
        }
        if (pick == nodes_[v].elems.size()) throw std::logic_error("wexp split: no admissible splitter");

        const std::uint32_t promoted = nodes_[v].elems[pick];
        const std::uint64_t right_weight = total - left_weight - elems_[promoted].weight;
        const std::uint32_t parent = nodes_[v].parent;
        const std::uint32_t slot = nodes_[v].slot;

        const std::uint32_t right = new_node(level, kNil, 0);
        {
            Node& left = nodes_[v];
            Node& r = nodes_[right];
            r.elems.assign(left.elems.begin() + static_cast<std::ptrdiff_t>(pick + 1), left.elems.end());
            left.elems.resize(pick);
            if (level > 1) {
                r.children.assign(left.children.begin() + static_cast<std::ptrdiff_t>(pick + 1),
                                  left.children.end());
                left.children.resize(pick + 1);
            }
            left.weight = left_weight;
            r.weight = right_weight;
        }
        for (std::uint32_t e : nodes_[right].elems) elems_[e].node = right;
        for (std::size_t i = 0; i < nodes_[right].children.size(); ++i) {
            const std::uint32_t c = nodes_[right].children[i];
            if (c == kNil) continue;
            nodes_[c].parent = right;
            nodes_[c].slot = static_cast<std::uint32_t>(i);
        }
        rebuild_index(v);
        rebuild_index(right);

        const std::uint32_t left_link = left_weight ? v : retire(v);
        const std::uint32_t right_link = right_weight ? right : retire(right);

        if (parent == kNil) {
            const std::uint32_t top = new_node(level + 1, kNil, 0);
            Node& t = nodes_[top];
            t.weight = total;
            t.elems = {promoted};
            t.children = {left_link, right_link};
            root_ = top;
            attach(left_link, top, 0);
            attach(right_link, top, 1);
            elems_[promoted].node = top;
            rebuild_index(top);
            return;
        }
        Node& p = nodes_[parent];
        p.elems.insert(p.elems.begin() + slot, promoted);
        p.children[slot] = left_link;
        p.children.insert(p.children.begin() + slot + 1, right_link);
        for (std::size_t i = slot; i < p.children.size(); ++i) attach(p.children[i], parent, static_cast<std::uint32_t>(i));
        elems_[promoted].node = parent;
        rebuild_index(parent);
    }

    void attach(std::uint32_t child, std::uint32_t parent, std::uint32_t slot) {
        if (child == kNil) return;
        nodes_[child].parent = parent;
        nodes_[child].slot = slot;
    }

    std::uint32_t retire(std::uint32_t v) {
        nodes_[v].dead = true;
        nodes_[v].elems.clear();
        nodes_[v].children.clear();
        nodes_[v].index = Index{};
        return kNil;
    }

    // Returns the recomputed weight of the subtree at v.
    std::uint64_t audit_node(std::uint32_t v, std::optional<Key> low, std::optional<Key> high,
                             std::vector<std::string>& bad, std::size_t& seen) const {
        const Node& n = nodes_[v];
        const std::string at = "node " + std::to_string(v) + " (level " + std::to_string(n.level) + ")";
        if (n.dead) bad.push_back(at + " is retired but reachable");
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < n.elems.size(); ++i) {
            const Element& e = elems_[n.elems[i]];
            ++seen;
            sum += e.weight;
            if (e.node != v) bad.push_back(at + ": element " + std::to_string(e.key) + " has a stale link");
            if ((low && e.key <= *low) || (high && e.key >= *high)) bad.push_back(at + ": key order violated");
            if (i > 0 && elems_[n.elems[i - 1]].key >= e.key) bad.push_back(at + ": splitters unsorted");
        }
        if (n.level > 1) {
            if (n.children.size() != n.elems.size() + 1) bad.push_back(at + ": child count mismatch");
            if (n.index.size() != n.elems.size()) bad.push_back(at + ": index size mismatch");
            for (std::size_t i = 0; i < n.elems.size() && i < n.index.size(); ++i) {
                if (n.index.key(i) != elems_[n.elems[i]].key) bad.push_back(at + ": index out of date");
            }
            std::vector<std::uint64_t> cw(n.children.size(), 0);
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                const std::uint32_t c = n.children[i];
                if (c == kNil) continue;
                const Node& cn = nodes_[c];
                if (cn.parent != v || cn.slot != i) bad.push_back(at + ": broken child link " + std::to_string(i));
                if (cn.level + 1 != n.level) bad.push_back(at + ": child level is not one lower");
                std::optional<Key> clo = i == 0 ? low : std::optional<Key>(elems_[n.elems[i - 1]].key);
                std::optional<Key> chi = i == n.elems.size() ? high : std::optional<Key>(elems_[n.elems[i]].key);
                cw[i] = audit_node(c, clo, chi, bad, seen);
                sum += cw[i];
            }
            const std::uint64_t floor = group_floor(n.level);
            for (std::size_t i = 0; i + 1 < n.elems.size(); ++i) {
                const std::uint64_t group = elems_[n.elems[i]].weight + cw[i + 1] + elems_[n.elems[i + 1]].weight;
                if (group <= floor) {
                    bad.push_back(at + ": adjacent splitter group " + std::to_string(i) + " weighs " +
                                  std::to_string(group) + " <= " + std::to_string(floor));
                }
            }
            if (floor > 0 && n.level < kMaxLevel && n.elems.size() * floor > 4 * capacity(n.level + 1)) {
                bad.push_back(at + ": " + std::to_string(n.elems.size()) + " splitters exceed the size bound");
            }
        } else if (!n.children.empty()) {
            bad.push_back(at + ": base node with children");
        }
        if (sum != n.weight) {
            bad.push_back(at + ": stored weight " + std::to_string(n.weight) + " != " + std::to_string(sum));
        }
        if (n.weight >= split_weight(n.level)) bad.push_back(at + ": weight at or above split threshold");
        return sum;
    }

    Key universe_;
    std::uint32_t root_ = kNil;
    std::vector<Element> elems_;
    std::vector<Node> nodes_;
};

}  // namespace triekit
