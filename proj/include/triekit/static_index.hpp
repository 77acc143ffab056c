#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "compacted_trie.hpp"
#include "det_dictionary.hpp"
#include "error.hpp"
#include "probes.hpp"
#include "static_predecessor.hpp"
#include "text.hpp"

namespace triekit {

/// Heavy threshold max(2, ceil((lg lg max(sigma, 4))^2)).
[[nodiscard]] inline std::uint64_t heavy_threshold(std::uint32_t sigma) {
    const double lglg = std::log2(std::log2(std::max<double>(sigma, 4)));
    return std::max<std::uint64_t>(2, static_cast<std::uint64_t>(std::ceil(lglg * lglg - 1e-9)));
}

namespace detail {

/// Everything the two static engines share: the trie, the heavy flags, the
/// light-subtree binary searches over leaf ranks, and the generic descent.
/// `Nav` supplies two per-heavy-node operations:
///   step(v, c)  -> child whose edge starts with c, or kNoNode
///   below(v, c) -> child with the largest first character < c, or kNoNode
template <typename Nav>
class TrieSearch {
public:
    [[nodiscard]] const CompactedTrie& trie() const noexcept { return trie_; }
    [[nodiscard]] std::uint32_t sigma() const noexcept { return sigma_; }
    [[nodiscard]] std::uint64_t threshold() const noexcept { return threshold_; }
    [[nodiscard]] bool heavy(NodeId v) const { return heavy_[v] != 0; }
    [[nodiscard]] std::size_t heavy_count() const noexcept { return heavy_count_; }
    [[nodiscard]] std::size_t leaf_count() const noexcept { return trie_.leaves_by_rank().size(); }

    [[nodiscard]] std::uint64_t leaf_id(std::uint64_t rank) const {
        return trie_.node(trie_.leaves_by_rank().at(rank)).leaf_id;
    }

    /// The stored string (or suffix) of the given rank, without sentinel.
    [[nodiscard]] std::vector<Code> leaf_string(std::uint64_t rank) const {
        const LeafRef ref = trie_.node(trie_.leaves_by_rank().at(rank)).ref;
        const auto& s = trie_.string(ref.str);
        return {s.begin() + static_cast<std::ptrdiff_t>(ref.offset), s.end() - 1};
    }

    /// Leaf ids (string ids or text positions) of ranks lo..hi, in rank order.
    [[nodiscard]] std::vector<std::uint64_t> enumerate(std::uint64_t lo, std::uint64_t hi) const {
        if (lo > hi || hi >= leaf_count()) {
            throw Error(ErrorCode::invalid_input,
                        "interval [" + std::to_string(lo) + ", " + std::to_string(hi) + "] out of range");
        }
        std::vector<std::uint64_t> out;
        out.reserve(hi - lo + 1);
        for (std::uint64_t r = lo; r <= hi; ++r) out.push_back(trie_.node(trie_.leaves_by_rank()[r]).leaf_id);
        return out;
    }

    [[nodiscard]] MatchResult prefix_query(std::span<const Code> p) const {
        check_codes(p, Alphabet{sigma_});
        const std::uint64_t m = p.size();
        if (leaf_count() == 0) return MatchResult{};
        NodeId v = trie_.root();
        std::uint64_t d = 0;
        while (true) {
            if (d == m) return whole_node(v, m);
            const NodeId w = nav().step(v, p[d]);
            if (w == kNoNode) return miss(d);
            const TrieNode& wn = trie_.node(w);
            if (!heavy(w)) return light_prefix(wn.lo, wn.hi, p, d + 1);
            const std::uint64_t j = edge_match(w, p, d);
            if (d + j == m) {
                return j == wn.edge_length() ? whole_node(w, m) : on_edge(w, j, m);
            }
            if (j < wn.edge_length()) return miss(d + j);
            v = w;
            d += j;
        }
    }

    /// Rank of the largest stored string S with S$ <= P$, or nullopt.
    [[nodiscard]] std::optional<std::uint64_t> predecessor_query(std::span<const Code> p) const {
        check_codes(p, Alphabet{sigma_});
        const std::uint64_t m = p.size();
        if (leaf_count() == 0) return std::nullopt;
        NodeId v = trie_.root();
        std::uint64_t d = 0;
        while (true) {
            const TrieNode& vn = trie_.node(v);
            if (d == m) {
                // P is a prefix of everything below v; only a string equal to
                // P (sentinel child) is not larger than P$.
                if (!vn.children.empty() && vn.children.front().first == kSentinel) return vn.lo;
                return before(vn.lo);
            }
            const NodeId w = nav().step(v, p[d]);
            if (w == kNoNode) {
                const NodeId b = nav().below(v, p[d]);
                return b == kNoNode ? before(vn.lo) : std::optional<std::uint64_t>(trie_.node(b).hi);
            }
            const TrieNode& wn = trie_.node(w);
            if (!heavy(w)) return light_pred(wn.lo, wn.hi, p, d + 1);
            const std::uint64_t j = edge_match(w, p, d);
            if (j < wn.edge_length()) {
                if (d + j == m || trie_.label_char(w, j) > p[d + j]) return before(wn.lo);
                return wn.hi;
            }
            v = w;
            d += j;
        }
    }

protected:
    TrieSearch(CompactedTrie trie, std::uint32_t sigma, std::uint64_t threshold)
        : trie_(std::move(trie)), sigma_(sigma), threshold_(threshold) {
        if (sigma_ == 0) throw Error(ErrorCode::invalid_input, "sigma must be positive");
        if (trie_.leaves_by_rank().size() != trie_.leaf_count()) {
            throw Error(ErrorCode::corrupt_trie, "trie has not been finalized");
        }
        if (auto bad = trie_.audit(); !bad.empty()) throw Error(ErrorCode::corrupt_trie, bad.front());
        if (trie_.leaf_count() > 0) {
            const TrieNode& root = trie_.node(trie_.root());
            if (root.lo != 0 || root.hi + 1 != trie_.leaf_count()) {
                throw Error(ErrorCode::corrupt_trie, "root interval does not cover all leaves");
            }
        }
        heavy_.assign(trie_.node_count(), 0);
        for (NodeId v = 0; v < trie_.node_count(); ++v) {
            const bool h = v == trie_.root() || (trie_.leaf_count() > 0 && trie_.leaves_below(v) >= threshold_);
            heavy_[v] = h ? 1 : 0;
            heavy_count_ += h;
        }
    }

    [[nodiscard]] std::vector<NodeId> heavy_children(NodeId v) const {
        std::vector<NodeId> out;
        for (const auto& [c, w] : trie_.node(v).children) {
            if (heavy(w)) out.push_back(w);
        }
        return out;
    }

    CompactedTrie trie_;
    std::uint32_t sigma_;
    std::uint64_t threshold_;
    std::vector<std::uint8_t> heavy_;
    std::size_t heavy_count_ = 0;

private:
    [[nodiscard]] const Nav& nav() const { return static_cast<const Nav&>(*this); }

    static std::optional<std::uint64_t> before(std::uint64_t rank) {
        if (rank == 0) return std::nullopt;
        return rank - 1;
    }

    static MatchResult miss(std::uint64_t matched) {
        MatchResult r;
        r.matched_len = matched;
        return r;
    }

    [[nodiscard]] MatchResult whole_node(NodeId v, std::uint64_t m) const {
        const TrieNode& n = trie_.node(v);
        return MatchResult{Outcome::matched_at_node, v, n.edge_length(), n.lo, n.hi, m};
    }

    [[nodiscard]] MatchResult on_edge(NodeId v, std::uint64_t offset, std::uint64_t m) const {
        const TrieNode& n = trie_.node(v);
        return MatchResult{Outcome::matched_on_edge, v, offset, n.lo, n.hi, m};
    }

    // Characters of w's edge matching p from position d; the first one is
    // already known to match.
    std::uint64_t edge_match(NodeId w, std::span<const Code> p, std::uint64_t d) const {
        const TrieNode& n = trie_.node(w);
        std::uint64_t j = 1;
        auto& pc = probes();
        while (j < n.edge_length() && d + j < p.size()) {
            ++pc.chars_compared;
            if (trie_.label_char(w, j) != p[d + j]) break;
            ++j;
        }
        return j;
    }

    struct Cmp {
        std::uint64_t lcp;
        int sign;
    };

    // Compares the string of rank r with p, skipping the first k characters
    // (known equal). `full` compares against p$; otherwise the string is
    // truncated to |p| characters first.
    Cmp compare(std::uint64_t r, std::span<const Code> p, std::uint64_t k, bool full) const {
        const LeafRef ref = trie_.node(trie_.leaves_by_rank()[r]).ref;
        const auto& s = trie_.string(ref.str);
        const std::uint64_t m = p.size();
        std::uint64_t h = k;
        auto& pc = probes();
        while (h < m) {
            ++pc.chars_compared;
            if (s[ref.offset + h] != p[h]) break;
            ++h;
        }
        if (h == m) {
            if (!full) return {h, 0};
            return {h, s[ref.offset + h] == kSentinel ? 0 : 1};
        }
        return {h, s[ref.offset + h] < p[h] ? -1 : 1};
    }

    // Binary search over ranks [lo, hi], all of which share `known` leading
    // characters with p. The smaller of the two boundary LCPs is skipped on
    // every probe.
    [[nodiscard]] MatchResult light_prefix(std::uint64_t lo, std::uint64_t hi, std::span<const Code> p,
                                           std::uint64_t known) const {
        const std::uint64_t m = p.size();
        if (known >= m) return locate(lo, hi, m);
        // Lower bound: first rank whose truncated string is >= p.
        std::uint64_t left = lo, right = hi + 1;  // search in [left, right)
        std::uint64_t llcp = known, rlcp = known;
        bool left_real = false, right_real = false;
        while (left < right) {
            const std::uint64_t mid = left + (right - left) / 2;
            const Cmp c = compare(mid, p, std::min(llcp, rlcp), false);
            if (c.sign < 0) {
                left = mid + 1;
                llcp = c.lcp;
                left_real = true;
            } else {
                right = mid;
                rlcp = c.lcp;
                right_real = true;
            }
        }
        const std::uint64_t lb = right;
        if (lb > hi || !right_real || rlcp < m) {
            std::uint64_t best = known;
            if (left_real) best = std::max(best, llcp);
            if (right_real && lb <= hi) best = std::max(best, rlcp);
            return miss(best);
        }
        // Upper bound: first rank past lb that does not start with p.
        left = lb + 1;
        right = hi + 1;
        llcp = m;
        rlcp = known;
        while (left < right) {
            const std::uint64_t mid = left + (right - left) / 2;
            const Cmp c = compare(mid, p, std::min(llcp, rlcp), false);
            if (c.sign == 0) {
                left = mid + 1;
            } else {
                right = mid;
                rlcp = c.lcp;
            }
        }
        return locate(lb, right - 1, m);
    }

    [[nodiscard]] std::optional<std::uint64_t> light_pred(std::uint64_t lo, std::uint64_t hi, std::span<const Code> p,
                                                          std::uint64_t known) const {
        // First rank in [lo, hi] whose string is > p$.
        std::uint64_t left = lo, right = hi + 1;
        std::uint64_t llcp = known, rlcp = known;
        while (left < right) {
            const std::uint64_t mid = left + (right - left) / 2;
            const Cmp c = compare(mid, p, std::min({llcp, rlcp, static_cast<std::uint64_t>(p.size())}), true);
            if (c.sign <= 0) {
                left = mid + 1;
                llcp = c.lcp;
            } else {
                right = mid;
                rlcp = c.lcp;
            }
        }
        return before(right);
    }

    // Locus of a match whose leaves are exactly ranks [lo, hi].
    [[nodiscard]] MatchResult locate(std::uint64_t lo, std::uint64_t hi, std::uint64_t m) const {
        NodeId u = trie_.leaves_by_rank()[lo];
        while (trie_.node(u).parent != kNoNode && trie_.node(trie_.node(u).parent).depth >= m) {
            u = trie_.node(u).parent;
        }
        const TrieNode& n = trie_.node(u);
        const std::uint64_t offset = m - (n.parent == kNoNode ? 0 : trie_.node(n.parent).depth);
        MatchResult r{n.depth == m ? Outcome::matched_at_node : Outcome::matched_on_edge, u, offset, lo, hi, m};
        return r;
    }
};

}  // namespace detail

/// Static compacted-trie index with heavy/light classification. Heavy nodes
/// (at least s leaves below, plus the root) route with a dictionary of heavy
/// children (branching) or a single heavy-child link (nonbranching), and a
/// static predecessor structure over the first characters of their light
/// children. Light subtrees are searched by binary search over leaf ranks.
class StaticTrieIndex : public detail::TrieSearch<StaticTrieIndex> {
    friend class detail::TrieSearch<StaticTrieIndex>;

public:
    StaticTrieIndex(CompactedTrie trie, std::uint32_t sigma)
        : StaticTrieIndex(std::move(trie), sigma, heavy_threshold(sigma)) {}

    StaticTrieIndex(CompactedTrie trie, std::uint32_t sigma, std::uint64_t threshold)
        : TrieSearch(std::move(trie), sigma, threshold) {
        slot_.assign(trie_.node_count(), kNoSlot);
        const std::uint64_t universe = std::uint64_t{sigma_} + 1;
        for (NodeId v = 0; v < trie_.node_count(); ++v) {
            if (!heavy(v) || trie_.node(v).children.empty()) continue;
            Payload pl;
            std::vector<std::pair<std::uint64_t, NodeId>> hh;
            std::vector<std::uint64_t> light_keys, all_keys;
            for (const auto& [c, w] : trie_.node(v).children) {
                all_keys.push_back(c);
                if (heavy(w)) {
                    hh.emplace_back(c, w);
                } else {
                    light_keys.push_back(c);
                    pl.light_nodes.push_back(w);
                }
            }
            pl.branching = hh.size() >= 2;
            if (pl.branching) {
                pl.heavy_dict.build(std::move(hh));
                ++branching_count_;
            } else if (hh.size() == 1) {
                pl.heavy_child = hh.front().second;
            }
            pl.light = StaticPredecessor(std::move(light_keys), universe);
            pl.all = StaticPredecessor(std::move(all_keys), universe);
            slot_[v] = static_cast<std::uint32_t>(payloads_.size());
            payloads_.push_back(std::move(pl));
        }
    }

    [[nodiscard]] bool branching(NodeId v) const {
        return slot_[v] != kNoSlot && payloads_[slot_[v]].branching;
    }
    [[nodiscard]] std::size_t branching_count() const noexcept { return branching_count_; }

    /// Entries held in all dictionaries and predecessor structures.
    [[nodiscard]] std::size_t payload_size() const {
        std::size_t total = 0;
        for (const auto& pl : payloads_) total += pl.heavy_dict.size() + pl.light.size() + pl.all.size();
        return total;
    }

private:
    static constexpr std::uint32_t kNoSlot = std::numeric_limits<std::uint32_t>::max();

    struct Payload {
        bool branching = false;
        DetDictionary<NodeId> heavy_dict;
        NodeId heavy_child = kNoNode;
        StaticPredecessor light;
        std::vector<NodeId> light_nodes;
        StaticPredecessor all;
    };

    [[nodiscard]] NodeId step(NodeId v, Code c) const {
        if (slot_[v] == kNoSlot) return kNoNode;
        const Payload& pl = payloads_[slot_[v]];
        if (pl.branching) {
            if (auto w = pl.heavy_dict.lookup(c)) return *w;
        } else if (pl.heavy_child != kNoNode && trie_.first_char(pl.heavy_child) == c) {
            return pl.heavy_child;
        }
        if (pl.light.empty()) return kNoNode;
        auto i = pl.light.pred_index(c);
        if (i && pl.light.key(*i) == c) return pl.light_nodes[*i];
        return kNoNode;
    }

    [[nodiscard]] NodeId below(NodeId v, Code c) const {
        if (slot_[v] == kNoSlot || c == 0) return kNoNode;
        auto i = payloads_[slot_[v]].all.pred_index(c - 1);
        return i ? trie_.node(v).children[*i].second : kNoNode;
    }

    std::vector<std::uint32_t> slot_;
    std::vector<Payload> payloads_;
    std::size_t branching_count_ = 0;
};

/// Suffix-tray style baseline: heavy threshold sigma, a full child array at
/// branching heavy nodes, the single heavy-child link plus a binary search
/// over the children at nonbranching heavy nodes.
class SuffixTrayIndex : public detail::TrieSearch<SuffixTrayIndex> {
    friend class detail::TrieSearch<SuffixTrayIndex>;

public:
    SuffixTrayIndex(CompactedTrie trie, std::uint32_t sigma) : TrieSearch(std::move(trie), sigma, sigma) {
        slot_.assign(trie_.node_count(), kNoSlot);
        link_.assign(trie_.node_count(), kNoNode);
        for (NodeId v = 0; v < trie_.node_count(); ++v) {
            if (!heavy(v)) continue;
            const auto hc = heavy_children(v);
            if (hc.size() >= 2) {
                std::vector<NodeId> a(std::size_t{sigma_} + 1, kNoNode);
                for (const auto& [c, w] : trie_.node(v).children) a[c] = w;
                slot_[v] = static_cast<std::uint32_t>(arrays_.size());
                arrays_.push_back(std::move(a));
            } else if (hc.size() == 1) {
                link_[v] = hc.front();
            }
        }
    }

    [[nodiscard]] bool branching(NodeId v) const { return slot_[v] != kNoSlot; }
    [[nodiscard]] std::size_t branching_count() const noexcept { return arrays_.size(); }
    [[nodiscard]] std::size_t array_cells() const noexcept { return arrays_.size() * (std::size_t{sigma_} + 1); }

private:
    static constexpr std::uint32_t kNoSlot = std::numeric_limits<std::uint32_t>::max();

    [[nodiscard]] NodeId step(NodeId v, Code c) const {
        if (slot_[v] != kNoSlot) return arrays_[slot_[v]][c];
        if (link_[v] != kNoNode && trie_.first_char(link_[v]) == c) return link_[v];
        const auto& ch = trie_.node(v).children;
        const std::size_t i = search(ch, c);
        return i < ch.size() && ch[i].first == c ? ch[i].second : kNoNode;
    }

    [[nodiscard]] NodeId below(NodeId v, Code c) const {
        const auto& ch = trie_.node(v).children;
        const std::size_t i = search(ch, c);
        return i == 0 ? kNoNode : ch[i - 1].second;
    }

    // First index whose character is >= c, counting comparisons.
    static std::size_t search(const std::vector<std::pair<Code, NodeId>>& ch, Code c) {
        std::size_t lo = 0, hi = ch.size();
        auto& pc = probes();
        while (lo < hi) {
            const std::size_t mid = lo + (hi - lo) / 2;
            ++pc.child_search_steps;
            if (ch[mid].first < c) lo = mid + 1;
            else hi = mid;
        }
        return lo;
    }

    std::vector<std::uint32_t> slot_;
    std::vector<NodeId> link_;
    std::vector<std::vector<NodeId>> arrays_;
};

/// Trie over a set of distinct strings; leaf ids are input positions.
[[nodiscard]] inline CompactedTrie build_string_trie(const std::vector<std::vector<Code>>& strings, std::uint32_t sigma) {
    CompactedTrie trie;
    for (std::size_t i = 0; i < strings.size(); ++i) {
        check_codes(strings[i], Alphabet{sigma});
        const std::uint32_t id = trie.add_string(strings[i]);
        trie.insert(LeafRef{id, 0}, i);
    }
    trie.finalize();
    return trie;
}

}  // namespace triekit
