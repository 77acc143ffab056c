#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "probes.hpp"
#include "wexp_tree.hpp"

namespace triekit {

/// Insert-only predecessor set: a WexpTree with every weight fixed at one.
/// Each key carries a 32-bit value.
class DynamicPredecessor {
public:
    using Key = std::uint64_t;
    using Value = std::uint32_t;

    explicit DynamicPredecessor(Key universe = Key{1} << 32) : tree_(universe) {}

    /// Returns false (and changes nothing) if the key is already present.
    bool insert(Key key, Value value = 0) {
        if (tree_.find(key)) return false;
        tree_.insert(key, value);
        return true;
    }

    [[nodiscard]] std::optional<std::pair<Key, Value>> pred_entry(Key x) const {
        const auto before = probes().wexp_levels_descended;
        auto f = tree_.pred(x);
        auto& pc = probes();
        pc.dyn_pred_probes += pc.wexp_levels_descended - before;
        if (!f) return std::nullopt;
        return std::make_pair(f->key, f->value);
    }

    [[nodiscard]] std::optional<Key> pred(Key x) const {
        auto e = pred_entry(x);
        if (!e) return std::nullopt;
        return e->first;
    }

    [[nodiscard]] bool contains(Key x) const {
        auto p = pred(x);
        return p && *p == x;
    }

    /// Replaces the value of an existing key; returns false if absent.
    bool set_value(Key key, Value value) {
        auto f = tree_.find(key);
        if (!f) return false;
        tree_.set_value(f->handle, value);
        return true;
    }

    [[nodiscard]] std::size_t size() const noexcept { return tree_.size(); }
    [[nodiscard]] bool empty() const noexcept { return tree_.empty(); }
    [[nodiscard]] Key universe() const noexcept { return tree_.universe(); }
    [[nodiscard]] const WexpTree<Value>& tree() const noexcept { return tree_; }

private:
    WexpTree<Value> tree_;
};

}  // namespace triekit
