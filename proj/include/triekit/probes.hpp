#pragma once

#include <cstdint>

namespace triekit {

// Instrumentation counters. Every structure in the library bumps these as it
// touches memory; callers reset them between reported units.
struct ProbeCounters {
    std::uint64_t dict_probes = 0;
    std::uint64_t dict_cells = 0;
    std::uint64_t static_pred_queries = 0;
    std::uint64_t static_pred_probes = 0;
    std::uint64_t dyn_pred_probes = 0;
    std::uint64_t wexp_levels_descended = 0;
    std::uint64_t chars_compared = 0;
    std::uint64_t child_search_steps = 0;
    std::uint64_t splits = 0;
    std::uint64_t promotions = 0;
    std::uint64_t rebalance_steps = 0;
    std::uint64_t promotion_steps = 0;

    ProbeCounters& operator+=(const ProbeCounters& o) noexcept {
        dict_probes += o.dict_probes;
        dict_cells += o.dict_cells;
        static_pred_queries += o.static_pred_queries;
        static_pred_probes += o.static_pred_probes;
        dyn_pred_probes += o.dyn_pred_probes;
        wexp_levels_descended += o.wexp_levels_descended;
        chars_compared += o.chars_compared;
        child_search_steps += o.child_search_steps;
        splits += o.splits;
        promotions += o.promotions;
        rebalance_steps += o.rebalance_steps;
        promotion_steps += o.promotion_steps;
        return *this;
    }
};

namespace detail {
inline thread_local ProbeCounters tls_counters;
}

[[nodiscard]] inline ProbeCounters& probes() noexcept { return detail::tls_counters; }
inline void reset_probes() noexcept { detail::tls_counters = ProbeCounters{}; }

}  // namespace triekit
