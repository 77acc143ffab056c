#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>
#include <vector>

#include "triekit/det_dictionary.hpp"
#include "triekit/dynamic_predecessor.hpp"
#include "triekit/static_predecessor.hpp"

using namespace triekit;

namespace {

std::optional<std::uint64_t> scan_pred(const std::vector<std::uint64_t>& keys, std::uint64_t x) {
    std::optional<std::uint64_t> best;
    for (auto k : keys) {
        if (k <= x) best = k;
    }
    return best;
}

std::vector<std::uint64_t> random_keys(std::mt19937_64& rng, std::size_t k, std::uint64_t u) {
    std::set<std::uint64_t> s;
    while (s.size() < std::min<std::uint64_t>(k, u)) s.insert(rng() % u);
    return {s.begin(), s.end()};
}

}  // namespace

TEST(DetDictionary, SmallExample) {
    DetDictionary<std::uint32_t> d({{0, 10}, {5, 11}, {9, 12}});
    EXPECT_EQ(d.lookup(5), 11u);
    EXPECT_EQ(d.lookup(0), 10u);
    EXPECT_FALSE(d.lookup(6).has_value());
}

TEST(DetDictionary, EmptyLookup) {
    DetDictionary<std::uint32_t> d;
    EXPECT_FALSE(d.lookup(0).has_value());
}

TEST(DetDictionary, DuplicateRejected) {
    try {
        DetDictionary<std::uint32_t> d({{1, 1}, {1, 2}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::duplicate_key);
    }
}

TEST(DetDictionary, RandomAgainstScanWithProbeBound) {
    std::mt19937_64 rng(1);
    std::map<std::uint64_t, std::uint32_t> ref;
    while (ref.size() < 1000) ref[rng()] = static_cast<std::uint32_t>(rng());
    DetDictionary<std::uint32_t> d(std::vector<std::pair<std::uint64_t, std::uint32_t>>(ref.begin(), ref.end()));
    EXPECT_LE(d.table_size(), 4 * ref.size() + 1);
    for (const auto& [k, v] : ref) {
        reset_probes();
        EXPECT_EQ(d.lookup(k), v);
        EXPECT_LE(probes().dict_cells, DetDictionary<std::uint32_t>::kMaxProbes);
    }
    int absent = 0;
    while (absent < 1000) {
        const std::uint64_t k = rng();
        if (ref.count(k)) continue;
        ++absent;
        reset_probes();
        EXPECT_FALSE(d.lookup(k).has_value());
        EXPECT_LE(probes().dict_cells, DetDictionary<std::uint32_t>::kMaxProbes);
    }
}

TEST(DetDictionary, AssignExisting) {
    DetDictionary<std::uint32_t> d({{3, 1}, {4, 2}});
    EXPECT_TRUE(d.assign(3, 9));
    EXPECT_FALSE(d.assign(5, 9));
    EXPECT_EQ(d.find(3), 9u);
}

TEST(StaticPredecessor, Examples) {
    StaticPredecessor p({2, 5, 9}, 16);
    EXPECT_EQ(p.pred(8), 5u);
    EXPECT_EQ(p.pred(2), 2u);
    EXPECT_FALSE(p.pred(1).has_value());
    EXPECT_EQ(p.pred(15), 9u);
}

TEST(StaticPredecessor, UnsortedRejected) {
    try {
        StaticPredecessor p({5, 2}, 16);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::invalid_input);
    }
    EXPECT_THROW(StaticPredecessor({1, 1}, 16), Error);
    EXPECT_THROW(StaticPredecessor({1, 16}, 16), Error);
}

TEST(StaticPredecessor, ExhaustiveSmallUniverses) {
    std::mt19937_64 rng(2);
    for (std::uint64_t u : {1ULL, 2ULL, 3ULL, 17ULL, 256ULL, 4096ULL}) {
        for (int round = 0; round < 10; ++round) {
            auto keys = random_keys(rng, rng() % (u + 1), u);
            for (std::size_t rate : {std::size_t{0}, std::size_t{1}, std::size_t{3}}) {
                StaticPredecessor p(keys, u, rate);
                LayeredStaticPredecessor l(keys, u);
                for (std::uint64_t x = 0; x < u; ++x) {
                    const auto want = scan_pred(keys, x);
                    ASSERT_EQ(p.pred(x), want) << "u=" << u << " x=" << x;
                    ASSERT_EQ(l.pred(x), want) << "u=" << u << " x=" << x;
                }
            }
        }
    }
}

TEST(StaticPredecessor, LargeUniverseRandom) {
    std::mt19937_64 rng(3);
    const std::uint64_t u = std::uint64_t{1} << 48;
    auto keys = random_keys(rng, 5000, u);
    StaticPredecessor p(keys, u);
    LayeredStaticPredecessor l(keys, u);
    for (int i = 0; i < 5000; ++i) {
        const std::uint64_t x = i % 2 ? rng() % u : keys[rng() % keys.size()] + (rng() % 3) - 1;
        auto it = std::upper_bound(keys.begin(), keys.end(), x);
        std::optional<std::uint64_t> want;
        if (it != keys.begin()) want = *std::prev(it);
        ASSERT_EQ(p.pred(x), want);
        ASSERT_EQ(l.pred(x), want);
    }
}

TEST(StaticPredecessor, ProbeCountIsDoublyLogarithmic) {
    std::mt19937_64 rng(4);
    const std::uint64_t u = std::uint64_t{1} << 32;
    auto keys = random_keys(rng, 20000, u);
    StaticPredecessor p(keys, u);
    std::uint64_t worst = 0;
    for (int i = 0; i < 2000; ++i) {
        reset_probes();
        (void)p.pred(rng() % u);
        worst = std::max(worst, probes().static_pred_probes);
        EXPECT_EQ(probes().static_pred_queries, 1u);
    }
    // lg 32 = 5 dictionary rounds of 2 cells, plus lg 32 block comparisons.
    EXPECT_LE(worst, 2u * 7 + 6);
}

TEST(LayeredPredecessor, Examples) {
    std::vector<std::uint64_t> dense(100);
    for (std::uint64_t i = 0; i < 100; ++i) dense[i] = i;
    EXPECT_EQ(LayeredStaticPredecessor(dense, 128).pred(57), 57u);
    std::vector<std::uint64_t> squares;
    for (std::uint64_t i = 0; i < 32; ++i) squares.push_back(i * i);
    LayeredStaticPredecessor sq(squares, 2048);
    EXPECT_EQ(sq.pred(50), 49u);
    EXPECT_EQ(sq.pred(1024), 961u);
}

TEST(DynamicPredecessor, Examples) {
    DynamicPredecessor d;
    EXPECT_FALSE(d.pred(5).has_value());
    d.insert(7);
    d.insert(3);
    d.insert(11);
    EXPECT_EQ(d.pred(10), 7u);
    EXPECT_FALSE(d.insert(7));
    EXPECT_EQ(d.size(), 3u);
}

TEST(DynamicPredecessor, RandomInterleavedAgainstSet) {
    std::mt19937_64 rng(6);
    for (std::uint64_t u : {std::uint64_t{1} << 8, std::uint64_t{1} << 16, std::uint64_t{1} << 32}) {
        DynamicPredecessor d(u);
        std::set<std::uint64_t> ref;
        for (int op = 0; op < 100000; ++op) {
            const std::uint64_t x = rng() % u;
            if (rng() % 2) {
                EXPECT_EQ(d.insert(x), ref.insert(x).second);
            } else {
                auto it = ref.upper_bound(x);
                std::optional<std::uint64_t> want;
                if (it != ref.begin()) want = *std::prev(it);
                ASSERT_EQ(d.pred(x), want);
            }
        }
        EXPECT_TRUE(d.tree().audit().empty());
    }
}
