#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "triekit/capacity.hpp"
#include "triekit/wexp_tree.hpp"

using namespace triekit;

namespace {

std::string joined(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += s + "\n";
    return out;
}

}  // namespace

TEST(Capacity, Table) {
    const std::uint64_t want[] = {2, 2, 4, 10, 33, 193};
    for (unsigned l = 0; l < 6; ++l) EXPECT_EQ(capacity(l), want[l]);
    for (unsigned l = 0; l <= kMaxLevel; ++l) {
        const long double exact = std::floor(std::pow(2.0L, std::pow(1.5L, static_cast<long double>(l))));
        if (l <= 8) {
            EXPECT_EQ(static_cast<long double>(capacity(l)), exact) << l;
        }
        if (l > 0) {
            EXPECT_LE(capacity(l - 1), capacity(l));
        }
    }
    // f^2(l+2) <= f^3(l+1) holds with equality before flooring; the floors
    // cost at most a factor of two.
    for (unsigned l = 1; l + 2 <= 8; ++l) {
        const long double a = capacity(l + 2), b = capacity(l + 1);
        EXPECT_LE(a * a, 2 * b * b * b) << l;
        EXPECT_NEAR(2 * std::pow(1.5L, l + 2.0L), 3 * std::pow(1.5L, l + 1.0L), 1e-9L);
    }
    EXPECT_EQ(split_weight(0), 4u);
    EXPECT_EQ(split_weight(1), 8u);
    EXPECT_EQ(split_weight(2), 20u);
    EXPECT_EQ(split_weight(3), 66u);
    EXPECT_EQ(split_weight(kMaxLevel), kUnbounded);
}

TEST(WexpTree, FirstInsert) {
    WexpTree<int> t(256);
    auto h = t.insert(5, 0);
    EXPECT_EQ(t.root_level(), 1u);
    EXPECT_EQ(t.total_weight(), 1u);
    EXPECT_EQ(t.weight(h), 1u);
    EXPECT_EQ(t.pred(5)->key, 5u);
}

TEST(WexpTree, BaseSplitAtEight) {
    WexpTree<int> t(256);
    reset_probes();
    for (std::uint64_t k = 1; k <= 7; ++k) t.insert(k, 0);
    EXPECT_EQ(probes().splits, 0u);
    EXPECT_EQ(t.root_level(), 1u);
    t.insert(8, 0);
    EXPECT_EQ(probes().splits, 1u);
    EXPECT_EQ(t.root_level(), 2u);
    EXPECT_EQ(t.total_weight(), 8u);
    EXPECT_TRUE(t.audit().empty()) << joined(t.audit());
}

TEST(WexpTree, SplitSidesWithinBounds) {
    // Level-1 node at W = 8: each side lies in [2, 6].
    std::mt19937_64 rng(1);
    for (int round = 0; round < 200; ++round) {
        WexpTree<int> t(1 << 16);
        std::vector<ElementHandle> hs;
        while (t.root_level() <= 1) {
            if (hs.empty() || rng() % 2) {
                std::uint64_t k = rng() % (1 << 16);
                if (t.find(k)) continue;
                hs.push_back(t.insert(k, 0));
            } else {
                t.increase(hs[rng() % hs.size()]);
            }
        }
        auto all = t.elements();
        std::uint64_t root_key = 0, root_w = 0;
        for (const auto& e : all) {
            if (t.container_level(e.handle) == 2) {
                root_key = e.key;
                root_w = e.weight;
            }
        }
        std::uint64_t left = 0;
        for (const auto& e : all) {
            if (e.key < root_key) left += e.weight;
        }
        const std::uint64_t right = 8 - left - root_w;
        EXPECT_LT(left, 6u);
        EXPECT_LT(right, 6u);
        EXPECT_GE(left + root_w, 2u);
        EXPECT_GE(right + root_w, 2u);
        EXPECT_TRUE(t.audit().empty()) << joined(t.audit());
    }
}

TEST(WexpTree, DuplicateAndBadHandle) {
    WexpTree<int> t(64);
    t.insert(3, 0);
    try {
        t.insert(3, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::duplicate_key);
    }
    try {
        t.increase(ElementHandle{17});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::invalid_handle);
    }
    EXPECT_THROW(t.insert(64, 0), Error);
}

TEST(WexpTree, SingleElementIncreased) {
    WexpTree<int> t(1 << 16);
    auto h = t.insert(42, 7);
    for (int i = 0; i < 100; ++i) t.increase(h);
    EXPECT_EQ(t.total_weight(), 101u);
    auto f = t.pred(1000);
    ASSERT_TRUE(f);
    EXPECT_EQ(f->key, 42u);
    EXPECT_EQ(f->weight, 101u);
    EXPECT_EQ(f->value, 7);
    EXPECT_FALSE(t.pred(41));
    EXPECT_TRUE(t.audit().empty()) << joined(t.audit());
}

TEST(WexpTree, PredExamples) {
    WexpTree<int> t(16);
    t.insert(3, 0);
    t.insert_weighted(9, 0, 4);
    auto f = t.pred(7);
    ASSERT_TRUE(f);
    EXPECT_EQ(f->key, 3u);
    EXPECT_EQ(f->weight, 1u);
    EXPECT_FALSE(t.pred(2));
    EXPECT_EQ(t.pred(9)->weight, 4u);
}

TEST(WexpTree, HeavyElementBecomesHighSplitter) {
    std::mt19937_64 rng(2);
    WexpTree<int> t(1 << 20);
    std::vector<ElementHandle> hs;
    for (int i = 0; i < 3000; ++i) {
        std::uint64_t k = rng() % (1 << 20);
        if (!t.find(k)) hs.push_back(t.insert(k, 0));
    }
    auto heavy = hs[hs.size() / 2];
    for (int i = 0; i < 500; ++i) t.increase(heavy);
    // Weight 501 >= 2 f(5) = 386, so the element cannot live below level 5.
    const unsigned c = t.container_level(heavy);
    EXPECT_TRUE(c == t.root_level() || t.weight(heavy) < split_weight(c));
    EXPECT_GE(c, 5u);
    EXPECT_TRUE(t.audit().empty()) << joined(t.audit());
}

TEST(WexpTree, RandomWorkloadMatchesOracle) {
    std::mt19937_64 rng(3);
    for (std::uint64_t u : {std::uint64_t{1} << 8, std::uint64_t{1} << 16, std::uint64_t{1} << 32}) {
        WexpTree<std::uint64_t> t(u);
        std::map<std::uint64_t, std::uint64_t> ref;
        std::vector<std::pair<std::uint64_t, ElementHandle>> hs;
        for (int op = 0; op < 20000; ++op) {
            const int kind = static_cast<int>(rng() % 3);
            if (kind == 0) {
                const std::uint64_t k = rng() % u;
                if (ref.count(k)) {
                    EXPECT_THROW(t.insert(k, k), Error);
                } else {
                    hs.emplace_back(k, t.insert(k, k));
                    ref[k] = 1;
                }
            } else if (kind == 1 && !hs.empty()) {
                auto [k, h] = hs[rng() % hs.size()];
                t.increase(h);
                ++ref[k];
            } else {
                const std::uint64_t x = rng() % u;
                auto it = ref.upper_bound(x);
                auto f = t.pred(x);
                if (it == ref.begin()) {
                    ASSERT_FALSE(f);
                } else {
                    --it;
                    ASSERT_TRUE(f);
                    ASSERT_EQ(f->key, it->first);
                    ASSERT_EQ(f->weight, it->second);
                    ASSERT_EQ(f->value, it->first);
                }
            }
            if (op % 500 == 0) {
                ASSERT_TRUE(t.audit().empty()) << joined(t.audit());
            }
        }
        EXPECT_TRUE(t.audit().empty()) << joined(t.audit());
    }
}

TEST(WexpTree, LayeredIndexVariant) {
    std::mt19937_64 rng(4);
    WexpTree<int, LayeredStaticPredecessor> t(1 << 16);
    std::map<std::uint64_t, std::uint64_t> ref;
    for (int i = 0; i < 5000; ++i) {
        const std::uint64_t k = rng() % (1 << 16);
        if (ref.count(k)) continue;
        t.insert(k, 0);
        ref[k] = 1;
    }
    for (const auto& [k, w] : ref) EXPECT_EQ(t.find(k)->weight, w);
    EXPECT_TRUE(t.audit().empty()) << joined(t.audit());
}
