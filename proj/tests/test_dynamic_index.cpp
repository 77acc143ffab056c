#include <gtest/gtest.h>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "triekit/dynamic_index.hpp"

using namespace triekit;

namespace {

std::vector<Code> bytes(const std::string& s) { return encode_text(s, 256).codes; }

void expect_clean(const DynTrieIndex& idx) {
    const auto bad = idx.audit();
    ASSERT_TRUE(bad.empty()) << bad.size() << " violations, first: " << bad.front();
}

void compare(const DynTrieIndex& idx, const oracle::SortedStrings& ref, const std::vector<Code>& p) {
    const MatchResult got = idx.search(p);
    const auto want = ref.prefix(p);
    ASSERT_EQ(got.found(), want.found);
    ASSERT_EQ(got.matched_len, want.found ? p.size() : want.matched_len);
    if (want.found) {
        ASSERT_EQ(got.lo, want.lo);
        ASSERT_EQ(got.hi, want.hi);
    }
    const auto pr = ref.predecessor(p);
    const auto gp = idx.predecessor(p);
    ASSERT_EQ(gp.has_value(), pr.has_value());
    if (pr) {
        ASSERT_EQ(*gp, ref.ids[*pr]);
    }
}

}  // namespace

TEST(DynIndex, SmallExample) {
    DynTrieIndex idx(256);
    EXPECT_EQ(idx.insert(bytes("abc")), 0u);
    EXPECT_EQ(idx.insert(bytes("abd")), 1u);
    EXPECT_EQ(idx.insert(bytes("abe")), 2u);
    expect_clean(idx);
    auto r = idx.search(bytes("ab"));
    ASSERT_TRUE(r.found());
    EXPECT_EQ(r.lo, 0u);
    EXPECT_EQ(r.hi, 2u);
    EXPECT_EQ(r.outcome, Outcome::matched_at_node);
    EXPECT_EQ(idx.search(bytes("abd")).lo, 1u);
    EXPECT_FALSE(idx.search(bytes("abf")).found());
    EXPECT_EQ(idx.search(bytes("abf")).matched_len, 2u);
    EXPECT_EQ(idx.predecessor(bytes("abz")), 2u);
    EXPECT_EQ(idx.predecessor(bytes("abd")), 1u);
    EXPECT_FALSE(idx.predecessor(bytes("aa")).has_value());
    EXPECT_EQ(idx.heavy_count(), 0u);
}

TEST(DynIndex, EmptyIndex) {
    DynTrieIndex idx(16);
    EXPECT_FALSE(idx.search({}).found());
    EXPECT_FALSE(idx.predecessor(std::vector<Code>{3}).has_value());
    expect_clean(idx);
}

TEST(DynIndex, DuplicateAndAlphabet) {
    DynTrieIndex idx(4);
    idx.insert(std::vector<Code>{1, 2});
    try {
        idx.insert(std::vector<Code>{1, 2});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::duplicate_key);
    }
    try {
        idx.insert(std::vector<Code>{5});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::alphabet_overflow);
    }
    EXPECT_EQ(idx.size(), 1u);
    expect_clean(idx);
}

TEST(DynIndex, RootTurnsHeavyAtThreshold) {
    DynTrieIndex idx(4);
    for (Code c = 1; c <= 3; ++c) idx.insert(std::vector<Code>{c});
    EXPECT_EQ(idx.heavy_count(), 0u);
    idx.insert(std::vector<Code>{4});
    EXPECT_TRUE(idx.heavy(idx.trie().root()));
    expect_clean(idx);
    // Grow a heavy child under code 1.
    for (Code c = 1; c <= 4; ++c) idx.insert(std::vector<Code>{1, c});
    EXPECT_GE(idx.heavy_count(), 2u);
    expect_clean(idx);
}

TEST(DynIndex, PromotionThresholds) {
    DynTrieIndex idx(1000);
    std::vector<std::uint64_t> at;
    for (Code c = 1; c <= 100; ++c) {
        reset_probes();
        idx.insert(std::vector<Code>{c});
        if (probes().promotions > 0) at.push_back(c);
        expect_clean(idx);
    }
    ASSERT_GE(at.size(), 4u);
    EXPECT_EQ(std::vector<std::uint64_t>(at.begin(), at.begin() + 4), (std::vector<std::uint64_t>{4, 8, 20, 66}));
    EXPECT_EQ(idx.level(idx.trie().root()), 4u);
}

TEST(DynIndex, ChainTailPromotedTogether) {
    DynTrieIndex idx(1000);
    for (Code c = 1; c <= 30; ++c) {
        idx.insert(std::vector<Code>{7, 7, 7, c});
        expect_clean(idx);
    }
    const NodeId root = idx.trie().root();
    const NodeId u = idx.trie().child(root, 7);
    ASSERT_NE(u, kNoNode);
    EXPECT_EQ(idx.level(root), idx.level(u));
    EXPECT_GE(idx.level(u), 3u);
}

TEST(DynIndex, RandomAgainstOracle) {
    std::mt19937_64 rng(31);
    for (int round = 0; round < 60; ++round) {
        const std::uint32_t sigma = std::vector<std::uint32_t>{1, 2, 3, 4, 16, 256, 1000}[round % 7];
        DynTrieIndex idx(sigma);
        std::set<std::vector<Code>> seen;
        std::vector<std::vector<Code>> inserted;
        const std::size_t k = 50 + rng() % 400;
        const std::size_t maxlen = round % 3 == 0 ? 40 : 10;
        for (std::size_t i = 0; i < 6 * k && inserted.size() < k; ++i) {
            std::vector<Code> s;
            if (!inserted.empty() && rng() % 2) {
                // Extend or cut an existing string to build deep shared paths.
                s = inserted[rng() % inserted.size()];
                if (rng() % 2 && !s.empty()) s.resize(rng() % s.size());
                const std::size_t extra = rng() % 4;
                for (std::size_t j = 0; j < extra; ++j) s.push_back(1 + static_cast<Code>(rng() % sigma));
            } else {
                s.resize(rng() % maxlen);
                for (auto& c : s) c = 1 + static_cast<Code>(rng() % sigma);
            }
            if (!seen.insert(s).second) continue;
            ASSERT_EQ(idx.insert(s), inserted.size());
            inserted.push_back(s);
            if (inserted.size() % 37 == 0) {
                expect_clean(idx);
                const auto ref = oracle::SortedStrings::of_strings(inserted);
                for (int q = 0; q < 20; ++q) compare(idx, ref, oracle::random_pattern(rng, ref.items, sigma));
            }
        }
        expect_clean(idx);
        const auto ref = oracle::SortedStrings::of_strings(inserted);
        for (int q = 0; q < 200; ++q) compare(idx, ref, oracle::random_pattern(rng, ref.items, sigma));
        for (std::size_t i = 0; i < inserted.size(); ++i) ASSERT_EQ(idx.string(i), inserted[i]);
    }
}

TEST(DynIndex, LargeAlphabetManyInserts) {
    std::mt19937_64 rng(32);
    const std::uint32_t sigma = 1 << 16;
    DynTrieIndex idx(sigma);
    Text t = oracle::repetitive_text(rng, 3000, 64);
    std::vector<std::vector<Code>> inserted;
    std::set<std::vector<Code>> seen;
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<Code> s(t.codes.begin() + static_cast<std::ptrdiff_t>(i),
                            t.codes.begin() + static_cast<std::ptrdiff_t>(std::min(t.size(), i + 50)));
        if (!seen.insert(s).second) continue;
        idx.insert(s);
        inserted.push_back(s);
    }
    expect_clean(idx);
    const auto ref = oracle::SortedStrings::of_strings(inserted);
    for (int q = 0; q < 500; ++q) compare(idx, ref, oracle::random_pattern(rng, ref.items, 64));
}
