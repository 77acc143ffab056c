#include <gtest/gtest.h>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "triekit/static_index.hpp"
#include "triekit/suffix_array.hpp"

using namespace triekit;

namespace {

std::vector<Code> bytes(const std::string& s) { return encode_text(s, 256).codes; }

StaticTrieIndex banana_index() { return StaticTrieIndex(build_suffix_tree(encode_text("banana", 256)), 256); }

StaticTrieIndex word_index(const std::vector<std::string>& words, std::uint32_t sigma = 256) {
    std::vector<std::vector<Code>> v;
    for (const auto& w : words) v.push_back(bytes(w));
    return StaticTrieIndex(build_string_trie(v, sigma), sigma);
}

template <typename Index>
void expect_prefix(const Index& idx, const oracle::SortedStrings& ref, const std::vector<Code>& p) {
    const MatchResult got = idx.prefix_query(p);
    const auto want = ref.prefix(p);
    ASSERT_EQ(got.found(), want.found);
    ASSERT_EQ(got.matched_len, want.found ? p.size() : want.matched_len);
    if (want.found) {
        ASSERT_EQ(got.lo, want.lo);
        ASSERT_EQ(got.hi, want.hi);
        // Locus spells exactly p.
        const TrieNode& n = idx.trie().node(got.node);
        const std::uint64_t parent_depth = n.parent == kNoNode ? 0 : idx.trie().node(n.parent).depth;
        ASSERT_EQ(parent_depth + got.offset, p.size());
        ASSERT_EQ(got.outcome == Outcome::matched_at_node, n.depth == p.size());
    }
}

}  // namespace

TEST(HeavyThreshold, Formula) {
    EXPECT_EQ(heavy_threshold(256), 9u);
    EXPECT_EQ(heavy_threshold(65536), 16u);
    EXPECT_EQ(heavy_threshold(2), 2u);
    EXPECT_EQ(heavy_threshold(4), 2u);
    EXPECT_EQ(heavy_threshold(16), 4u);
    EXPECT_EQ(heavy_threshold(17), 5u);
}

TEST(StaticIndex, BananaAllLightBelowRoot) {
    auto idx = banana_index();
    EXPECT_EQ(idx.threshold(), 9u);
    EXPECT_EQ(idx.heavy_count(), 1u);
    EXPECT_TRUE(idx.heavy(idx.trie().root()));
}

TEST(StaticIndex, BananaQueries) {
    auto idx = banana_index();
    auto r = idx.prefix_query(bytes("ana"));
    ASSERT_TRUE(r.found());
    EXPECT_EQ(r.lo, 2u);
    EXPECT_EQ(r.hi, 3u);
    EXPECT_EQ(r.matched_len, 3u);
    EXPECT_EQ(r.outcome, Outcome::matched_at_node);
    EXPECT_EQ(idx.enumerate(r.lo, r.hi), (std::vector<std::uint64_t>{3, 1}));

    auto all = idx.prefix_query({});
    EXPECT_TRUE(all.found());
    EXPECT_EQ(all.lo, 0u);
    EXPECT_EQ(all.hi, 6u);
    EXPECT_EQ(idx.enumerate(0, 6).size(), 7u);

    auto nax = idx.prefix_query(bytes("nax"));
    EXPECT_FALSE(nax.found());
    EXPECT_EQ(nax.matched_len, 2u);

    auto an = idx.prefix_query(bytes("an"));
    EXPECT_EQ(an.outcome, Outcome::matched_on_edge);
    EXPECT_EQ(idx.enumerate(4, 4), std::vector<std::uint64_t>{0});
}

TEST(StaticIndex, EnumerateOutOfRange) {
    auto idx = banana_index();
    try {
        (void)idx.enumerate(3, 7);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::invalid_input);
    }
    EXPECT_THROW((void)idx.enumerate(3, 2), Error);
}

TEST(StaticIndex, PatternOutsideAlphabet) {
    StaticTrieIndex idx(build_suffix_tree(encode_codes({1, 2, 1}, 2)), 2);
    try {
        (void)idx.prefix_query(std::vector<Code>{3});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::alphabet_overflow);
    }
}

TEST(StaticIndex, StarTrie) {
    std::vector<std::vector<Code>> v;
    for (Code c = 1; c <= 10000; ++c) v.push_back({c});
    StaticTrieIndex idx(build_string_trie(v, 10000), 10000);
    EXPECT_TRUE(idx.heavy(idx.trie().root()));
    EXPECT_EQ(idx.heavy_count(), 1u);
    for (const auto& [c, w] : idx.trie().node(idx.trie().root()).children) EXPECT_FALSE(idx.heavy(w));
    // No heavy children, so the root routes through its light predecessor only.
    EXPECT_FALSE(idx.branching(idx.trie().root()));
    auto r = idx.prefix_query(std::vector<Code>{777});
    ASSERT_TRUE(r.found());
    EXPECT_EQ(idx.enumerate(r.lo, r.hi), std::vector<std::uint64_t>{776});
}

TEST(StaticIndex, EmptyTrie) {
    CompactedTrie t;
    t.finalize();
    StaticTrieIndex idx(std::move(t), 16);
    EXPECT_EQ(idx.heavy_count(), 1u);
    EXPECT_EQ(idx.payload_size(), 0u);
    EXPECT_FALSE(idx.prefix_query({}).found());
    EXPECT_FALSE(idx.predecessor_query(std::vector<Code>{1}).has_value());
}

TEST(StaticIndex, RejectsUnfinalizedTrie) {
    CompactedTrie t;
    t.insert_string(std::vector<Code>{1, 2});
    try {
        StaticTrieIndex idx(std::move(t), 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::corrupt_trie);
    }
}

TEST(StaticIndex, PredecessorExamples) {
    auto idx = word_index({"ant", "bee", "cow"});
    auto name = [&](std::optional<std::uint64_t> r) {
        return r ? decode_text(idx.leaf_string(*r)) : std::string("<none>");
    };
    EXPECT_EQ(name(idx.predecessor_query(bytes("bat"))), "ant");
    EXPECT_EQ(name(idx.predecessor_query(bytes("zebra"))), "cow");
    EXPECT_EQ(name(idx.predecessor_query(bytes("aa"))), "<none>");
    EXPECT_EQ(name(idx.predecessor_query(bytes("bee"))), "bee");
    EXPECT_EQ(name(idx.predecessor_query(bytes("beef"))), "bee");
    EXPECT_EQ(name(idx.predecessor_query(bytes("be"))), "ant");
}

TEST(StaticIndex, SuffixDifferentialAllEngines) {
    std::mt19937_64 rng(21);
    for (int round = 0; round < 120; ++round) {
        const std::uint32_t sigma = std::vector<std::uint32_t>{2, 4, 26, 256}[round % 4];
        const std::size_t n = rng() % 600;
        Text t = round % 2 ? oracle::random_text(rng, n, sigma) : oracle::repetitive_text(rng, n, sigma);
        CompactedTrie tree = build_suffix_tree(t);
        auto ref = oracle::SortedStrings::of_suffixes(t);
        StaticTrieIndex idx(tree, sigma);
        StaticTrieIndex low(tree, sigma, 2);  // nearly every internal node heavy
        SuffixTrayIndex tray(tree, sigma);
        for (int q = 0; q < 60; ++q) {
            const auto p = oracle::random_pattern(rng, ref.items, sigma);
            expect_prefix(idx, ref, p);
            expect_prefix(low, ref, p);
            expect_prefix(tray, ref, p);
            const auto want = ref.predecessor(p);
            ASSERT_EQ(idx.predecessor_query(p), want);
            ASSERT_EQ(low.predecessor_query(p), want);
            ASSERT_EQ(tray.predecessor_query(p), want);
        }
    }
}

TEST(StaticIndex, StringSetPredecessorDifferential) {
    std::mt19937_64 rng(22);
    for (int round = 0; round < 80; ++round) {
        const std::uint32_t sigma = std::vector<std::uint32_t>{2, 3, 26, 1000}[round % 4];
        std::set<std::vector<Code>> set;
        const std::size_t k = rng() % 300;
        for (std::size_t i = 0; i < 4 * k && set.size() < k; ++i) {
            std::vector<Code> s(rng() % 10);
            for (auto& c : s) c = 1 + static_cast<Code>(rng() % sigma);
            set.insert(s);
        }
        std::vector<std::vector<Code>> v(set.begin(), set.end());
        std::shuffle(v.begin(), v.end(), rng);
        auto trie = build_string_trie(v, sigma);
        auto ref = oracle::SortedStrings::of_strings(v);
        StaticTrieIndex idx(trie, sigma);
        StaticTrieIndex low(trie, sigma, 2);
        for (int q = 0; q < 100; ++q) {
            const auto p = oracle::random_pattern(rng, ref.items, sigma);
            const auto want = ref.predecessor(p);
            ASSERT_EQ(idx.predecessor_query(p), want);
            ASSERT_EQ(low.predecessor_query(p), want);
            expect_prefix(idx, ref, p);
            if (want) {
                ASSERT_EQ(idx.leaf_id(*want), ref.ids[*want]);
            }
        }
    }
}

TEST(StaticIndex, ProbeCounters) {
    std::mt19937_64 rng(23);
    const std::uint32_t sigma = 1 << 16;
    Text t = oracle::repetitive_text(rng, 20000, sigma);
    CompactedTrie tree = build_suffix_tree(t);
    StaticTrieIndex idx(tree, sigma);
    std::vector<std::vector<Code>> pool{t.terminated()};
    for (int q = 0; q < 2000; ++q) {
        const auto p = oracle::random_pattern(rng, pool, sigma);
        reset_probes();
        auto r = idx.prefix_query(p);
        EXPECT_LE(probes().static_pred_queries, 2u);
        EXPECT_LE(probes().dict_probes, r.matched_len + 1);
        reset_probes();
        (void)idx.predecessor_query(p);
        EXPECT_LE(probes().static_pred_queries, 2u);
    }
}
