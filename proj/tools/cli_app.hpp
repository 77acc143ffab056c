#pragma once

// Command implementations for the triekit tool. Kept in a header so tests can
// run commands in-process and compare their output byte for byte.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "triekit/triekit.hpp"

namespace triekit::cli {

enum Exit : int { ok = 0, io_failure = 2, alphabet = 3, version = 4, malformed = 5, verification = 6 };

/// Error carrying its process exit status.
struct Failure {
    int code;
    std::string message;
};

[[nodiscard]] inline int exit_for(ErrorCode c) {
    switch (c) {
        case ErrorCode::io_error:
        case ErrorCode::corrupt_trie: return io_failure;
        case ErrorCode::alphabet_overflow: return alphabet;
        case ErrorCode::version_mismatch: return version;
        default: return malformed;
    }
}

// ---- input helpers -------------------------------------------------------

[[nodiscard]] inline std::vector<std::string> split_lines(const std::string& data) {
    std::vector<std::string> out;
    std::size_t from = 0;
    while (from < data.size()) {
        std::size_t nl = data.find('\n', from);
        if (nl == std::string::npos) nl = data.size();
        std::string line = data.substr(from, nl - from);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back(std::move(line));
        from = nl + 1;
    }
    return out;
}

[[nodiscard]] inline std::string strip_newlines(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

/// Bytes for sigma <= 256, whitespace-separated decimal codes otherwise.
[[nodiscard]] inline std::vector<Code> parse_codes(const std::string& s, std::uint32_t sigma) {
    if (sigma <= 256) return encode_text(s, sigma).codes;
    std::vector<Code> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) {
        if (tok.empty() || tok.size() > 10 || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            throw Error(ErrorCode::invalid_input, "not a decimal code: '" + tok + "'");
        }
        const std::uint64_t v = std::stoull(tok);
        if (v < 1 || v > sigma) throw Error(ErrorCode::alphabet_overflow, "code " + tok + " outside [1, " + std::to_string(sigma) + "]");
        out.push_back(static_cast<Code>(v));
    }
    return out;
}

[[nodiscard]] inline std::string show_codes(std::span<const Code> codes, std::uint32_t sigma) {
    if (sigma <= 256) return decode_text(codes);
    std::string out;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(codes[i]);
    }
    return out;
}

[[nodiscard]] inline std::uint64_t probe_total(const ProbeCounters& p) {
    return p.dict_probes + p.static_pred_probes + p.dyn_pred_probes + p.child_search_steps;
}

[[nodiscard]] inline nlohmann::ordered_json counters_json(const ProbeCounters& p) {
    return {{"dict_probes", p.dict_probes},
            {"static_pred_queries", p.static_pred_queries},
            {"static_pred_probes", p.static_pred_probes},
            {"dyn_pred_probes", p.dyn_pred_probes},
            {"wexp_levels_descended", p.wexp_levels_descended},
            {"chars_compared", p.chars_compared},
            {"child_search_steps", p.child_search_steps},
            {"splits", p.splits},
            {"promotions", p.promotions},
            {"promotion_steps", p.promotion_steps},
            {"rebalance_steps", p.rebalance_steps}};
}

[[nodiscard]] inline double lglg(std::uint32_t sigma) {
    return std::max(1.0, std::log2(std::log2(std::max(4.0, static_cast<double>(sigma)))));
}

[[nodiscard]] inline std::string fixed(double v, int digits = 3) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(digits) << v;
    return ss.str();
}

[[nodiscard]] inline bool audit_forced() {
    const char* v = std::getenv("TRIEKIT_AUDIT");
    return v != nullptr && std::string(v) == "1";
}

using Clock = std::chrono::steady_clock;

[[nodiscard]] inline double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// ---- build ---------------------------------------------------------------

struct BuildArgs {
    std::string input, output, mode = "suffix", engine = "static";
    std::uint32_t sigma = 256;
    bool timing = false;
};

inline int cmd_build(const BuildArgs& a, std::ostream& out) {
    IndexSource src;
    src.sigma = a.sigma;
    src.mode = a.mode == "suffix" ? IndexMode::suffix : IndexMode::strings;
    src.engine = a.engine == "tray" ? Engine::tray : Engine::static_trie;
    const std::string data = read_file(a.input);
    if (src.mode == IndexMode::suffix) {
        src.text.alphabet = Alphabet{a.sigma};
        src.text.codes = parse_codes(strip_newlines(data), a.sigma);
    } else {
        std::set<std::vector<Code>> seen;
        for (const auto& line : split_lines(data)) {
            auto codes = parse_codes(line, a.sigma);
            if (seen.insert(codes).second) src.strings.push_back(std::move(codes));
        }
    }
    const auto t0 = Clock::now();
    AnyIndex idx = src.build();
    const double build_ms = ms_since(t0);
    write_file(a.output, serialize_index(src, idx));
    std::visit(
        [&](const auto& x) {
            out << "mode\t" << a.mode << "\nengine\t" << a.engine << "\nn\t" << src.n() << "\nsigma\t" << a.sigma
                << "\ns\t" << x.threshold() << "\nnodes\t" << x.trie().node_count() << "\nleaves\t" << x.leaf_count()
                << "\nheavy_nodes\t" << x.heavy_count() << '\n';
        },
        idx);
    if (a.timing) out << "build_ms\t" << fixed(build_ms) << '\n';
    return ok;
}

// ---- query ---------------------------------------------------------------

struct QueryArgs {
    std::string index, patterns, mode = "prefix", report = "tsv";
};

inline int cmd_query(const QueryArgs& a, std::ostream& out) {
    const LoadedIndex loaded = deserialize_index(read_file(a.index));
    const std::uint32_t sigma = loaded.source.sigma;
    const auto lines = split_lines(read_file(a.patterns));
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    std::ostringstream tsv;
    tsv << "pattern\toutcome\tl\tr\tmatched_len\tprobes";
    if (a.mode == "count") tsv << "\tcount";
    if (a.mode == "enumerate") tsv << "\tids";
    if (a.mode == "predecessor") tsv << "\tpredecessor";
    tsv << '\n';
    for (const auto& line : lines) {
        const auto p = parse_codes(line, sigma);
        reset_probes();
        nlohmann::ordered_json row{{"pattern", line}};
        std::string cells[4];  // outcome, l, r, matched_len
        std::string extra;
        std::visit(
            [&](const auto& x) {
                if (a.mode == "predecessor") {
                    const auto r = x.predecessor_query(p);
                    const std::uint64_t ctr = probe_total(probes());
                    cells[0] = r ? "FOUND" : "NONE";
                    cells[1] = cells[2] = r ? std::to_string(*r) : "-";
                    cells[3] = "-";
                    extra = r ? show_codes(x.leaf_string(*r), sigma) : "-";
                    row["outcome"] = cells[0];
                    row["l"] = r ? nlohmann::ordered_json(*r) : nlohmann::ordered_json(nullptr);
                    row["r"] = row["l"];
                    row["matched_len"] = nullptr;
                    row["probes"] = ctr;
                    row["predecessor"] = r ? nlohmann::ordered_json(extra) : nlohmann::ordered_json(nullptr);
                    return;
                }
                const MatchResult m = x.prefix_query(p);
                const std::uint64_t ctr = probe_total(probes());
                cells[0] = m.found() ? "MATCHED" : "NOT_FOUND";
                cells[1] = m.found() ? std::to_string(m.lo) : "-";
                cells[2] = m.found() ? std::to_string(m.hi) : "-";
                cells[3] = std::to_string(m.matched_len);
                row["outcome"] = cells[0];
                row["locus"] = to_string(m.outcome);
                row["l"] = m.found() ? nlohmann::ordered_json(m.lo) : nlohmann::ordered_json(nullptr);
                row["r"] = m.found() ? nlohmann::ordered_json(m.hi) : nlohmann::ordered_json(nullptr);
                row["matched_len"] = m.matched_len;
                row["probes"] = ctr;
                if (a.mode == "count") {
                    const std::uint64_t c = m.found() ? m.hi - m.lo + 1 : 0;
                    extra = std::to_string(c);
                    row["count"] = c;
                } else if (a.mode == "enumerate") {
                    std::vector<std::uint64_t> ids;
                    if (m.found()) ids = x.enumerate(m.lo, m.hi);
                    std::sort(ids.begin(), ids.end());
                    for (std::size_t i = 0; i < ids.size(); ++i) extra += (i ? "," : "") + std::to_string(ids[i]);
                    if (ids.empty()) extra = "-";
                    row["ids"] = ids;
                }
            },
            loaded.index);
        row["counters"] = counters_json(probes());
        tsv << line << '\t' << cells[0] << '\t' << cells[1] << '\t' << cells[2] << '\t' << cells[3] << '\t'
            << row["probes"].get<std::uint64_t>();
        if (a.mode != "prefix") tsv << '\t' << extra;
        tsv << '\n';
        rows.push_back(std::move(row));
    }
    if (a.report == "json") {
        nlohmann::ordered_json doc;
        std::visit(
            [&](const auto& x) {
                doc["summary"] = {{"n", loaded.source.n()},
                                  {"sigma", sigma},
                                  {"s", x.threshold()},
                                  {"heavy_nodes", x.heavy_count()},
                                  {"engine", loaded.source.engine == Engine::tray ? "tray" : "static"},
                                  {"index_mode", loaded.source.mode == IndexMode::suffix ? "suffix" : "strings"},
                                  {"query_mode", a.mode}};
            },
            loaded.index);
        doc["rows"] = std::move(rows);
        out << doc.dump(2) << '\n';
    } else {
        out << tsv.str();
    }
    return ok;
}

// ---- dynamic -------------------------------------------------------------

struct DynamicArgs {
    std::string ops;
    std::uint32_t sigma = 256;
    std::uint64_t audit_every = 0;
};

inline int cmd_dynamic(const DynamicArgs& a, std::ostream& out) {
    const auto lines = split_lines(read_file(a.ops));
    DynTrieIndex idx(a.sigma);
    const bool every = audit_forced();
    std::uint64_t mutations = 0;
    auto check = [&](std::size_t line_no) {
        const auto bad = idx.audit();
        if (!bad.empty()) {
            throw Failure{verification, "audit failed after line " + std::to_string(line_no) + ": " + bad.front()};
        }
    };
    out << "op\tpattern\toutcome\tl\tr\tmatched_len\tresult\n";
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        const std::size_t no = i + 1;
        if (line.empty() || (line.size() > 1 && line[1] != ' ') || std::string("IQP").find(line[0]) == std::string::npos) {
            throw Failure{malformed, "line " + std::to_string(no) + ": expected 'I|Q|P <string>'"};
        }
        const std::string arg = line.size() > 2 ? line.substr(2) : std::string();
        std::vector<Code> codes;
        try {
            codes = parse_codes(arg, a.sigma);
        } catch (const Error& e) {
            throw Failure{exit_for(e.code()), "line " + std::to_string(no) + ": " + e.what()};
        }
        if (line[0] == 'I') {
            try {
                idx.insert(codes);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::duplicate_key) throw;
                continue;  // set semantics: re-inserting is a no-op
            }
            ++mutations;
            if (every || (a.audit_every && mutations % a.audit_every == 0)) check(no);
        } else if (line[0] == 'Q') {
            const MatchResult m = idx.search(codes);
            out << "Q\t" << arg << '\t' << (m.found() ? "MATCHED" : "NOT_FOUND") << '\t'
                << (m.found() ? std::to_string(m.lo) : "-") << '\t' << (m.found() ? std::to_string(m.hi) : "-") << '\t'
                << m.matched_len << '\t' << (m.found() ? m.hi - m.lo + 1 : 0) << '\n';
        } else {
            const auto r = idx.predecessor(codes);
            out << "P\t" << arg << '\t' << (r ? "FOUND" : "NONE") << "\t-\t-\t-\t"
                << (r ? show_codes(idx.string(*r), a.sigma) : "-") << '\n';
        }
    }
    return ok;
}

// ---- prepend-stream ------------------------------------------------------

struct PrependArgs {
    std::string text;
    std::uint32_t sigma = 256;
    std::uint64_t check_every = 0;
    std::uint64_t corrupt_at = 0;  // test hook, 0 = off
};

inline int cmd_prepend_stream(const PrependArgs& a, std::ostream& out) {
    const auto codes = parse_codes(strip_newlines(read_file(a.text)), a.sigma);
    OnlineSuffixTree tree(a.sigma);
    std::uint64_t checks = 0;
    out << "step\tverified\tnodes\tprepend_steps\n";
    for (std::uint64_t step = 1; step <= codes.size(); ++step) {
        tree.prepend(codes[codes.size() - step]);
        if (step == a.corrupt_at) tree.corrupt_last_leaf();
        if (a.check_every == 0 || step % a.check_every != 0) continue;
        const bool same = tree.shape() == suffix_tree_shape(build_suffix_tree(tree.text()));
        const auto bad = tree.audit();
        if (!same || !bad.empty()) {
            throw Failure{verification, "verification failed at step " + std::to_string(step) + ": " +
                                            (same ? bad.front() : std::string("tree differs from a fresh build"))};
        }
        ++checks;
        out << step << "\tOK\t" << tree.node_count() << '\t' << tree.steps() << '\n';
    }
    out << "# prepends " << codes.size() << " verifications " << checks << " total_steps " << tree.steps()
        << " steps_per_prepend " << fixed(codes.empty() ? 0.0 : static_cast<double>(tree.steps()) / static_cast<double>(codes.size()))
        << '\n';
    return ok;
}

// ---- bench ---------------------------------------------------------------

struct BenchArgs {
    std::uint64_t n = 100000;
    std::uint32_t sigma = 65536;
    std::string engines = "static,tray,dynamic,sa";
    std::uint64_t queries = 1000;
    std::uint64_t seed = 1;
    std::uint64_t window = 32;
    bool timing = false;
    std::string report = "tsv";
};

/// Text with long repeats so the suffix tree has real depth.
[[nodiscard]] inline Text bench_text(std::mt19937_64& rng, std::uint64_t n, std::uint32_t sigma) {
    Text t;
    t.alphabet = Alphabet{sigma};
    while (t.codes.size() < n) {
        if (!t.codes.empty() && rng() % 2 == 0) {
            const std::uint64_t from = rng() % t.codes.size();
            const std::uint64_t len = 1 + rng() % 64;
            for (std::uint64_t k = 0; k < len && t.codes.size() < n; ++k) t.codes.push_back(t.codes[from + k % (t.codes.size() - from)]);
        } else {
            const std::uint64_t len = 1 + rng() % 16;
            for (std::uint64_t k = 0; k < len && t.codes.size() < n; ++k) t.codes.push_back(1 + static_cast<Code>(rng() % sigma));
        }
    }
    return t;
}

[[nodiscard]] inline std::vector<std::vector<Code>> bench_patterns(std::mt19937_64& rng, const Text& t, std::uint64_t q,
                                                                  std::uint32_t sigma) {
    std::vector<std::vector<Code>> out;
    for (std::uint64_t i = 0; i < q; ++i) {
        const auto kind = rng() % 3;
        std::vector<Code> p;
        if (kind < 2 && !t.empty()) {
            const std::uint64_t from = rng() % t.size();
            const std::uint64_t len = std::min<std::uint64_t>(1 + rng() % 24, t.size() - from);
            p.assign(t.codes.begin() + static_cast<std::ptrdiff_t>(from), t.codes.begin() + static_cast<std::ptrdiff_t>(from + len));
            if (kind == 1) p.back() = 1 + static_cast<Code>(rng() % sigma);
        } else {
            p.resize(1 + rng() % 12);
            for (auto& c : p) c = 1 + static_cast<Code>(rng() % sigma);
        }
        out.push_back(std::move(p));
    }
    return out;
}

struct EngineRow {
    std::string engine;
    std::uint64_t items = 0, heavy = 0, s = 0, found = 0;
    ProbeCounters build, query;
    std::uint64_t max_pred_queries = 0, max_pred_probes = 0, dict_violations = 0, max_dyn_pred_probes = 0;
    double build_ms = 0, query_ms = 0;
};

// Plain suffix-array binary search: lower and upper bound over suffixes.
[[nodiscard]] inline std::pair<std::uint64_t, std::uint64_t> sa_range(const SuffixArrayIndex& sa, const std::vector<Code>& s,
                                                                     std::span<const Code> p) {
    auto& pc = probes();
    auto cmp = [&](std::uint64_t pos) {  // <0: suffix < p (on |p| chars), 0: p is a prefix
        for (std::uint64_t k = 0; k < p.size(); ++k) {
            ++pc.chars_compared;
            const Code c = s[pos + k];
            if (c != p[k]) return c < p[k] ? -1 : 1;
            if (c == kSentinel) return -1;
        }
        return 0;
    };
    std::uint64_t lo = 0, hi = sa.sa.size();
    while (lo < hi) {
        ++pc.child_search_steps;
        const std::uint64_t mid = (lo + hi) / 2;
        if (cmp(sa.sa[mid]) < 0) lo = mid + 1; else hi = mid;
    }
    const std::uint64_t first = lo;
    hi = sa.sa.size();
    while (lo < hi) {
        ++pc.child_search_steps;
        const std::uint64_t mid = (lo + hi) / 2;
        if (cmp(sa.sa[mid]) <= 0) lo = mid + 1; else hi = mid;
    }
    return {first, lo};
}

[[nodiscard]] inline std::vector<EngineRow> run_bench(const BenchArgs& a, std::vector<std::string>& engines, Text& text) {
    std::mt19937_64 rng(a.seed);
    text = bench_text(rng, a.n, a.sigma);
    const auto pats = bench_patterns(rng, text, a.queries, a.sigma);
    std::vector<EngineRow> rows;
    for (const auto& e : engines) {
        EngineRow row;
        row.engine = e;
        reset_probes();
        auto t0 = Clock::now();
        if (e == "static" || e == "tray") {
            CompactedTrie tree = build_suffix_tree(text);
            auto run = [&](const auto& idx) {
                row.build = probes();
                row.build_ms = ms_since(t0);
                row.items = idx.leaf_count();
                row.heavy = idx.heavy_count();
                row.s = idx.threshold();
                reset_probes();
                t0 = Clock::now();
                for (const auto& p : pats) {
                    const ProbeCounters before = probes();
                    const MatchResult m = idx.prefix_query(p);
                    const ProbeCounters& now = probes();
                    row.found += m.found();
                    row.max_pred_queries = std::max(row.max_pred_queries, now.static_pred_queries - before.static_pred_queries);
                    row.max_pred_probes = std::max(row.max_pred_probes, now.static_pred_probes - before.static_pred_probes);
                    if (now.dict_probes - before.dict_probes > m.matched_len + 1) ++row.dict_violations;
                }
                row.query_ms = ms_since(t0);
                row.query = probes();
            };
            if (e == "static") {
                run(StaticTrieIndex(std::move(tree), a.sigma));
            } else {
                run(SuffixTrayIndex(std::move(tree), a.sigma));
            }
        } else if (e == "dynamic") {
            DynTrieIndex idx(a.sigma);
            std::set<std::vector<Code>> seen;
            for (std::uint64_t i = 0; i < text.size(); ++i) {
                std::vector<Code> w(text.codes.begin() + static_cast<std::ptrdiff_t>(i),
                                    text.codes.begin() + static_cast<std::ptrdiff_t>(std::min<std::uint64_t>(text.size(), i + a.window)));
                if (!seen.insert(w).second) continue;
                idx.insert(w);
                ++row.items;
            }
            row.build = probes();
            row.build_ms = ms_since(t0);
            row.heavy = idx.heavy_count();
            row.s = idx.threshold();
            reset_probes();
            t0 = Clock::now();
            for (const auto& p : pats) {
                const auto before = probes().dyn_pred_probes;
                row.found += idx.search(p).found();
                row.max_dyn_pred_probes = std::max(row.max_dyn_pred_probes, probes().dyn_pred_probes - before);
            }
            row.query_ms = ms_since(t0);
            row.query = probes();
        } else {  // sa
            const SuffixArrayIndex sa = build_suffix_array(text);
            const std::vector<Code> s = text.terminated();
            row.build_ms = ms_since(t0);
            row.items = sa.sa.size();
            reset_probes();
            t0 = Clock::now();
            for (const auto& p : pats) {
                const auto [lo, hi] = sa_range(sa, s, p);
                row.found += hi > lo;
            }
            row.query_ms = ms_since(t0);
            row.query = probes();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline int cmd_bench(const BenchArgs& a, std::ostream& out) {
    std::vector<std::string> engines;
    {
        std::string tok;
        std::istringstream in(a.engines);
        while (std::getline(in, tok, ',')) {
            if (tok != "static" && tok != "tray" && tok != "dynamic" && tok != "sa") {
                throw Failure{malformed, "unknown engine '" + tok + "'"};
            }
            engines.push_back(tok);
        }
    }
    if (a.n == 0 || a.sigma == 0) throw Failure{malformed, "--n and --sigma must be positive"};
    Text text;
    const auto rows = run_bench(a, engines, text);
    const double q = static_cast<double>(std::max<std::uint64_t>(a.queries, 1));
    const double ll = lglg(a.sigma);

    // Checks derived from the counters; printed, and the hard ones decide PASS/FAIL.
    struct Check {
        std::string name, verdict, detail;
    };
    std::vector<Check> checks;
    const EngineRow* st = nullptr;
    const EngineRow* tr = nullptr;
    const EngineRow* dy = nullptr;
    for (const auto& r : rows) {
        if (r.engine == "static") st = &r;
        if (r.engine == "tray") tr = &r;
        if (r.engine == "dynamic") dy = &r;
    }
    if (st && a.queries) {
        checks.push_back({"static_pred_queries_per_query<=2", st->max_pred_queries <= 2 ? "PASS" : "FAIL",
                          "max " + std::to_string(st->max_pred_queries)});
        checks.push_back({"dict_probes<=matched_len+1", st->dict_violations == 0 ? "PASS" : "FAIL",
                          "violations " + std::to_string(st->dict_violations)});
        // Each predecessor query is at most two per search, so half the per-search max bounds one query.
        const double c = static_cast<double>(st->max_pred_probes) / (ll + 1.0);
        checks.push_back({"static_pred_probes_per_query<=C*(lglg(sigma)+1)", "REPORTED",
                          "max " + std::to_string(st->max_pred_probes) + " C=" + fixed(c)});
    }
    if (st && tr && a.queries) {
        const double sp = static_cast<double>(st->query.static_pred_probes) / q;
        const double tc = static_cast<double>(tr->query.child_search_steps) / q;
        checks.push_back({"static_pred_probes/query<=tray_child_search_steps/query", sp <= tc ? "PASS" : "FAIL",
                          fixed(sp) + " vs " + fixed(tc)});
    }
    if (dy) {
        const double steps = static_cast<double>(dy->build.promotion_steps + dy->build.rebalance_steps);
        const double c = steps / (static_cast<double>(std::max<std::uint64_t>(dy->items, 1)) * ll);
        checks.push_back({"dynamic_update_steps<=C*N*lglg(sigma)", "REPORTED",
                          "steps " + std::to_string(dy->build.promotion_steps + dy->build.rebalance_steps) + " N " +
                              std::to_string(dy->items) + " C=" + fixed(c)});
    }

    if (a.report == "json") {
        nlohmann::ordered_json doc;
        doc["config"] = {{"n", a.n}, {"sigma", a.sigma}, {"queries", a.queries}, {"seed", a.seed}, {"window", a.window}};
        doc["engines"] = nlohmann::ordered_json::array();
        for (const auto& r : rows) {
            nlohmann::ordered_json e{{"engine", r.engine}, {"items", r.items}, {"s", r.s}, {"heavy_nodes", r.heavy},
                                     {"found", r.found}};
            e["build_counters"] = counters_json(r.build);
            e["query_counters"] = counters_json(r.query);
            if (a.timing) {
                e["build_ms"] = r.build_ms;
                e["query_ms"] = r.query_ms;
            }
            doc["engines"].push_back(std::move(e));
        }
        doc["checks"] = nlohmann::ordered_json::array();
        for (const auto& c : checks) doc["checks"].push_back({{"name", c.name}, {"verdict", c.verdict}, {"detail", c.detail}});
        out << doc.dump(2) << '\n';
    } else {
        out << "# n " << a.n << " sigma " << a.sigma << " queries " << a.queries << " seed " << a.seed << '\n';
        out << "engine\titems\ts\theavy_nodes\tfound\tdict_probes\tstatic_pred_queries\tstatic_pred_probes\tdyn_pred_probes"
               "\twexp_levels_descended\tchars_compared\tchild_search_steps\tsplits\tpromotions\tpromotion_steps\trebalance_steps";
        if (a.timing) out << "\tbuild_ms\tquery_ms";
        out << '\n';
        for (const auto& r : rows) {
            const ProbeCounters& c = r.query;
            out << r.engine << '\t' << r.items << '\t' << r.s << '\t' << r.heavy << '\t' << r.found << '\t' << c.dict_probes << '\t'
                << c.static_pred_queries << '\t' << c.static_pred_probes << '\t' << c.dyn_pred_probes << '\t'
                << c.wexp_levels_descended << '\t' << c.chars_compared << '\t' << c.child_search_steps << '\t'
                << r.build.splits + c.splits << '\t' << r.build.promotions << '\t' << r.build.promotion_steps << '\t'
                << r.build.rebalance_steps;
            if (a.timing) out << '\t' << fixed(r.build_ms) << '\t' << fixed(r.query_ms);
            out << '\n';
        }
        for (const auto& c : checks) out << "# check " << c.name << ' ' << c.verdict << ' ' << c.detail << '\n';
    }
    for (const auto& c : checks) {
        if (c.verdict == "FAIL") return verification;
    }
    return ok;
}

// ---- entry point ---------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"triekit: trie and suffix-tree indexes"};
    app.require_subcommand(1);

    BuildArgs ba;
    auto* build = app.add_subcommand("build", "Build and serialize an index");
    build->add_option("--input", ba.input, "Text (suffix mode) or newline-separated strings")->required();
    build->add_option("--output", ba.output, "Index file to write")->required();
    build->add_option("--sigma", ba.sigma, "Alphabet size")->check(CLI::Range(1u, 0xfffffffeu));
    build->add_option("--mode", ba.mode)->check(CLI::IsMember({"suffix", "strings"}));
    build->add_option("--engine", ba.engine)->check(CLI::IsMember({"static", "tray"}));
    build->add_flag("--timing", ba.timing, "Print build time");

    QueryArgs qa;
    auto* query = app.add_subcommand("query", "Run a pattern batch against an index file");
    query->add_option("--index", qa.index)->required();
    query->add_option("--patterns", qa.patterns, "One pattern per line")->required();
    query->add_option("--mode", qa.mode)->check(CLI::IsMember({"prefix", "predecessor", "count", "enumerate"}));
    query->add_option("--report", qa.report)->check(CLI::IsMember({"tsv", "json"}));

    DynamicArgs da;
    auto* dynamic = app.add_subcommand("dynamic", "Replay I/Q/P operations on the dynamic index");
    dynamic->add_option("--ops", da.ops)->required();
    dynamic->add_option("--sigma", da.sigma)->check(CLI::Range(1u, 0xfffffffeu));
    dynamic->add_option("--audit-every", da.audit_every, "Structural audit every K insertions");

    PrependArgs pa;
    auto* prepend = app.add_subcommand("prepend-stream", "Grow a suffix tree by prepending, verifying as it goes");
    prepend->add_option("--text", pa.text)->required();
    prepend->add_option("--sigma", pa.sigma)->check(CLI::Range(1u, 0xfffffffeu));
    prepend->add_option("--check-every", pa.check_every, "Verify every K prepends (0: never)");
    prepend->add_option("--corrupt-at", pa.corrupt_at)->group("");

    BenchArgs be;
    auto* bench = app.add_subcommand("bench", "Seeded workload over several engines");
    bench->add_option("--n", be.n);
    bench->add_option("--sigma", be.sigma)->check(CLI::Range(1u, 0xfffffffeu));
    bench->add_option("--engines", be.engines, "Comma list of static,tray,dynamic,sa");
    bench->add_option("--queries", be.queries);
    bench->add_option("--seed", be.seed);
    bench->add_option("--window", be.window, "String length for the dynamic engine");
    bench->add_option("--report", be.report)->check(CLI::IsMember({"tsv", "json"}));
    bench->add_flag("--timing", be.timing, "Include wall-clock columns");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : malformed;
    }
    try {
        if (*build) return cmd_build(ba, out);
        if (*query) return cmd_query(qa, out);
        if (*dynamic) return cmd_dynamic(da, out);
        if (*prepend) return cmd_prepend_stream(pa, out);
        return cmd_bench(be, out);
    } catch (const Failure& f) {
        err << "error: " << f.message << '\n';
        return f.code;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_for(e.code());
    }
}

}  // namespace triekit::cli
