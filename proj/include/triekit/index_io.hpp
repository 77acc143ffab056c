#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "static_index.hpp"
#include "suffix_array.hpp"
#include "text.hpp"

namespace triekit {

enum class IndexMode : std::uint8_t { suffix = 0, strings = 1 };
enum class Engine : std::uint8_t { static_trie = 0, tray = 1 };

using AnyIndex = std::variant<StaticTrieIndex, SuffixTrayIndex>;

/// What an index file stores. The search structures themselves are
/// deterministic functions of this and are rebuilt on load.
struct IndexSource {
    IndexMode mode = IndexMode::suffix;
    Engine engine = Engine::static_trie;
    std::uint32_t sigma = 256;
    Text text;                                // suffix mode
    std::vector<std::vector<Code>> strings;  // strings mode

    [[nodiscard]] std::uint64_t n() const { return mode == IndexMode::suffix ? text.size() : strings.size(); }

    [[nodiscard]] AnyIndex build() const {
        CompactedTrie trie = mode == IndexMode::suffix ? build_suffix_tree(text) : build_string_trie(strings, sigma);
        if (engine == Engine::tray) return AnyIndex{std::in_place_type<SuffixTrayIndex>, std::move(trie), sigma};
        return AnyIndex{std::in_place_type<StaticTrieIndex>, std::move(trie), sigma};
    }
};

namespace io {

inline constexpr std::array<char, 4> kMagic{'T', 'K', 'I', 'X'};
inline constexpr std::uint32_t kVersion = 1;

enum Section : std::uint32_t { text_section = 1, strings_section = 2, summary_section = 3 };

class Writer {
public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void raw(const std::string& s) { buf_ += s; }
    void section(std::uint32_t kind, const Writer& body) {
        u32(kind);
        u64(body.buf_.size());
        raw(body.buf_);
    }
    [[nodiscard]] const std::string& bytes() const noexcept { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    explicit Reader(std::string data) : data_(std::move(data)) {}

    [[nodiscard]] bool done() const noexcept { return pos_ == data_.size(); }

    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
    std::uint64_t u64() { return le(8); }

    std::string take(std::uint64_t k) {
        if (k > data_.size() - pos_) throw Error(ErrorCode::io_error, "index file truncated");
        std::string out = data_.substr(pos_, k);
        pos_ += k;
        return out;
    }

private:
    std::uint64_t le(int k) {
        const std::string b = take(static_cast<std::uint64_t>(k));
        std::uint64_t v = 0;
        for (int i = k - 1; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
        return v;
    }

    std::string data_;
    std::size_t pos_ = 0;
};

}  // namespace io

/// Serialized form: fixed header, then length-prefixed sections, all
/// integers little-endian.
[[nodiscard]] inline std::string serialize_index(const IndexSource& src, const AnyIndex& idx) {
    io::Writer w;
    w.raw(std::string(io::kMagic.begin(), io::kMagic.end()));
    w.u32(io::kVersion);
    w.u64(src.n());
    w.u32(src.sigma);
    w.u64(std::visit([](const auto& x) { return x.threshold(); }, idx));
    w.u8(static_cast<std::uint8_t>(src.engine));
    w.u8(static_cast<std::uint8_t>(src.mode));
    io::Writer body;
    if (src.mode == IndexMode::suffix) {
        for (Code c : src.text.codes) body.u32(c);
        w.section(io::text_section, body);
    } else {
        body.u64(src.strings.size());
        for (const auto& s : src.strings) {
            body.u64(s.size());
            for (Code c : s) body.u32(c);
        }
        w.section(io::strings_section, body);
    }
    io::Writer summary;
    summary.u64(std::visit([](const auto& x) { return std::uint64_t{x.trie().node_count()}; }, idx));
    summary.u64(std::visit([](const auto& x) { return std::uint64_t{x.heavy_count()}; }, idx));
    w.section(io::summary_section, summary);
    return w.bytes();
}

struct LoadedIndex {
    IndexSource source;
    AnyIndex index;
};

[[nodiscard]] inline LoadedIndex deserialize_index(std::string data) {
    io::Reader r(std::move(data));
    const std::string magic = r.take(4);
    if (std::memcmp(magic.data(), io::kMagic.data(), 4) != 0) throw Error(ErrorCode::io_error, "not an index file");
    const std::uint32_t version = r.u32();
    if (version != io::kVersion) {
        throw Error(ErrorCode::version_mismatch,
                    "index format version " + std::to_string(version) + ", expected " + std::to_string(io::kVersion));
    }
    IndexSource src;
    const std::uint64_t n = r.u64();
    src.sigma = r.u32();
    const std::uint64_t s = r.u64();
    const std::uint8_t engine = r.u8();
    const std::uint8_t mode = r.u8();
    if (engine > 1 || mode > 1 || src.sigma == 0) throw Error(ErrorCode::io_error, "bad index header");
    src.engine = static_cast<Engine>(engine);
    src.mode = static_cast<IndexMode>(mode);
    src.text.alphabet = Alphabet{src.sigma};
    std::uint64_t nodes = 0, heavy = 0;
    bool have_data = false, have_summary = false;
    while (!r.done()) {
        const std::uint32_t kind = r.u32();
        io::Reader body(r.take(r.u64()));
        if (kind == io::text_section) {
            while (!body.done()) src.text.codes.push_back(body.u32());
            have_data = true;
        } else if (kind == io::strings_section) {
            const std::uint64_t count = body.u64();
            for (std::uint64_t i = 0; i < count; ++i) {
                std::vector<Code> str(body.u64());
                for (auto& c : str) c = body.u32();
                src.strings.push_back(std::move(str));
            }
            have_data = true;
        } else if (kind == io::summary_section) {
            nodes = body.u64();
            heavy = body.u64();
            have_summary = true;
        }  // unknown sections are skipped
    }
    if (!have_data || !have_summary || src.n() != n) throw Error(ErrorCode::io_error, "index file incomplete");
    if (src.mode == IndexMode::suffix) check_codes(src.text.codes, Alphabet{src.sigma});
    AnyIndex idx = src.build();
    const bool same = std::visit(
        [&](const auto& x) { return x.threshold() == s && x.trie().node_count() == nodes && x.heavy_count() == heavy; },
        idx);
    if (!same) throw Error(ErrorCode::corrupt_trie, "rebuilt index differs from the stored summary");
    return LoadedIndex{std::move(src), std::move(idx)};
}

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io_error, "cannot open " + path + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::io_error, "write to " + path + " failed");
}

[[nodiscard]] inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(ErrorCode::io_error, "read from " + path + " failed");
    return ss.str();
}

}  // namespace triekit
