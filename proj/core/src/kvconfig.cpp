// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include "siamcut/kvconfig.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "siamcut/errors.hpp"

namespace siamcut {

const KvEntry* KvSection::find(std::string_view key) const {
    // Last assignment wins.
    for (auto it = entries.rbegin(); it != entries.rend(); ++it)
        if (it->key == key) return &*it;
    return nullptr;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

KvDocument KvDocument::parse(std::string_view text) {
    KvDocument doc;
    KvSection* current = &doc.root;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        ++line_no;
        std::string line = trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
            doc.sections.push_back(KvSection{trim(line.substr(1, line.size() - 2)), line_no, {}});
            current = &doc.sections.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected `key = value`");
        KvEntry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
        if (e.key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        current->entries.push_back(std::move(e));
    }
    return doc;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

KvDocument KvDocument::load(const std::filesystem::path& path) {
    return parse(read_text_file(path));
}

double parse_double(std::string_view key, std::string_view value) {
    // strtod accepts forms like "1e-4" that from_chars on older toolchains rejects.
    std::string s(value);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw ConfigError("key '" + std::string(key) + "': not a number: '" + s + "'");
    return v;
}

std::int64_t parse_int(std::string_view key, std::string_view value) {
    std::int64_t v = 0;
    const auto* first = value.data();
    const auto* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || value.empty())
        throw ConfigError("key '" + std::string(key) + "': not an integer: '" + std::string(value) + "'");
    return v;
}

std::uint64_t parse_u64(std::string_view key, std::string_view value) {
    std::uint64_t v = 0;
    const auto* first = value.data();
    const auto* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || value.empty())
        throw ConfigError("key '" + std::string(key) + "': not an unsigned integer: '" + std::string(value) +
                          "'");
    return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("key '" + std::string(key) + "': not a boolean: '" + std::string(value) + "'");
}

std::vector<std::int64_t> parse_int_list(std::string_view key, std::string_view value) {
    std::vector<std::int64_t> out;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        auto comma = value.find(',', pos);
        if (comma == std::string_view::npos) comma = value.size();
        out.push_back(parse_int(key, trim(value.substr(pos, comma - pos))));
        pos = comma + 1;
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace siamcut
