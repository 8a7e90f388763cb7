// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0
//
// Line-oriented `key = value` configuration text shared by the backbone,
// training and synthetic-dataset configs.
//
//   # comment            (also `;`), blank lines ignored
//   key = value          entry in the current section
//   [name]               starts a new section; may repeat
//
// Entries before the first section header belong to the root section.
// Keys are case-sensitive; surrounding whitespace is trimmed.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace siamcut {

struct KvEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct KvSection {
    std::string name;  // empty for the root section
    int line = 0;
    std::vector<KvEntry> entries;

    const KvEntry* find(std::string_view key) const;
};

struct KvDocument {
    KvSection root;
    std::vector<KvSection> sections;

    static KvDocument parse(std::string_view text);
    static KvDocument load(const std::filesystem::path& path);
};

// Typed conversions; throw ConfigError naming the key on failure.
double parse_double(std::string_view key, std::string_view value);
std::int64_t parse_int(std::string_view key, std::string_view value);
std::uint64_t parse_u64(std::string_view key, std::string_view value);
bool parse_bool(std::string_view key, std::string_view value);
std::vector<std::int64_t> parse_int_list(std::string_view key, std::string_view value);

std::string trim(std::string_view s);
std::string read_text_file(const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace siamcut
