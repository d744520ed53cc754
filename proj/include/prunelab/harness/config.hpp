#pragma once

// Sectioned key = value text files:
//
//   # comment
//   [section]
//   key = value
//   list = 1, 2, 3
//
// Order of sections and keys is preserved so that serialize(parse(text)) is
// stable.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace prunelab::harness {

struct ConfigSection {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;

    std::optional<std::string> get(std::string_view key) const;
    void set(std::string key, std::string value);
};

struct ConfigDocument {
    std::vector<ConfigSection> sections;

    const ConfigSection* find(std::string_view name) const;
    ConfigSection& section(std::string_view name);  // created on demand

    friend bool operator==(const ConfigDocument&, const ConfigDocument&) = default;
};

inline bool operator==(const ConfigSection& a, const ConfigSection& b) {
    return a.name == b.name && a.entries == b.entries;
}

/// Throws InvalidArgument with the offending line number on syntax errors.
ConfigDocument parse_config(std::string_view text);
std::string serialize_config(const ConfigDocument& doc);

ConfigDocument read_config_file(const std::string& path);

/// Splits a comma list, trimming blanks; empty items are rejected.
std::vector<std::string> split_list(std::string_view text);
std::string join_list(const std::vector<std::string>& items);

std::string trim(std::string_view s);

double parse_real(std::string_view text, std::string_view what);
long parse_integer(std::string_view text, std::string_view what);
bool parse_bool(std::string_view text, std::string_view what);
std::string format_real(double v);  // %.17g

}  // namespace prunelab::harness
