#include "prunelab/harness/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "prunelab/errors.hpp"

namespace prunelab::harness {

std::optional<std::string> ConfigSection::get(std::string_view key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return v;
    return std::nullopt;
}

void ConfigSection::set(std::string key, std::string value) {
    for (auto& [k, v] : entries) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    entries.emplace_back(std::move(key), std::move(value));
}

const ConfigSection* ConfigDocument::find(std::string_view name) const {
    for (const auto& s : sections)
        if (s.name == name) return &s;
    return nullptr;
}

ConfigSection& ConfigDocument::section(std::string_view name) {
    for (auto& s : sections)
        if (s.name == name) return s;
    sections.push_back({std::string(name), {}});
    return sections.back();
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

namespace {

// A ';' or '#' preceded by whitespace starts a trailing comment.
std::string_view strip_inline_comment(std::string_view line) {
    for (std::size_t i = 1; i < line.size(); ++i)
        if ((line[i] == ';' || line[i] == '#') && (line[i - 1] == ' ' || line[i - 1] == '\t'))
            return line.substr(0, i);
    return line;
}

}  // namespace

ConfigDocument parse_config(std::string_view text) {
    ConfigDocument doc;
    ConfigSection* current = nullptr;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view raw =
            text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const std::string line = trim(strip_inline_comment(raw));
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        auto fail = [&](const std::string& why) {
            throw InvalidArgument("config line " + std::to_string(line_no) + ": " + why);
        };
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            const std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
            if (name.empty()) fail("empty section name");
            if (doc.find(name)) fail("duplicate section [" + name + "]");
            current = &doc.section(name);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        if (!current) fail("key outside of any section");
        std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) fail("empty key");
        if (current->get(key)) fail("duplicate key '" + key + "'");
        current->entries.emplace_back(std::move(key), std::move(value));
    }
    return doc;
}

std::string serialize_config(const ConfigDocument& doc) {
    std::ostringstream os;
    bool first = true;
    for (const auto& s : doc.sections) {
        if (!first) os << '\n';
        first = false;
        os << '[' << s.name << "]\n";
        for (const auto& [k, v] : s.entries) os << k << " = " << v << '\n';
    }
    return os.str();
}

ConfigDocument read_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = text.find(',', pos);
        std::string item = trim(text.substr(pos, comma == std::string_view::npos
                                                     ? std::string_view::npos
                                                     : comma - pos));
        if (item.empty()) throw InvalidArgument("empty item in list '" + std::string(text) + "'");
        out.push_back(std::move(item));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out;
}

double parse_real(std::string_view text, std::string_view what) {
    const std::string t = trim(text);
    if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw InvalidArgument(std::string(what) + ": not a number: '" + t + "'");
    return v;
}

long parse_integer(std::string_view text, std::string_view what) {
    const std::string t = trim(text);
    long v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw InvalidArgument(std::string(what) + ": not an integer: '" + t + "'");
    return v;
}

bool parse_bool(std::string_view text, std::string_view what) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw InvalidArgument(std::string(what) + ": not a boolean: '" + t + "'");
}

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace prunelab::harness
