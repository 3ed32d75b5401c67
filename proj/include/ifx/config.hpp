#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ifx/common.hpp"

namespace ifx {

// ============================================================================
// Sectioned key-value configuration text
// ============================================================================
//
// Format: `[section]` headers followed by `key = value` lines; `#` or `;`
// start a comment; blank lines are ignored. Sections and keys keep their
// original order so that parse -> serialize -> parse is the identity on the
// structured content.

struct ConfigSection {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;

    bool operator==(const ConfigSection&) const = default;
};

class Config {
  public:
    std::vector<ConfigSection> sections;

    bool operator==(const Config&) const = default;

    bool has_section(const std::string& name) const { return find(name) != nullptr; }

    bool has(const std::string& section, const std::string& key) const {
        const ConfigSection* s = find(section);
        if (!s) return false;
        for (const auto& [k, v] : s->entries)
            if (k == key) return true;
        return false;
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        const std::string* v = lookup(section, key);
        return v ? *v : fallback;
    }

    std::string require_string(const std::string& section, const std::string& key) const {
        const std::string* v = lookup(section, key);
        if (!v) throw ConfigError("config: missing required key [" + section + "] " + key);
        return *v;
    }

    double get_double(const std::string& section, const std::string& key, double fallback) const {
        const std::string* v = lookup(section, key);
        return v ? parse_double(section, key, *v) : fallback;
    }

    long get_int(const std::string& section, const std::string& key, long fallback) const {
        const std::string* v = lookup(section, key);
        if (!v) return fallback;
        const std::string& text = *v;
        char* end = nullptr;
        long parsed = std::strtol(text.c_str(), &end, 10);
        if (end == text.c_str() || *end != '\0')
            throw ConfigError("config: [" + section + "] " + key + " is not an integer: '" +
                              text + "'");
        return parsed;
    }

    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const {
        const std::string* v = lookup(section, key);
        if (!v) return fallback;
        const std::string& text = *v;
        char* end = nullptr;
        unsigned long long parsed = std::strtoull(text.c_str(), &end, 10);
        if (end == text.c_str() || *end != '\0' || text.find('-') != std::string::npos)
            throw ConfigError("config: [" + section + "] " + key +
                              " is not an unsigned integer: '" + text + "'");
        return parsed;
    }

    bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
        const std::string* v = lookup(section, key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
        if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
        throw ConfigError("config: [" + section + "] " + key + " is not a boolean: '" + *v + "'");
    }

    // Comma-separated list of reals.
    std::vector<double> get_double_list(const std::string& section, const std::string& key) const {
        const std::string* v = lookup(section, key);
        std::vector<double> out;
        if (!v) return out;
        std::string token;
        std::istringstream stream(*v);
        while (std::getline(stream, token, ',')) {
            token = trim(token);
            if (token.empty())
                throw ConfigError("config: [" + section + "] " + key + " has an empty list item");
            out.push_back(parse_double(section, key, token));
        }
        return out;
    }

    void set(const std::string& section, const std::string& key, const std::string& value) {
        for (auto& s : sections) {
            if (s.name != section) continue;
            for (auto& [k, v] : s.entries) {
                if (k == key) {
                    v = value;
                    return;
                }
            }
            s.entries.emplace_back(key, value);
            return;
        }
        sections.push_back({section, {{key, value}}});
    }

    // Rejects keys outside the allowed vocabulary so that typos fail loudly.
    void check_known_keys(const std::string& section,
                          const std::vector<std::string>& allowed) const {
        const ConfigSection* s = find(section);
        if (!s) return;
        for (const auto& [k, v] : s->entries) {
            (void)v;
            if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
                throw ConfigError("config: unknown key [" + section + "] " + k);
        }
    }

    void check_known_sections(const std::vector<std::string>& allowed) const {
        for (const auto& s : sections)
            if (std::find(allowed.begin(), allowed.end(), s.name) == allowed.end())
                throw ConfigError("config: unknown section [" + s.name + "]");
    }

    std::string serialize() const {
        std::string out;
        bool first = true;
        for (const auto& s : sections) {
            if (!first) out += "\n";
            first = false;
            out += "[" + s.name + "]\n";
            for (const auto& [k, v] : s.entries) out += k + " = " + v + "\n";
        }
        return out;
    }

    static Config parse(const std::string& text) {
        Config cfg;
        ConfigSection* current = nullptr;
        std::istringstream stream(text);
        std::string raw;
        int line_no = 0;
        while (std::getline(stream, raw)) {
            ++line_no;
            std::string line = trim(strip_comment(raw));
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError("config: malformed section header at line " +
                                      std::to_string(line_no) + ": '" + raw + "'");
                std::string name = trim(line.substr(1, line.size() - 2));
                if (name.empty())
                    throw ConfigError("config: empty section name at line " +
                                      std::to_string(line_no));
                cfg.sections.push_back({name, {}});
                current = &cfg.sections.back();
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config: expected 'key = value' at line " +
                                  std::to_string(line_no) + ": '" + raw + "'");
            if (!current)
                throw ConfigError("config: key outside any [section] at line " +
                                  std::to_string(line_no));
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw ConfigError("config: empty key at line " + std::to_string(line_no));
            for (const auto& [k, v] : current->entries) {
                (void)v;
                if (k == key)
                    throw ConfigError("config: duplicate key '" + key + "' in [" +
                                      current->name + "]");
            }
            current->entries.emplace_back(std::move(key), std::move(value));
        }
        return cfg;
    }

    static Config parse_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("config: cannot open '" + path + "'");
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return parse(buffer.str());
    }

  private:
    const ConfigSection* find(const std::string& name) const {
        for (const auto& s : sections)
            if (s.name == name) return &s;
        return nullptr;
    }

    const std::string* lookup(const std::string& section, const std::string& key) const {
        const ConfigSection* s = find(section);
        if (!s) return nullptr;
        for (const auto& [k, v] : s->entries)
            if (k == key) return &v;
        return nullptr;
    }

    static double parse_double(const std::string& section, const std::string& key,
                               const std::string& text) {
        char* end = nullptr;
        double parsed = std::strtod(text.c_str(), &end);
        if (end == text.c_str() || *end != '\0')
            throw ConfigError("config: [" + section + "] " + key + " is not a number: '" + text +
                              "'");
        return parsed;
    }

    static std::string strip_comment(const std::string& line) {
        for (std::size_t i = 0; i < line.size(); ++i)
            if (line[i] == '#' || line[i] == ';') return line.substr(0, i);
        return line;
    }

    static std::string trim(const std::string& text) {
        std::size_t b = 0, e = text.size();
        while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
        return text.substr(b, e - b);
    }
};

}  // namespace ifx
