#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace pilotwave {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Minimal TOML-style config: [section] headers, key = value lines,
/// '#' comments. Values: numbers, booleans, quoted strings, and flat arrays
/// of numbers or strings. Enough for the shipped presets; diagnostics carry
/// the offending line number.
class Config {
public:
    using Value = std::variant<double, bool, std::string, std::vector<double>,
                               std::vector<std::string>>;

    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError(path + ": cannot open");
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path);
    }

    static Config parse(const std::string& text, const std::string& name = "<config>") {
        Config cfg;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string s = strip_comment(line);
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    throw ConfigError(loc(name, lineno) + "unterminated section header");
                section = trim(s.substr(1, s.size() - 2));
                if (section.empty())
                    throw ConfigError(loc(name, lineno) + "empty section name");
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError(loc(name, lineno) + "expected 'key = value'");
            const std::string key = trim(s.substr(0, eq));
            const std::string val = trim(s.substr(eq + 1));
            if (key.empty())
                throw ConfigError(loc(name, lineno) + "empty key");
            if (val.empty())
                throw ConfigError(loc(name, lineno) + "missing value for '" + key + "'");
            cfg.values_[section + "." + key] = parse_value(val, name, lineno);
        }
        return cfg;
    }

    bool has(const std::string& section, const std::string& key) const {
        return values_.count(section + "." + key) != 0;
    }

    double number(const std::string& section, const std::string& key) const {
        return expect<double>(section, key, "a number");
    }
    double number_or(const std::string& section, const std::string& key,
                     double fallback) const {
        return has(section, key) ? number(section, key) : fallback;
    }
    bool boolean_or(const std::string& section, const std::string& key,
                    bool fallback) const {
        if (!has(section, key)) return fallback;
        return expect<bool>(section, key, "a boolean");
    }
    std::string string(const std::string& section, const std::string& key) const {
        return expect<std::string>(section, key, "a string");
    }
    std::string string_or(const std::string& section, const std::string& key,
                          const std::string& fallback) const {
        return has(section, key) ? string(section, key) : fallback;
    }
    std::vector<double> numbers(const std::string& section, const std::string& key) const {
        return expect<std::vector<double>>(section, key, "an array of numbers");
    }
    std::vector<std::string> strings(const std::string& section,
                                     const std::string& key) const {
        return expect<std::vector<std::string>>(section, key, "an array of strings");
    }

private:
    std::map<std::string, Value> values_;

    template <typename T>
    T expect(const std::string& section, const std::string& key,
             const char* what) const {
        const auto it = values_.find(section + "." + key);
        if (it == values_.end())
            throw ConfigError("missing required key [" + section + "] " + key);
        if (const T* v = std::get_if<T>(&it->second)) return *v;
        throw ConfigError("[" + section + "] " + key + " must be " + what);
    }

    static std::string loc(const std::string& name, int lineno) {
        return name + ":" + std::to_string(lineno) + ": ";
    }

    static std::string trim(const std::string& s) {
        std::size_t b = 0, e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
        return s.substr(b, e - b);
    }

    /// Remove a trailing comment, respecting quoted strings.
    static std::string strip_comment(const std::string& line) {
        bool in_str = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_str = !in_str;
            if (line[i] == '#' && !in_str) return trim(line.substr(0, i));
        }
        return trim(line);
    }

    static Value parse_value(const std::string& v, const std::string& name, int lineno) {
        if (v == "true") return true;
        if (v == "false") return false;
        if (v.front() == '"') {
            if (v.size() < 2 || v.back() != '"')
                throw ConfigError(loc(name, lineno) + "unterminated string");
            return v.substr(1, v.size() - 2);
        }
        if (v.front() == '[') {
            if (v.back() != ']')
                throw ConfigError(loc(name, lineno) + "unterminated array");
            const std::string body = trim(v.substr(1, v.size() - 2));
            std::vector<std::string> items;
            std::string cur;
            bool in_str = false;
            for (char c : body) {
                if (c == '"') in_str = !in_str;
                if (c == ',' && !in_str) {
                    items.push_back(trim(cur));
                    cur.clear();
                } else {
                    cur += c;
                }
            }
            if (!trim(cur).empty()) items.push_back(trim(cur));
            if (items.empty()) return std::vector<double>{};
            if (!items.front().empty() && items.front().front() == '"') {
                std::vector<std::string> out;
                for (const auto& it : items) {
                    if (it.size() < 2 || it.front() != '"' || it.back() != '"')
                        throw ConfigError(loc(name, lineno) + "bad string in array");
                    out.push_back(it.substr(1, it.size() - 2));
                }
                return out;
            }
            std::vector<double> out;
            for (const auto& it : items) out.push_back(parse_number(it, name, lineno));
            return out;
        }
        return parse_number(v, name, lineno);
    }

    static double parse_number(const std::string& v, const std::string& name,
                               int lineno) {
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size())
                throw ConfigError(loc(name, lineno) + "trailing characters after number '" +
                                  v + "'");
            return d;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError(loc(name, lineno) + "cannot parse value '" + v + "'");
        }
    }
};

}  // namespace pilotwave
