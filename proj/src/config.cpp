#include "roughns/config.hpp"

#include "roughns/errors.hpp"
#include "roughns/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

namespace roughns {

Config Config::parse(std::istream& is) {
    Config c;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        const std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line, lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("", lineno, "empty key");
        for (char ch : key)
            if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '_'))
                throw ConfigError(key, lineno, "keys use letters, digits, '_' and '.'");
        if (c.entries_.count(key)) throw ConfigError(key, lineno, "duplicate key");
        c.entries_[key] = Entry{trim(line.substr(eq + 1)), lineno};
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", 0, "cannot read " + path);
    return parse(in);
}

const Config::Entry* Config::find(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

void Config::set(const std::string& key, const std::string& value, std::size_t line) {
    entries_[key] = Entry{value, line};
}

std::vector<std::string> Config::keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_) out.push_back(k);
    return out;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? e->value : fallback;
}

double parse_double_field(const std::string& text, const std::string& field, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
        throw ConfigError(field, line, "expected a finite number, got '" + text + "'");
    return v;
}

std::uint64_t parse_u64_field(const std::string& text, const std::string& field, std::size_t line) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ConfigError(field, line, "expected a non-negative integer, got '" + text + "'");
    return v;
}

double Config::get_double(const std::string& key, double fallback) const {
    const Entry* e = find(key);
    return e ? parse_double_field(e->value, key, e->line) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    const Entry* e = find(key);
    return e ? parse_u64_field(e->value, key, e->line) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    if (e->value == "true") return true;
    if (e->value == "false") return false;
    throw ConfigError(key, e->line, "expected true or false, got '" + e->value + "'");
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    std::vector<double> out;
    if (e->value.empty()) return out;
    for (const std::string& piece : split_trimmed(e->value, ',')) out.push_back(parse_double_field(piece, key, e->line));
    return out;
}

std::vector<std::uint64_t> Config::get_u64s(const std::string& key, const std::vector<std::uint64_t>& fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    std::vector<std::uint64_t> out;
    if (e->value.empty()) return out;
    for (const std::string& piece : split_trimmed(e->value, ',')) out.push_back(parse_u64_field(piece, key, e->line));
    return out;
}

double Config::require_double(const std::string& key, const std::string& reason) const {
    const Entry* e = find(key);
    if (!e) throw ConfigError(key, 0, "missing; required " + reason);
    return parse_double_field(e->value, key, e->line);
}

void Config::write(std::ostream& os) const {
    for (const auto& [k, e] : entries_) os << k << " = " << e.value << '\n';
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace roughns
