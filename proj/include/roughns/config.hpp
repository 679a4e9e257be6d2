/// @file config.hpp
/// @brief Flat key = value configuration text with dotted section names.
///
/// One entry per line, '#' starts a comment, keys are unique. Typed getters report the
/// line and field of any malformed value through ConfigError.
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace roughns {

class Config {
public:
    struct Entry {
        std::string value;
        std::size_t line = 0;   ///< 0 for values set programmatically
    };

    static Config parse(std::istream& is);
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    const Entry* find(const std::string& key) const;
    void set(const std::string& key, const std::string& value, std::size_t line = 0);
    std::vector<std::string> keys() const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Comma-separated lists; an empty value is an empty list.
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::uint64_t> get_u64s(const std::string& key, const std::vector<std::uint64_t>& fallback) const;

    double require_double(const std::string& key, const std::string& reason) const;

    /// Sorted "key = value" lines.
    void write(std::ostream& os) const;

private:
    std::map<std::string, Entry> entries_;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);

/// Parses a double or throws ConfigError for the given field and line.
double parse_double_field(const std::string& text, const std::string& field, std::size_t line);
std::uint64_t parse_u64_field(const std::string& text, const std::string& field, std::size_t line);

}  // namespace roughns
