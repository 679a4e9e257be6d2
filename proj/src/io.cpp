#include "roughns/io.hpp"

#include "roughns/errors.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>

namespace roughns {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_trimmed(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::string piece;
    std::istringstream ss(s);
    while (std::getline(ss, piece, delim)) out.push_back(trim(piece));
    if (!s.empty() && s.back() == delim) out.emplace_back();
    return out;
}

CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        auto cells = split_trimmed(line, ',');
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw Error(ErrorKind::invalid_input, "csv line " + std::to_string(lineno) + " has wrong column count");
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            double v = 0.0;
            const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
            if (res.ec != std::errc() || res.ptr != c.data() + c.size())
                throw Error(ErrorKind::invalid_input, "csv line " + std::to_string(lineno) + ": bad number '" + c + "'");
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw Error(ErrorKind::invalid_input, "csv is empty");
    return t;
}

}  // namespace roughns
