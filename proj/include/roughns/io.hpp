/// @file io.hpp
/// @brief Small CSV and number formatting helpers shared by the exporters.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace roughns {

/// Shortest round-trip decimal representation ("nan", "inf", "-inf" for non-finite values).
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Reads a numeric CSV with one header line. Throws invalid-input on ragged or non-numeric rows.
CsvTable read_csv(std::istream& is);

/// Splits on a delimiter and trims surrounding whitespace of each piece.
std::vector<std::string> split_trimmed(const std::string& s, char delim);
std::string trim(const std::string& s);

}  // namespace roughns
