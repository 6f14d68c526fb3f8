#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mann {

/// Minimal CSV reader for the files this project writes: '#' comment lines
/// are collected separately, the first remaining line is the header, and
/// fields may be double-quoted with "" as an escaped quote.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Throws std::runtime_error on ragged rows or a missing header.
CsvTable read_csv(std::istream& in);

std::string csv_quote(std::string_view field);

}  // namespace mann
