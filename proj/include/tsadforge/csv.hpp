#pragma once

// Time-indexed CSV: header "t,<col>,...", one row per step, "\n" line ends,
// doubles in shortest round-trip form.

#include "tsadforge/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace tsadforge {

/// Shortest decimal string that parses back to the same binary64.
std::string format_double(double v);
/// Exact, locale-independent inverse of format_double. Throws ParseError.
double parse_double(std::string_view s);

std::vector<std::string> channel_header(Index d);

std::string panel_to_csv(const Panel& x);
std::string mask_to_csv(const Mask& m);
std::string scores_to_csv(const Series& scores);

struct CsvTable {
  std::vector<std::string> header;  // without the leading "t"
  Panel values;                     // rows x header.size()
};

/// Throws ParseError with the 1-based line number on malformed input.
CsvTable parse_csv(std::string_view text);
/// parse_csv plus a 0/1 check.
Mask parse_mask_csv(std::string_view text);

std::string read_file(const std::string& path);
/// Throws IoError.
void write_file(const std::string& path, std::string_view contents);

}  // namespace tsadforge
