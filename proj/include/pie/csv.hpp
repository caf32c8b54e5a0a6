#pragma once

#include <string>
#include <vector>

#include "pie/types.hpp"

namespace pie {

struct CsvTable {
  std::vector<std::string> headers;
  Matrix values;  // one row per data line
};

// Reads a numeric CSV with a header row.  Throws InputError naming the line
// and column of the first unparsable cell, a ragged row, or an empty file.
CsvTable read_csv(const std::string& path);

// Shortest round-trip decimal form; "0" stays "0", outputs never depend on
// locale.
std::string format_double(double v);

}  // namespace pie
