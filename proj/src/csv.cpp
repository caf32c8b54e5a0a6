#include "pie/csv.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace pie {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // Trim surrounding spaces and an optional quote pair.
    size_t b = cell.find_first_not_of(" \t\r");
    size_t e = cell.find_last_not_of(" \t\r");
    std::string t = b == std::string::npos ? "" : cell.substr(b, e - b + 1);
    if (t.size() >= 2 && t.front() == '"' && t.back() == '"')
      t = t.substr(1, t.size() - 2);
    out.push_back(t);
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw InputError(path + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  CsvTable table;
  table.headers = split(line);
  const size_t width = table.headers.size();
  if (width == 0) throw InputError(path + " has an empty header row");

  std::vector<std::vector<double>> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != width) {
      throw InputError(path + ":" + std::to_string(line_no) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(width));
    }
    std::vector<double> row(width);
    for (size_t j = 0; j < width; ++j) {
      const std::string& c = cells[j];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc{} || ptr != c.data() + c.size()) {
        throw InputError(path + ":" + std::to_string(line_no) + " column '" +
                         table.headers[j] + "': cannot parse '" + c + "'");
      }
      row[j] = v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(path + " has no data rows");

  table.values.resize(rows.size(), width);
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < width; ++j) table.values(i, j) = rows[i][j];
  return table;
}

std::string format_double(double v) {
  // Shortest round-tripping string; low precision does not imply short
  // ("%.1g" turns 100 into "1e+02"), so every precision competes on length.
  char best[32];
  int best_len = std::snprintf(best, sizeof best, "%.17g", v);
  for (int prec = 1; prec < 17; ++prec) {
    char probe[32];
    int len = std::snprintf(probe, sizeof probe, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(probe, "%lf", &back);
    if (back == v && len < best_len) {
      std::memcpy(best, probe, static_cast<size_t>(len) + 1);
      best_len = len;
    }
  }
  return std::string(best, static_cast<size_t>(best_len));
}

}  // namespace pie
