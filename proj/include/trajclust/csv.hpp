#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace trajclust {

// Shortest representation that round-trips the exact double value.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& context) {
  double v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::runtime_error(context + ": invalid number '" + std::string(s) + "'");
  }
  return v;
}

inline long long parse_int(std::string_view s, const std::string& context) {
  long long v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::runtime_error(context + ": invalid integer '" + std::string(s) + "'");
  }
  return v;
}

struct CsvRow {
  std::vector<std::string> fields;
  std::size_t line;  // 1-based line number in the source file
};

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

// Reads a comma-separated file with a mandatory header. Every data row must
// have exactly as many fields as the header; errors carry path:line.
inline std::vector<CsvRow> read_csv(const std::string& path,
                                    const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  auto chop_cr = [](std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
  };

  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path + ": empty file, expected header");
  }
  ++lineno;
  chop_cr(line);
  auto header = split_csv_line(line);
  if (header != expected_header) {
    std::string want;
    for (std::size_t i = 0; i < expected_header.size(); ++i) {
      if (i) want += ',';
      want += expected_header[i];
    }
    throw std::runtime_error(path + ":1: bad header '" + line + "', expected '" + want + "'");
  }

  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    chop_cr(line);
    if (line.empty()) continue;
    CsvRow row{split_csv_line(line), lineno};
    if (row.fields.size() != expected_header.size()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(expected_header.size()) + " fields, got " +
                               std::to_string(row.fields.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string csv_context(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line);
}

}  // namespace trajclust
