#include "gridshock/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gridshock/error.hpp"

namespace gridshock {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::vector<std::string>& expected_header,
                   const std::string& source) {
  CsvTable table;
  table.source = source;
  std::istringstream in(text);
  std::string line;
  bool saw_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (!saw_header) {
      if (cells != expected_header)
        fail(ErrorCode::ParseError, source + ": expected header '" + join(expected_header) +
                                        "', found '" + line + "'");
      table.header = std::move(cells);
      saw_header = true;
      continue;
    }
    if (cells.size() != expected_header.size())
      fail(ErrorCode::ParseError, source + ":" + std::to_string(line_no) + ": expected " +
                                      std::to_string(expected_header.size()) + " fields, found " +
                                      std::to_string(cells.size()));
    table.rows.push_back(std::move(cells));
  }
  if (!saw_header)
    fail(ErrorCode::ParseError, source + ": empty file, expected header '" +
                                    join(expected_header) + "'");
  return table;
}

CsvTable read_csv(const std::filesystem::path& file,
                  const std::vector<std::string>& expected_header) {
  return parse_csv(read_file(file), expected_header, file.string());
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot open '" + file.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& file, const std::string& content) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::ParseError, "cannot write '" + file.string() + "'");
  out << content;
  if (!out) fail(ErrorCode::ParseError, "short write to '" + file.string() + "'");
}

double to_double(const std::string& cell, const std::string& context) {
  double v = 0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    fail(ErrorCode::ParseError, context + ": not a finite number: '" + cell + "'");
  return v;
}

long long to_int(const std::string& cell, const std::string& context) {
  long long v = 0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    fail(ErrorCode::ParseError, context + ": not an integer: '" + cell + "'");
  return v;
}

std::string fmt_double(double v) {
  if (v == 0.0) v = 0.0;  // normalise -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace gridshock
