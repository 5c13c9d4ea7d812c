#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace gridshock {

// Strict comma-separated table: no quoting, no escapes, exact header match.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // every row has header.size() cells
  std::string source;                          // file name for error messages
};

CsvTable parse_csv(const std::string& text, const std::vector<std::string>& expected_header,
                   const std::string& source);
CsvTable read_csv(const std::filesystem::path& file,
                  const std::vector<std::string>& expected_header);

std::string read_file(const std::filesystem::path& file);
void write_file(const std::filesystem::path& file, const std::string& content);

// Strict numeric parse: whole cell must be a finite number.
double to_double(const std::string& cell, const std::string& context);
long long to_int(const std::string& cell, const std::string& context);

// Shortest round-trip decimal form (std::to_chars). The canonical number
// format for every written artifact; reparsing gives back the same double.
std::string fmt_double(double v);

}  // namespace gridshock
