#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "core/common.hpp"

namespace bdbm {

// CSV with '#'-prefixed metadata comment lines before the header row.
struct CsvDoc {
  std::vector<std::pair<std::string, std::string>> meta;  // "# key = value"
  std::vector<std::string> header;
  std::vector<vec> rows;
};

// shortest exact round-trip decimal for a double
std::string format_double(double v);

void write_csv(std::ostream& os, const CsvDoc& doc);
std::string csv_to_string(const CsvDoc& doc);
void write_csv_file(const std::string& path, const CsvDoc& doc);  // temp + rename

CsvDoc read_csv(std::istream& is);
CsvDoc read_csv_file(const std::string& path);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace bdbm
