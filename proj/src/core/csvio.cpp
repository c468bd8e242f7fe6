#include "core/csvio.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "core/checkpoint.hpp"  // atomic_write_file

namespace bdbm {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const CsvDoc& doc) {
  for (const auto& [k, v] : doc.meta) os << "# " << k << " = " << v << "\n";
  for (size_t i = 0; i < doc.header.size(); ++i)
    os << doc.header[i] << (i + 1 < doc.header.size() ? "," : "\n");
  for (const auto& row : doc.rows) {
    for (size_t i = 0; i < row.size(); ++i)
      os << format_double(row[i]) << (i + 1 < row.size() ? "," : "\n");
  }
}

std::string csv_to_string(const CsvDoc& doc) {
  std::ostringstream os;
  write_csv(os, doc);
  return os.str();
}

void write_csv_file(const std::string& path, const CsvDoc& doc) {
  atomic_write_file(path, csv_to_string(doc));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

CsvDoc read_csv(std::istream& is) {
  CsvDoc doc;
  std::string line;
  bool have_header = false;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      std::string body = trim(t.substr(1));
      size_t eq = body.find('=');
      if (eq != std::string::npos)
        doc.meta.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
      continue;
    }
    if (!have_header) {
      doc.header = split_csv_line(t);
      have_header = true;
      continue;
    }
    std::vector<std::string> cells = split_csv_line(t);
    if (cells.size() != doc.header.size())
      throw FormatError("csv line " + std::to_string(lineno) + ": expected " +
                        std::to_string(doc.header.size()) + " cells, got " +
                        std::to_string(cells.size()));
    vec row(cells.size());
    for (size_t i = 0; i < cells.size(); ++i) {
      const char* s = cells[i].c_str();
      char* end = nullptr;
      row[i] = std::strtod(s, &end);
      if (end == s || *end != '\0')
        throw FormatError("csv line " + std::to_string(lineno) + ": bad number '" + cells[i] +
                          "'");
    }
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

CsvDoc read_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open csv file: " + path);
  return read_csv(f);
}

}  // namespace bdbm
