#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dspace::util {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 if absent
  std::vector<double> numeric_column(const std::string& name) const;
};

/// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF tolerated.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace dspace::util
