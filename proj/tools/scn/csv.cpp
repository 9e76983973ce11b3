#include "csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace scn::cli {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header) : out_(out), columns_(header.size()) {
  for (const auto& h : header) cell(h);
}

CsvWriter& CsvWriter::operator<<(double v) {
  cell(format_real(v));
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::size_t v) {
  cell(std::to_string(v));
  return *this;
}

CsvWriter& CsvWriter::operator<<(int v) {
  cell(std::to_string(v));
  return *this;
}

CsvWriter& CsvWriter::operator<<(bool v) {
  cell(v ? "true" : "false");
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) {
    cell(v);
    return *this;
  }
  std::string quoted = "\"";
  for (char c : v) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  cell(quoted + "\"");
  return *this;
}

void CsvWriter::cell(const std::string& text) {
  if (column_ > 0) out_ << ',';
  out_ << text;
  if (++column_ == columns_) {
    out_ << '\n';
    column_ = 0;
  }
}

}  // namespace scn::cli
