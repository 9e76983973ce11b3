#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace scn::cli {

/// Nine significant digits, shortest form.
std::string format_real(double v);

/// Long-format CSV writer: a header row, then one row per record.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(std::size_t v);
  CsvWriter& operator<<(int v);
  CsvWriter& operator<<(bool v);
  CsvWriter& operator<<(const std::string& v);
  CsvWriter& operator<<(const char* v) { return *this << std::string(v); }

 private:
  void cell(const std::string& text);

  std::ostream& out_;
  std::size_t columns_;
  std::size_t column_ = 0;
};

}  // namespace scn::cli
