#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace recomb {

/// "%.17g" rendering; integers print without exponent or fraction.
std::string format_double(double x);

/// RFC 4180 writer. One optional leading comment line carries run metadata.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void comment(const std::string& text);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);

  /// Lines written after the comment (header plus body).
  std::size_t lines() const { return lines_; }

 private:
  std::ostream& out_;
  std::size_t columns_ = 0;
  std::size_t lines_ = 0;
};

std::string csv_escape(const std::string& cell);

}  // namespace recomb
