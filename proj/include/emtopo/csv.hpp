#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace emtopo {

/// Comma-separated rows, '#' comment header, doubles at 17 significant digits.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void comment(const std::string& line);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  /// Leading integer column followed by doubles.
  void row(long index, const std::vector<double>& values);

 private:
  std::ostream& os_;
};

std::string format_double(double v);

}  // namespace emtopo
