#include "emtopo/csv.hpp"

#include <cstdio>

namespace emtopo {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

void CsvWriter::comment(const std::string& line) { os_ << "# " << line << "\n"; }

void CsvWriter::header(const std::vector<std::string>& columns) {
  for (size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
  os_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  for (size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << format_double(values[i]);
  os_ << "\n";
}

void CsvWriter::row(long index, const std::vector<double>& values) {
  os_ << index;
  for (double v : values) os_ << "," << format_double(v);
  os_ << "\n";
}

}  // namespace emtopo
