#include "mixflow/csv.hpp"

#include <cstdio>

namespace mixflow {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvWriter::header(const std::vector<std::string>& names) {
  for (size_t i = 0; i < names.size(); ++i) {
    if (i) out_ << ',';
    out_ << names[i];
  }
  out_ << '\n';
  first_ = true;
}

void CsvWriter::field(const std::string& s) {
  if (!first_) out_ << ',';
  out_ << s;
  first_ = false;
}

void CsvWriter::field(double v) { field(format_double(v)); }

void CsvWriter::field(long long v) { field(std::to_string(v)); }

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

} // namespace mixflow
