#ifndef MIXFLOW_CSV_HPP
#define MIXFLOW_CSV_HPP

#include <ostream>
#include <string>
#include <vector>

namespace mixflow {

/// CSV emission with '.' decimal separator and 17 significant digits,
/// locale-independent.
class CsvWriter {
public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& names);
  void field(const std::string& s);
  void field(double v);
  void field(long long v);
  void end_row();

private:
  std::ostream& out_;
  bool first_ = true;
};

std::string format_double(double v);

} // namespace mixflow

#endif
