#ifndef MIXFLOW_RATIONAL_HPP
#define MIXFLOW_RATIONAL_HPP

#include <cstdint>
#include <string>

namespace mixflow {

/// Exact rational arithmetic on int64 (checked against overflow through
/// 128-bit intermediates). Used for the growth-exponent algebra, where all
/// inputs are small fractions.
class Rational {
public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {} // NOLINT(google-explicit-constructor)
  Rational(long long n, long long d);

  /// Nearest small-denominator rational within |x - p/q| <= 1e-12 max(1,|x|)
  /// (continued-fraction expansion, denominators up to 1e6). Throws
  /// ValidationError for values without a small rational representation.
  static Rational from_double(double x);
  static Rational parse(const std::string& s); // "3", "-6/5", "0.4"

  long long num() const { return num_; }
  long long den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  Rational operator-() const { return Rational(-num_, den_); }
  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const;
  bool operator<=(const Rational& o) const { return *this < o || *this == o; }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator>=(const Rational& o) const { return o <= *this; }

private:
  long long num_;
  long long den_;
  void normalize();
};

Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

} // namespace mixflow

#endif
