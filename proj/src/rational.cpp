#include "mixflow/rational.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mixflow/errors.hpp"

namespace mixflow {

namespace {

long long checked(__int128 v, const char* what) {
  if (v > INT64_MAX || v < INT64_MIN)
    throw std::overflow_error(std::string("Rational: overflow in ") + what);
  return static_cast<long long>(v);
}

} // namespace

Rational::Rational(long long n, long long d) : num_(n), den_(d) {
  if (d == 0) throw std::invalid_argument("Rational: zero denominator");
  normalize();
}

void Rational::normalize() {
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  const long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
  if (num_ == 0) den_ = 1;
}

Rational Rational::from_double(double x) {
  if (!std::isfinite(x)) throw ValidationError("Rational: non-finite value");
  const double tol = 1e-12 * std::max(1.0, std::abs(x));
  // Continued-fraction convergents.
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double a = x;
  for (int it = 0; it < 64; ++it) {
    const double fl = std::floor(a);
    if (std::abs(fl) > 1e15) break;
    const long long ai = static_cast<long long>(fl);
    const long long p2 = checked(static_cast<__int128>(ai) * p1 + p0, "from_double");
    const long long q2 = checked(static_cast<__int128>(ai) * q1 + q0, "from_double");
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    if (q1 > 1000000) break;
    if (q1 > 0 && std::abs(x - static_cast<double>(p1) / q1) <= tol)
      return Rational(p1, q1);
    const double rem = a - fl;
    if (rem < 1e-15) break;
    a = 1.0 / rem;
  }
  throw ValidationError("Rational: value has no small rational representation: " +
                        std::to_string(x));
}

Rational Rational::parse(const std::string& s) {
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const long long n = std::stoll(s.substr(0, slash));
    const long long d = std::stoll(s.substr(slash + 1));
    return Rational(n, d);
  }
  if (s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
      s.find('E') != std::string::npos)
    return from_double(std::stod(s));
  return Rational(std::stoll(s));
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::operator+(const Rational& o) const {
  const __int128 n = static_cast<__int128>(num_) * o.den_ +
                     static_cast<__int128>(o.num_) * den_;
  const __int128 d = static_cast<__int128>(den_) * o.den_;
  return Rational(checked(n, "+"), checked(d, "+"));
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator*(const Rational& o) const {
  const __int128 n = static_cast<__int128>(num_) * o.num_;
  const __int128 d = static_cast<__int128>(den_) * o.den_;
  return Rational(checked(n, "*"), checked(d, "*"));
}

Rational Rational::operator/(const Rational& o) const {
  if (o.num_ == 0) throw std::invalid_argument("Rational: division by zero");
  const __int128 n = static_cast<__int128>(num_) * o.den_;
  const __int128 d = static_cast<__int128>(den_) * o.num_;
  return Rational(checked(n, "/"), checked(d, "/"));
}

bool Rational::operator<(const Rational& o) const {
  return static_cast<__int128>(num_) * o.den_ < static_cast<__int128>(o.num_) * den_;
}

Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

} // namespace mixflow
