#ifndef MIXFLOW_ERRORS_HPP
#define MIXFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mixflow {

/// Invalid thermodynamic state (nonpositive T, p or rho, or energy below the
/// admissible cone).
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

/// A root solve or fixed-point loop failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
  explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Exponent arguments left the range representable in double precision.
class OverflowGuardError : public std::runtime_error {
public:
  explicit OverflowGuardError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Model parameters violate a structural constraint.
class ValidationError : public std::invalid_argument {
public:
  explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A computed quantity violates a guaranteed sign or bound (bad parameters).
class ConsistencyError : public std::runtime_error {
public:
  explicit ConsistencyError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Solver state left the admissible half-space (rho <= 0 or q_N >= 0).
class DomainExit : public std::runtime_error {
public:
  DomainExit(const std::string& msg, double time)
      : std::runtime_error(msg), t(time) {}
  double t;
};

class FixedPointDiverged : public std::runtime_error {
public:
  FixedPointDiverged(const std::string& msg, double time)
      : std::runtime_error(msg), t(time) {}
  double t;
};

class CFLViolation : public std::runtime_error {
public:
  CFLViolation(const std::string& msg, double time)
      : std::runtime_error(msg), t(time) {}
  double t;
};

/// The heat-capacity ordering of the species admits no strict maximum.
class NoDominantSpecies : public std::runtime_error {
public:
  explicit NoDominantSpecies(const std::string& msg) : std::runtime_error(msg) {}
};

/// The exponent window of the temperature maximum principle is empty.
class InfeasibleWindow : public std::runtime_error {
public:
  explicit InfeasibleWindow(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace mixflow

#endif
