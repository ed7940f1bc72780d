#ifndef MIXFLOW_DUAL_HPP
#define MIXFLOW_DUAL_HPP

#include <optional>

#include "mixflow/errors.hpp"
#include "mixflow/mixture.hpp"

namespace mixflow {

/// Entropic variables w* = (mu_1/T, ..., mu_N/T, -1/T); the last component
/// must be strictly negative.
struct DualState {
  Vec wstar;
};

/// Primal state recovered from w*: the temperature, the pressure root of
/// 1 = sum_i exp(M_i (w*_i - g_i(T,p)/T)), the partial densities and the
/// internal energy density.
struct DualEval {
  double T;
  double p;
  Vec rho;
  double rhou;
};

/// Inverse gradient map; throws OverflowGuardError when the exponent
/// arguments leave the double range (state far outside physical range).
DualEval dual_eval(const MixtureModel& m, const Vec& wstar,
                   std::optional<double> p_hint = std::nullopt);

/// The pressure root lies below/above the representable range. Both signal a
/// dual point in the far tail; the scalar-field solve treats them as density
/// sums of zero/infinity while bracketing.
class PressureRootBelowRange : public ConvergenceError {
public:
  using ConvergenceError::ConvergenceError;
};
class PressureRootAboveRange : public ConvergenceError {
public:
  using ConvergenceError::ConvergenceError;
};

ConservedState grad_hstar(const MixtureModel& m, const DualState& ws);

/// h*(w*) = w*.w - h(w) at w = grad_hstar(w*).
double hstar_value(const MixtureModel& m, const DualState& ws);

/// p = T h*(w*) = -h*(w*)/w*_{N+1}.
double pressure_dual(const MixtureModel& m, const DualState& ws);

/// Hessian of h* from the explicit block representations, evaluated at the
/// primal image of w*. Symmetric positive definite; inverse of hess_h there.
Mat hess_hstar(const MixtureModel& m, const DualState& ws);

/// Same assembly with the primal point (T, p, rho) already known.
Mat hess_hstar_at(const MixtureModel& m, double T, double p, const Vec& rho);

/// Closed form of D^2 h* xi^{N+1} . xi^{N+1} =
/// sum_i M_i rho_i (1 - gp_i varrho)^2 + T varrho^2 sum_i rho_i |gpp_i|.
double d2hstar_xi_xi(const MixtureModel& m, double T, double p, const Vec& rho);

namespace detail {
void check_dual(const MixtureModel& m, const Vec& wstar);
} // namespace detail

} // namespace mixflow

#endif
