#ifndef MIXFLOW_TEST_HELPERS_HPP
#define MIXFLOW_TEST_HELPERS_HPP

#include <cmath>
#include <functional>
#include <random>

#include "mixflow/mixture.hpp"

namespace mixflow::testing {

inline SpeciesParams ideal_gas(double c0, double rhoR, double M = 1.0, double g1 = 0.0,
                               double g0 = 0.0) {
  SpeciesParams s;
  s.variant = GibbsVariant::IdealGas;
  s.c0 = c0;
  s.rhoR = rhoR;
  s.molar_mass = M;
  s.g1 = g1;
  s.g0 = g0;
  return s;
}

inline SpeciesParams tait(double alpha, double beta, double gamma, double c0,
                          double rhoR, double M = 1.0, double g1 = 0.0,
                          double g0 = 0.0) {
  SpeciesParams s;
  s.variant = GibbsVariant::Tait;
  s.alpha = alpha;
  s.beta = beta;
  s.gamma = gamma;
  s.c0 = c0;
  s.rhoR = rhoR;
  s.molar_mass = M;
  s.g1 = g1;
  s.g0 = g0;
  return s;
}

/// Single ideal gas, two distinct ideal gases, Tait + ideal mix.
inline MixtureModel model_single_gas() { return make_mixture({ideal_gas(2.0, 1.0)}); }

inline MixtureModel model_two_gases() {
  return make_mixture({ideal_gas(2.0, 1.0, 1.0), ideal_gas(2.5, 1.2, 2.0)});
}

inline MixtureModel model_tait_mix() {
  return make_mixture({tait(0.25, 0.5, 1.0, 1.0, 2.0, 1.5), ideal_gas(2.0, 1.0, 1.0)});
}

/// Random states: T in logU[0.1, 100], rho_i in logU[0.1, 10].
struct RandomStates {
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> u{0.0, 1.0};
  explicit RandomStates(unsigned long long seed) : rng(seed) {}
  double T() { return std::pow(10.0, -1.0 + 3.0 * u(rng)); }
  Vec rho(int n) {
    Vec r(n);
    for (int i = 0; i < n; ++i) r[i] = std::pow(10.0, -1.0 + 2.0 * u(rng));
    return r;
  }
};

/// Central finite difference with h = 1e-5 max(1, |x|).
inline double fd_central(const std::function<double(double)>& f, double x) {
  const double h = 1e-5 * std::max(1.0, std::abs(x));
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

} // namespace mixflow::testing

#endif
