#ifndef MIXFLOW_MIXTURE_HPP
#define MIXFLOW_MIXTURE_HPP

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "mixflow/species.hpp"

namespace mixflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Ideal mixture of N constituents: chemical potentials split as
/// mu_i = g_i(T,p) + (T/M_i) ln x_i and the pressure is the root of
/// sum_i rho_i dg_i/dp(T,p) = 1 (volume additivity).
struct MixtureModel {
  std::vector<SpeciesParams> species;
  ReferenceState ref;

  int n() const { return static_cast<int>(species.size()); }
};

/// Throws ValidationError if any species violates its constraints.
MixtureModel make_mixture(std::vector<SpeciesParams> species, ReferenceState ref = {});

struct MixtureState {
  double T;
  Vec rho;
};

/// Natural variables of the entropy functional, w = (rho_1..rho_N, rho*u).
struct ConservedState {
  Vec rho;
  double rhou;
};

/// Closed-form single-species pressure roots dg_i/dp(T, p_i) = 1/varrho,
/// returned as (min_i p_i, max_i p_i). These bracket the mixture pressure.
std::pair<double, double> p_bounds(const MixtureModel& m, double T, double total_rho);

/// Implicit mixture pressure; residual |sum rho_i gp_i - 1| <= 1e-12.
double pressure(const MixtureModel& m, double T, const Vec& rho,
                std::optional<double> hint = std::nullopt);

double free_energy(const MixtureModel& m, double T, const Vec& rho);   // rho*psi
double internal_energy(const MixtureModel& m, double T, const Vec& rho); // rho*u
double entropy_density_neg(const MixtureModel& m, double T, const Vec& rho); // -rho*s
double heat_capacity(const MixtureModel& m, double T, const Vec& rho);
Vec chemical_potentials(const MixtureModel& m, double T, const Vec& rho);
Vec volume_fractions(const MixtureModel& m, double T, const Vec& rho);

/// Inverts rho*u = epsilon(T, rho) for T; monotone since d eps/dT > 0.
double temperature_from_energy(const MixtureModel& m, const Vec& rho, double rhou,
                               std::optional<double> hint = std::nullopt);

/// Entropy functional h(w) = -rho*s at w = (rho, rho*u), its gradient
/// (mu_i/T, -1/T) and its (N+1)x(N+1) positive definite Hessian.
double entropy_h(const MixtureModel& m, const ConservedState& w);
Vec grad_h(const MixtureModel& m, const ConservedState& w);
Mat hess_h(const MixtureModel& m, const ConservedState& w);

namespace detail {
/// Verifies the state invariants; throws DomainError.
void check_state(const MixtureModel& m, double T, const Vec& rho);
void check_conserved(const MixtureModel& m, const ConservedState& w);

/// Evaluations with the pressure root already known (hot paths).
double internal_energy_at(const MixtureModel& m, double T, double p, const Vec& rho);
double entropy_density_neg_at(const MixtureModel& m, double T, double p, const Vec& rho);
double heat_capacity_at(const MixtureModel& m, double T, double p, const Vec& rho);
} // namespace detail

} // namespace mixflow

#endif
