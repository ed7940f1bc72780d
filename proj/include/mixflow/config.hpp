#ifndef MIXFLOW_CONFIG_HPP
#define MIXFLOW_CONFIG_HPP

#include <string>
#include <vector>

#include "mixflow/analysis.hpp"
#include "mixflow/solver.hpp"

namespace mixflow {

/// Scenario configuration parsed from versioned JSON. Unknown keys are
/// rejected with the offending key named.
struct ScenarioConfig {
  int schema = 1;
  ReferenceState ref;
  std::vector<SpeciesParams> species;

  // transport power laws in T
  double mobility0 = 1.0, mobility_exp = 0.0;
  double kappa0 = 1.0, kappa_exp = 0.0;
  Vec ltilde0;
  double ltilde_exp = 0.0;
  double eta0 = 0.0, eta_exp = 0.0;
  double lambda0 = 0.0, lambda_exp = 0.0;

  // solver block
  double grid_length = 1.0;
  int grid_cells = 64;
  double dt = 1e-3;
  double t_end = 0.1;
  double fp_tol = 1e-9;
  int fp_maxiter = 50;
  double cfl_max = 0.5;
  std::vector<double> k_levels;
  int snapshot_every = 0;

  // boundary block
  std::string boundary_type = "insulated";
  double robin_alpha = 0.0;
  double robin_T_ext = 1.0;

  // initial block
  std::string initial_type = "uniform";
  double T_init = 1.0;
  Vec rho_init;
  double v_init = 0.0;
  double T_amplitude = 0.0;
  Vec rho_amplitudes;
  double v_amplitude = 0.0;
  int modes = 1;

  // forces block
  bool has_forces = false;
  Vec force_b;

  // growth-checker block
  bool has_growth_spec = false;
  Rational growth_p = Rational(6);
  CoeffGrowthSpec growth_spec;

  // asymptotics block
  double asym_varrho = 1.0;
  Vec asym_qbar;
  TRange asym_range;
  std::vector<std::string> asym_quantities;

  unsigned long long seed = 0;

  MixtureModel model() const;
  Grid1D grid() const;
  StepConfig step_config() const;
  BoundarySpec boundary() const;
  SolverInputs solver_inputs() const;
  FieldState initial_state(const MixtureModel& m, const Basis& b,
                           const Grid1D& g) const;
};

/// Parses and schema-validates a configuration. Throws ValidationError with
/// the offending key and constraint on rejection.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& json_text);

} // namespace mixflow

#endif
