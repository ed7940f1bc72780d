#ifndef MIXFLOW_SOLVER_HPP
#define MIXFLOW_SOLVER_HPP

#include <functional>
#include <memory>
#include <vector>

#include "mixflow/entropic.hpp"
#include "mixflow/transport.hpp"

namespace mixflow {

struct Grid1D {
  double L;
  int J;
  double dx;
  Vec x; // cell centers

  static Grid1D uniform(double L, int J);
};

/// Cell-centered fields of the transformed system: total density (hyperbolic),
/// entropic projections q (parabolic, column N strictly negative) and velocity.
struct FieldState {
  Vec varrho; // J
  Mat q;      // J x N
  Vec v;      // J
  double t = 0.0;
};

/// Boundary data. Velocity is no-slip at both walls. The q-system carries
/// Neumann data; insulated walls prescribe zero flux, Robin walls the cooling
/// law r_h = alpha (T_ext - T) on the energy row. A custom hook supplies the
/// normal derivative pi_gamma = nu . grad q directly.
struct BoundarySpec {
  enum class Kind { Insulated, Robin, Custom };
  Kind kind = Kind::Insulated;
  double alpha = 0.0;
  double T_ext = 1.0;
  // x, t, varrho, q at the wall cell -> nu . grad q
  std::function<Vec(double, double, double, const Vec&)> pi_gamma;

  static BoundarySpec insulated() { return {}; }
  static BoundarySpec robin(double alpha, double T_ext) {
    BoundarySpec b;
    b.kind = Kind::Robin;
    b.alpha = alpha;
    b.T_ext = T_ext;
    return b;
  }
};

struct StepConfig {
  double dt = 1e-3;
  double fp_tol = 1e-9;
  int fp_maxiter = 50;
  double cfl_max = 0.5;
  std::vector<double> k_levels;
};

/// Physics hooks beyond the mixture model: Onsager inputs, viscosities,
/// reactions (projected onto the zero-sum subspace) and per-species forces.
struct SolverInputs {
  OnsagerInputs onsager;
  std::function<double(double, const Vec&)> eta = [](double, const Vec&) {
    return 0.0;
  };
  std::function<double(double, const Vec&)> lambda = [](double, const Vec&) {
    return 0.0;
  };
  std::function<Vec(double, const Vec&)> reactions; // optional, r(T, rho)
  std::function<Vec(double, double)> forces;        // optional, b(x, t) per species
};

struct Diagnostics {
  double t;
  Vec species_mass;          // integral of each rho_i
  double energy;             // integral of rho*u + varrho v^2/2
  double entropy;            // integral of rho*s
  double sup_qN;
  double min_varrho;
  double max_T;
  std::vector<double> truncation; // E_k per configured level
  int fp_iters;
  std::vector<double> fp_changes;
};

/// Warm-start caches reused across steps of one simulation.
struct StepWorkspace;
using WorkspacePtr = std::shared_ptr<StepWorkspace>;
WorkspacePtr make_workspace();

FieldState init_from_primal(const MixtureModel& m, const Basis& b, const Grid1D& g,
                            const std::function<double(double)>& T0,
                            const std::function<Vec(double)>& rho0,
                            const std::function<double(double)>& v0);

std::pair<FieldState, Diagnostics> step(const MixtureModel& m, const Basis& b,
                                        const Grid1D& g, const SolverInputs& in,
                                        const BoundarySpec& bc, const FieldState& s,
                                        const StepConfig& cfg,
                                        const WorkspacePtr& ws = nullptr);

struct RunResult {
  std::vector<Diagnostics> diagnostics;
  std::vector<FieldState> snapshots;
};

RunResult run(const MixtureModel& m, const Basis& b, const Grid1D& g,
              const SolverInputs& in, const BoundarySpec& bc, const FieldState& s0,
              const StepConfig& cfg, double t_end, int snapshot_every = 0);

/// E_k = sum_j varrho_j ((eps_j - k)_+)^2 dx for each level k.
std::vector<double> diagnostics_truncation(const FieldState& s, const MixtureModel& m,
                                           const Basis& b, const Grid1D& g,
                                           const std::vector<double>& k_levels);

} // namespace mixflow

#endif
