#ifndef MIXFLOW_ENTROPIC_HPP
#define MIXFLOW_ENTROPIC_HPP

#include <optional>

#include "mixflow/dual.hpp"
#include "mixflow/mixture.hpp"

namespace mixflow {

/// Axes xi^1..xi^{N+1} of R^{N+1} with xi^N = e^{N+1}, xi^{N+1} = (1..1,0)
/// and xi^1..xi^{N-1} an orthonormal basis of their orthogonal complement,
/// together with the dual basis eta and the projection Q_{j,l} = xi^l_j.
struct Basis {
  int N;
  Mat xi;  // (N+1) x (N+1), column l is xi^{l+1}
  Mat eta; // (N+1) x (N+1), column l is eta^{l+1}
  Mat Q;   // (N+1) x N, first N xi columns
};

/// Deterministic basis from Gram-Schmidt over (e^i - e^N, 0) in index order.
Basis build_basis(int N);

/// Parabolic-hyperbolic variables: total density varrho and the projections
/// q_l = eta^l . w*, constrained to q_N < 0.
struct EntropicState {
  double varrho;
  Vec q;
};

struct EvalHints {
  std::optional<double> Mscr;
  std::optional<double> p;
};

/// One-shot evaluation bundle at (varrho, q): the scalar field Mscr solving
/// xi^{N+1} . grad h*(Q q + Mscr xi^{N+1}) = varrho, the dual point, the
/// primal image and the h* Hessian there.
struct EntropicEval {
  double Mscr;
  Vec wstar;
  double T;
  double p;
  Vec rho;
  double rhou;
  Mat hess;    // D^2 h* at wstar
  double dxx;  // D^2 h* xi^{N+1} . xi^{N+1}
};

EntropicEval evaluate(const MixtureModel& m, const Basis& b, double varrho,
                      const Vec& q, const EvalHints& hints = {});

EntropicState to_entropic(const MixtureModel& m, const Basis& b, const ConservedState& w);

double scalar_M(const MixtureModel& m, const Basis& b, double varrho, const Vec& q,
                const EvalHints& hints = {});

struct FromEntropic {
  DualState dual;
  MixtureState mix;
  ConservedState cons;
};

FromEntropic from_entropic(const MixtureModel& m, const Basis& b,
                           const EntropicState& s);

/// R_k = xi^k . grad h*, its q-Jacobian (symmetric positive definite) and its
/// varrho-derivative.
Vec R_map(const MixtureModel& m, const Basis& b, const EntropicState& s);
Mat R_jacobian(const MixtureModel& m, const Basis& b, const EntropicState& s);
Vec R_drho(const MixtureModel& m, const Basis& b, const EntropicState& s);

/// Transformed pressure P = -h*(w*)/q_N and its analytic gradients.
double P_map(const MixtureModel& m, const Basis& b, const EntropicState& s);
struct PGrads {
  double P;
  double P_rho;
  Vec P_q;
};
PGrads P_grads(const MixtureModel& m, const Basis& b, const EntropicState& s);

/// Same accessors over a precomputed bundle (used in solver hot loops).
Vec R_map_of(const Basis& b, const EntropicEval& e);
Mat R_jacobian_of(const Basis& b, const EntropicEval& e);
Vec R_drho_of(const Basis& b, const EntropicEval& e);
double hstar_of(const MixtureModel& m, const EntropicEval& e);
PGrads P_grads_of(const MixtureModel& m, const Basis& b, const EntropicEval& e,
                  double qN);

namespace detail {
void check_entropic(const Basis& b, double varrho, const Vec& q);
} // namespace detail

} // namespace mixflow

#endif
