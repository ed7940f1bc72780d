#include "mixflow/entropic.hpp"

#include <cmath>

#include "mixflow/errors.hpp"
#include "mixflow/rootfind.hpp"

namespace mixflow {

namespace detail {

void check_entropic(const Basis& b, double varrho, const Vec& q) {
  if (q.size() != b.N) throw DomainError("entropic: q size mismatch");
  if (!(varrho > 0.0)) throw DomainError("entropic: varrho must be positive");
  if (!(q[b.N - 1] < 0.0)) throw DomainError("entropic: q_N must be negative");
}

} // namespace detail

Basis build_basis(int N) {
  if (N < 2) throw ValidationError("build_basis: N must be at least 2");
  Basis b;
  b.N = N;
  b.xi = Mat::Zero(N + 1, N + 1);
  // Gram-Schmidt over (e^i - e^N, 0), i = 1..N-1, in index order.
  for (int l = 0; l < N - 1; ++l) {
    Vec v = Vec::Zero(N + 1);
    v[l] = 1.0;
    v[N - 1] = -1.0;
    for (int k = 0; k < l; ++k) v -= v.dot(b.xi.col(k)) * b.xi.col(k);
    b.xi.col(l) = v / v.norm();
  }
  b.xi(N, N - 1) = 1.0;                       // xi^N = e^{N+1}
  b.xi.col(N).head(N) = Vec::Ones(N);         // xi^{N+1} = (1..1, 0)
  // Dual basis: eta^k = xi^k (k < N), eta^N = e^{N+1}, eta^{N+1} = xi^{N+1}/N.
  b.eta = Mat::Zero(N + 1, N + 1);
  b.eta.leftCols(N - 1) = b.xi.leftCols(N - 1);
  b.eta(N, N - 1) = 1.0;
  b.eta.col(N) = b.xi.col(N) / double(N);
  b.Q = b.xi.leftCols(N);
  return b;
}

EntropicState to_entropic(const MixtureModel& m, const Basis& b,
                          const ConservedState& w) {
  if (b.N != m.n()) throw DomainError("to_entropic: basis size mismatch");
  const Vec ws = grad_h(m, w);
  EntropicState s;
  s.varrho = w.rho.sum();
  s.q = b.eta.leftCols(b.N).transpose() * ws;
  return s;
}

EntropicEval evaluate(const MixtureModel& m, const Basis& b, double varrho,
                      const Vec& q, const EvalHints& hints) {
  detail::check_entropic(b, varrho, q);
  if (b.N != m.n()) throw DomainError("entropic: basis size mismatch");
  const int N = b.N;
  const double T = -1.0 / q[N - 1];
  const Vec base = b.Q * q;

  std::optional<double> p_hint = hints.p;
  auto eval_at = [&](double Mscr) {
    Vec ws = base;
    ws.head(N).array() += Mscr;
    DualEval de = dual_eval(m, ws, p_hint);
    p_hint = de.p;
    return de;
  };

  double M0;
  if (hints.Mscr) {
    M0 = *hints.Mscr;
  } else {
    // The converged field satisfies base_i + Mscr <= g_i/T for every i with
    // near-equality at the controlling species; anchoring at the uniform-state
    // pressure keeps the start within O(ln N) of the root even when the
    // species free energies are decades apart.
    Vec rho_u = Vec::Constant(N, varrho / N);
    const double pu = pressure(m, T, rho_u);
    M0 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < N; ++i)
      M0 = std::min(M0, gibbs(m.species[i], m.ref, T, pu) / T - base[i]);
  }

  const double tol = 1e-11 * std::max(1.0, varrho);
  // Out-of-range pressure roots during bracket overshoot correspond to the
  // limits sum(rho) -> 0 (Mscr far too negative) and -> infinity.
  auto resid = [&](double Mscr) {
    try {
      const DualEval de = eval_at(Mscr);
      return detail::FEval{de.rho.sum() - varrho,
                           d2hstar_xi_xi(m, de.T, de.p, de.rho)};
    } catch (const PressureRootBelowRange&) {
      return detail::FEval{-varrho, std::numeric_limits<double>::quiet_NaN()};
    } catch (const PressureRootAboveRange&) {
      return detail::FEval{1e30 * std::max(1.0, varrho),
                           std::numeric_limits<double>::quiet_NaN()};
    }
  };

  // The residual is strictly increasing in Mscr; expand a sign bracket.
  double lo = M0, hi = M0;
  double f0 = resid(M0).f;
  double step = std::max(1.0, 0.25 * std::abs(M0));
  int guard = 0;
  if (f0 > tol) {
    double flo = f0;
    while (flo > 0.0) {
      lo -= step;
      step *= 2.0;
      flo = resid(lo).f;
      if (++guard > 200) throw ConvergenceError("scalar_M: lower bracket not found");
    }
  } else if (f0 < -tol) {
    double fhi = f0;
    while (fhi < 0.0) {
      hi += step;
      step *= 2.0;
      fhi = resid(hi).f;
      if (++guard > 200) throw ConvergenceError("scalar_M: upper bracket not found");
    }
  }
  const double Mscr =
      (lo == hi) ? M0
                 : detail::solve_monotone(resid, lo, hi, 0.5 * (lo + hi), tol, 200,
                                          "scalar_M");

  EntropicEval e;
  e.Mscr = Mscr;
  e.wstar = base;
  e.wstar.head(N).array() += Mscr;
  const DualEval de = eval_at(Mscr);
  e.T = de.T;
  e.p = de.p;
  e.rho = de.rho;
  e.rhou = de.rhou;
  e.hess = hess_hstar_at(m, de.T, de.p, de.rho);
  e.dxx = b.xi.col(N).dot(e.hess * b.xi.col(N));
  return e;
}

double scalar_M(const MixtureModel& m, const Basis& b, double varrho, const Vec& q,
                const EvalHints& hints) {
  return evaluate(m, b, varrho, q, hints).Mscr;
}

FromEntropic from_entropic(const MixtureModel& m, const Basis& b,
                           const EntropicState& s) {
  const EntropicEval e = evaluate(m, b, s.varrho, s.q);
  FromEntropic out;
  out.dual = DualState{e.wstar};
  out.mix = MixtureState{e.T, e.rho};
  out.cons = ConservedState{e.rho, e.rhou};
  return out;
}

Vec R_map_of(const Basis& b, const EntropicEval& e) {
  Vec w(b.N + 1);
  w.head(b.N) = e.rho;
  w[b.N] = e.rhou;
  return b.Q.transpose() * w;
}

Mat R_jacobian_of(const Basis& b, const EntropicEval& e) {
  const Mat B = b.Q.transpose() * e.hess * b.Q;
  const Vec u = b.Q.transpose() * (e.hess * b.xi.col(b.N));
  return B - (u * u.transpose()) / e.dxx;
}

Vec R_drho_of(const Basis& b, const EntropicEval& e) {
  return b.Q.transpose() * (e.hess * b.xi.col(b.N)) / e.dxx;
}

double hstar_of(const MixtureModel& m, const EntropicEval& e) {
  double dot = e.wstar[m.n()] * e.rhou;
  for (int i = 0; i < m.n(); ++i) dot += e.wstar[i] * e.rho[i];
  return dot - detail::entropy_density_neg_at(m, e.T, e.p, e.rho);
}

PGrads P_grads_of(const MixtureModel& m, const Basis& b, const EntropicEval& e,
                  double qN) {
  const int N = b.N;
  const double hs = hstar_of(m, e);
  PGrads g;
  g.P = -hs / qN;
  const double varrho = e.rho.sum();
  const double dM_drho = 1.0 / e.dxx;
  g.P_rho = -varrho * dM_drho / qN;
  const Vec R = R_map_of(b, e);
  const Vec u = b.Q.transpose() * (e.hess * b.xi.col(N)); // d(dual grad) projections
  g.P_q = Vec(N);
  for (int k = 0; k < N; ++k) {
    const double dM_dqk = -u[k] / e.dxx;
    g.P_q[k] = -(R[k] + varrho * dM_dqk) / qN;
  }
  g.P_q[N - 1] -= g.P / qN; // prefactor -1/q_N also depends on q_N
  return g;
}

Vec R_map(const MixtureModel& m, const Basis& b, const EntropicState& s) {
  return R_map_of(b, evaluate(m, b, s.varrho, s.q));
}

Mat R_jacobian(const MixtureModel& m, const Basis& b, const EntropicState& s) {
  return R_jacobian_of(b, evaluate(m, b, s.varrho, s.q));
}

Vec R_drho(const MixtureModel& m, const Basis& b, const EntropicState& s) {
  return R_drho_of(b, evaluate(m, b, s.varrho, s.q));
}

double P_map(const MixtureModel& m, const Basis& b, const EntropicState& s) {
  const EntropicEval e = evaluate(m, b, s.varrho, s.q);
  return -hstar_of(m, e) / s.q[b.N - 1];
}

PGrads P_grads(const MixtureModel& m, const Basis& b, const EntropicState& s) {
  const EntropicEval e = evaluate(m, b, s.varrho, s.q);
  return P_grads_of(m, b, e, s.q[b.N - 1]);
}

} // namespace mixflow
