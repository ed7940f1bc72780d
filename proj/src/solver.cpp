#include "mixflow/solver.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "mixflow/errors.hpp"

namespace mixflow {

Grid1D Grid1D::uniform(double L, int J) {
  if (J < 8) throw ValidationError("Grid1D: at least 8 cells required");
  Grid1D g;
  g.L = L;
  g.J = J;
  g.dx = L / J;
  g.x = Vec(J);
  for (int j = 0; j < J; ++j) g.x[j] = (j + 0.5) * g.dx;
  return g;
}

struct StepWorkspace {
  std::vector<EvalHints> hints;
};

WorkspacePtr make_workspace() { return std::make_shared<StepWorkspace>(); }

namespace {

/// Block-tridiagonal solve (Thomas algorithm on NxN blocks).
/// A_j q_{j-1}... system: sub_j q_{j-1} + diag_j q_j + sup_j q_{j+1} = rhs_j.
void solve_block_tridiag(std::vector<Mat>& diag, std::vector<Mat>& sub,
                         std::vector<Mat>& sup, std::vector<Vec>& rhs,
                         std::vector<Vec>& out) {
  const int J = static_cast<int>(diag.size());
  for (int j = 1; j < J; ++j) {
    const Mat w = sub[j] * diag[j - 1].partialPivLu().inverse();
    diag[j] -= w * sup[j - 1];
    rhs[j] -= w * rhs[j - 1];
  }
  out.resize(J);
  out[J - 1] = diag[J - 1].partialPivLu().solve(rhs[J - 1]);
  for (int j = J - 2; j >= 0; --j)
    out[j] = diag[j].partialPivLu().solve(rhs[j] - sup[j] * out[j + 1]);
}

/// Scalar tridiagonal solve.
void solve_tridiag(std::vector<double>& d, std::vector<double>& l,
                   std::vector<double>& u, std::vector<double>& r,
                   std::vector<double>& out) {
  const int J = static_cast<int>(d.size());
  for (int j = 1; j < J; ++j) {
    const double w = l[j] / d[j - 1];
    d[j] -= w * u[j - 1];
    r[j] -= w * r[j - 1];
  }
  out.resize(J);
  out[J - 1] = r[J - 1] / d[J - 1];
  for (int j = J - 2; j >= 0; --j) out[j] = (r[j] - u[j] * out[j + 1]) / d[j];
}

struct CellData {
  EntropicEval e;
  Vec R;       // xi^k . grad h*
  Mat Rq;      // R jacobian
  Vec Rrho;    // dR/dvarrho
  PGrads P;
  Mat Mtilde;  // Q^T Mext Q
  double eta, lambda;
  Vec btilde;  // eta^l . (b,0), l = 1..N
  double bbar;
  Vec r_prod;  // projected reactions
};

Vec central_grad(const Mat& f, int j, int J, double dx) {
  // One-sided at the walls, central inside.
  if (j == 0) return (f.row(1) - f.row(0)).transpose() / dx;
  if (j == J - 1) return (f.row(J - 1) - f.row(J - 2)).transpose() / dx;
  return (f.row(j + 1) - f.row(j - 1)).transpose() / (2.0 * dx);
}

double central_grad(const Vec& f, int j, int J, double dx) {
  if (j == 0) return (f[1] - f[0]) / dx;
  if (j == J - 1) return (f[J - 1] - f[J - 2]) / dx;
  return (f[j + 1] - f[j - 1]) / (2.0 * dx);
}

/// Wall value of the +x-directed diffusive flux M~ (grad q + q_N btilde) for
/// the configured boundary. nu = -1 at the left wall, +1 at the right wall.
Vec wall_flux(const BoundarySpec& bc, const CellData& cd, double x, double t,
              double varrho, const Vec& q, double nu, int N) {
  switch (bc.kind) {
    case BoundarySpec::Kind::Insulated:
      return Vec::Zero(N);
    case BoundarySpec::Kind::Robin: {
      // nu . D = -Q^T (pi_G + J_G) with pi_G = -(0,..,0, r_h),
      // r_h = alpha (T_ext - T); only the energy row is loaded.
      const double T = cd.e.T;
      const double rh = bc.alpha * (bc.T_ext - T);
      Vec f = Vec::Zero(N);
      f[N - 1] = nu * rh;
      return f;
    }
    case BoundarySpec::Kind::Custom: {
      // pi_gamma = nu . grad q; D = M~ (grad q + q_N btilde).
      const Vec gq = nu * bc.pi_gamma(x, t, varrho, q);
      return cd.Mtilde * (gq + q[N - 1] * cd.btilde);
    }
  }
  return Vec::Zero(N);
}

} // namespace

FieldState init_from_primal(const MixtureModel& m, const Basis& b, const Grid1D& g,
                            const std::function<double(double)>& T0,
                            const std::function<Vec(double)>& rho0,
                            const std::function<double(double)>& v0) {
  FieldState s;
  s.varrho = Vec(g.J);
  s.q = Mat(g.J, b.N);
  s.v = Vec(g.J);
  s.t = 0.0;
  for (int j = 0; j < g.J; ++j) {
    const double T = T0(g.x[j]);
    const Vec rho = rho0(g.x[j]);
    detail::check_state(m, T, rho);
    const double rhou = internal_energy(m, T, rho);
    const EntropicState es = to_entropic(m, b, ConservedState{rho, rhou});
    s.varrho[j] = es.varrho;
    s.q.row(j) = es.q.transpose();
    s.v[j] = v0(g.x[j]);
  }
  return s;
}

std::pair<FieldState, Diagnostics> step(const MixtureModel& m, const Basis& b,
                                        const Grid1D& g, const SolverInputs& in,
                                        const BoundarySpec& bc, const FieldState& s,
                                        const StepConfig& cfg,
                                        const WorkspacePtr& ws_in) {
  const int J = g.J;
  const int N = b.N;
  const double dt = cfg.dt;
  const double dx = g.dx;
  const double tnew = s.t + dt;

  WorkspacePtr ws = ws_in ? ws_in : make_workspace();
  if (static_cast<int>(ws->hints.size()) != J) ws->hints.assign(J, EvalHints{});

  // Anchor values R(varrho^n, q^n) for the conservative time difference.
  std::vector<Vec> Rn(J);
  for (int j = 0; j < J; ++j) {
    EntropicEval e = evaluate(m, b, s.varrho[j], s.q.row(j).transpose(), ws->hints[j]);
    ws->hints[j] = EvalHints{e.Mscr, e.p};
    Rn[j] = R_map_of(b, e);
  }

  Mat qstar = s.q;
  Vec vstar = s.v;
  Vec varrho_new = s.varrho;
  Mat qnew = s.q;
  Vec vnew = s.v;
  std::vector<double> changes;
  std::vector<CellData> cells(J);
  bool converged = false;

  for (int it = 0; it < cfg.fp_maxiter; ++it) {
    // CFL guard for the explicit transport of varrho.
    const double vmax = vstar.cwiseAbs().maxCoeff();
    if (vmax * dt / dx > cfg.cfl_max)
      throw CFLViolation("step: CFL limit exceeded (max|v| dt/dx = " +
                             std::to_string(vmax * dt / dx) + ")",
                         s.t);

    // (a) Continuity: explicit first-order upwind with frozen v*.
    for (int j = 0; j < J; ++j) {
      auto face_flux = [&](int f) { // face between cells f-1 and f
        if (f == 0 || f == J) return 0.0;
        const double vf = 0.5 * (vstar[f - 1] + vstar[f]);
        return vf >= 0.0 ? vf * s.varrho[f - 1] : vf * s.varrho[f];
      };
      varrho_new[j] = s.varrho[j] - dt / dx * (face_flux(j + 1) - face_flux(j));
    }
    for (int j = 0; j < J; ++j)
      if (!(varrho_new[j] > 0.0))
        throw DomainExit("step: total mass density reached zero", tnew);

    // Coefficients frozen at (varrho^{n+1}, q*).
    for (int j = 0; j < J; ++j) {
      CellData& cd = cells[j];
      cd.e = evaluate(m, b, varrho_new[j], qstar.row(j).transpose(), ws->hints[j]);
      ws->hints[j] = EvalHints{cd.e.Mscr, cd.e.p};
      cd.R = R_map_of(b, cd.e);
      cd.Rq = R_jacobian_of(b, cd.e);
      cd.Rrho = R_drho_of(b, cd.e);
      cd.P = P_grads_of(m, b, cd.e, qstar(j, N - 1));
      const OnsagerMatrices om = build_onsager(in.onsager, cd.e.T, cd.e.rho);
      cd.Mtilde = b.Q.transpose() * om.Mext * b.Q;
      cd.eta = in.eta(cd.e.T, cd.e.rho);
      cd.lambda = in.lambda(cd.e.T, cd.e.rho);
      if (in.forces) {
        const Vec bf = in.forces(g.x[j], tnew);
        Vec bext = Vec::Zero(N + 1);
        bext.head(N) = bf;
        cd.btilde = b.eta.leftCols(N).transpose() * bext;
        cd.bbar = b.eta.col(N).dot(bext);
      } else {
        cd.btilde = Vec::Zero(N);
        cd.bbar = 0.0;
      }
      if (in.reactions) {
        Vec r = in.reactions(cd.e.T, cd.e.rho);
        r.array() -= r.mean(); // enforce zero total mass production
        cd.r_prod = r;
      } else {
        cd.r_prod = Vec::Zero(N);
      }
    }

    // (b) Linearized implicit-Euler solve for q in conservative form.
    std::vector<Mat> diag(J), sub(J, Mat::Zero(N, N)), sup(J, Mat::Zero(N, N));
    std::vector<Vec> rhs(J);
    for (int j = 0; j < J; ++j) {
      const CellData& cd = cells[j];
      Mat A = cd.Rq / dt;
      Vec r = (cd.Rq * qstar.row(j).transpose() - cd.R + Rn[j]) / dt;

      // Production Q^T pi: reactions, viscous/pressure work and J : b.
      const double vx = central_grad(vstar, j, J, dx);
      const Vec qx = central_grad(qstar, j, J, dx);
      const double stress = (2.0 * cd.eta + cd.lambda) * vx;
      double prod_energy = (-cd.P.P + stress) * vx;
      prod_energy -= (cd.Mtilde * (qx + qstar(j, N - 1) * cd.btilde)).dot(cd.btilde);
      for (int k = 0; k < N; ++k) {
        r[k] += b.xi.col(k).head(N).dot(cd.r_prod);
        r[k] += b.xi(N, k) * prod_energy;
      }

      // Advective flux of R, upwinded on faces (zero at the no-slip walls).
      auto adv_flux = [&](int f) {
        if (f == 0 || f == J) return Vec::Zero(N).eval();
        const double vf = 0.5 * (vstar[f - 1] + vstar[f]);
        return (vf >= 0.0 ? (vf * cells[f - 1].R).eval() : (vf * cells[f].R).eval());
      };
      r -= (adv_flux(j + 1) - adv_flux(j)) / dx;

      // Diffusive fluxes: grad q implicit, the q_N btilde part lagged.
      if (j > 0) {
        const Mat Mf = 0.5 * (cells[j - 1].Mtilde + cd.Mtilde);
        A += Mf / (dx * dx);
        sub[j] = -Mf / (dx * dx);
        const Vec btf = 0.5 * (cells[j - 1].btilde + cd.btilde);
        const double qNf = 0.5 * (qstar(j - 1, N - 1) + qstar(j, N - 1));
        r -= Mf * (qNf * btf) / dx;
      } else {
        const Vec W = wall_flux(bc, cd, 0.0, tnew, varrho_new[j],
                                qstar.row(j).transpose(), -1.0, N);
        r -= W / dx;
      }
      if (j < J - 1) {
        const Mat Mf = 0.5 * (cd.Mtilde + cells[j + 1].Mtilde);
        A += Mf / (dx * dx);
        sup[j] = -Mf / (dx * dx);
        const Vec btf = 0.5 * (cd.btilde + cells[j + 1].btilde);
        const double qNf = 0.5 * (qstar(j, N - 1) + qstar(j + 1, N - 1));
        r += Mf * (qNf * btf) / dx;
      } else {
        const Vec W = wall_flux(bc, cd, g.L, tnew, varrho_new[j],
                                qstar.row(j).transpose(), 1.0, N);
        r += W / dx;
      }
      diag[j] = A;
      rhs[j] = r;
    }
    std::vector<Vec> qsol;
    solve_block_tridiag(diag, sub, sup, rhs, qsol);
    for (int j = 0; j < J; ++j) {
      qnew.row(j) = qsol[j].transpose();
      if (!(qnew(j, N - 1) < 0.0))
        throw DomainExit("step: q_N >= 0 (temperature left the half-space)", tnew);
    }

    // (c) Implicit velocity solve with no-slip walls.
    {
      std::vector<double> d(J), l(J, 0.0), u(J, 0.0), r(J);
      for (int j = 0; j < J; ++j) {
        const CellData& cd = cells[j];
        const double rho_x = central_grad(varrho_new, j, J, dx);
        const Vec qx = central_grad(qstar, j, J, dx);
        const double vx = central_grad(vstar, j, J, dx);
        double f = -cd.P.P_rho * rho_x - cd.P.P_q.dot(qx) -
                   varrho_new[j] * vstar[j] * vx + cd.R.dot(cd.btilde) +
                   varrho_new[j] * cd.bbar;
        d[j] = varrho_new[j] / dt;
        r[j] = varrho_new[j] / dt * s.v[j] + f;
        auto mu_at = [&](int k) { return 2.0 * cells[k].eta + cells[k].lambda; };
        if (j > 0) {
          const double mf = 0.5 * (mu_at(j - 1) + mu_at(j));
          d[j] += mf / (dx * dx);
          l[j] = -mf / (dx * dx);
        } else {
          d[j] += mu_at(0) / (dx * 0.5 * dx); // wall value v = 0
        }
        if (j < J - 1) {
          const double mf = 0.5 * (mu_at(j) + mu_at(j + 1));
          d[j] += mf / (dx * dx);
          u[j] = -mf / (dx * dx);
        } else {
          d[j] += mu_at(J - 1) / (dx * 0.5 * dx);
        }
      }
      std::vector<double> vsol;
      solve_tridiag(d, l, u, r, vsol);
      for (int j = 0; j < J; ++j) vnew[j] = vsol[j];
    }

    const double qscale = std::max(1.0, qstar.cwiseAbs().maxCoeff());
    const double vscale = std::max(1.0, vstar.cwiseAbs().maxCoeff());
    const double change = std::max((qnew - qstar).cwiseAbs().maxCoeff() / qscale,
                                   (vnew - vstar).cwiseAbs().maxCoeff() / vscale);
    changes.push_back(change);
    qstar = qnew;
    vstar = vnew;
    if (change <= cfg.fp_tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw FixedPointDiverged("step: fixed point not converged in " +
                                 std::to_string(cfg.fp_maxiter) + " iterations",
                             tnew);

  FieldState out;
  out.varrho = varrho_new;
  out.q = qnew;
  out.v = vnew;
  out.t = tnew;

  Diagnostics diag_out;
  diag_out.t = tnew;
  diag_out.species_mass = Vec::Zero(N);
  diag_out.energy = 0.0;
  diag_out.entropy = 0.0;
  diag_out.sup_qN = -std::numeric_limits<double>::infinity();
  diag_out.min_varrho = std::numeric_limits<double>::infinity();
  diag_out.max_T = 0.0;
  diag_out.truncation.assign(cfg.k_levels.size(), 0.0);
  for (int j = 0; j < J; ++j) {
    EntropicEval e = evaluate(m, b, varrho_new[j], qnew.row(j).transpose(), ws->hints[j]);
    ws->hints[j] = EvalHints{e.Mscr, e.p};
    diag_out.species_mass += e.rho * dx;
    diag_out.energy += (e.rhou + 0.5 * varrho_new[j] * vnew[j] * vnew[j]) * dx;
    diag_out.entropy -= detail::entropy_density_neg_at(m, e.T, e.p, e.rho) * dx;
    diag_out.sup_qN = std::max(diag_out.sup_qN, qnew(j, N - 1));
    diag_out.min_varrho = std::min(diag_out.min_varrho, varrho_new[j]);
    diag_out.max_T = std::max(diag_out.max_T, e.T);
    for (size_t k = 0; k < cfg.k_levels.size(); ++k) {
      const double ex = std::max(e.rhou - cfg.k_levels[k], 0.0);
      diag_out.truncation[k] += varrho_new[j] * ex * ex * dx;
    }
  }
  diag_out.fp_iters = static_cast<int>(changes.size());
  diag_out.fp_changes = changes;
  return {out, diag_out};
}

RunResult run(const MixtureModel& m, const Basis& b, const Grid1D& g,
              const SolverInputs& in, const BoundarySpec& bc, const FieldState& s0,
              const StepConfig& cfg, double t_end, int snapshot_every) {
  RunResult res;
  FieldState s = s0;
  WorkspacePtr ws = make_workspace();
  res.snapshots.push_back(s);
  int n = 0;
  while (s.t < t_end - 0.5 * cfg.dt) {
    auto [snew, d] = step(m, b, g, in, bc, s, cfg, ws);
    s = snew;
    ++n;
    res.diagnostics.push_back(std::move(d));
    if (snapshot_every > 0 && n % snapshot_every == 0) res.snapshots.push_back(s);
  }
  if (res.snapshots.back().t != s.t) res.snapshots.push_back(s);
  return res;
}

std::vector<double> diagnostics_truncation(const FieldState& s, const MixtureModel& m,
                                           const Basis& b, const Grid1D& g,
                                           const std::vector<double>& k_levels) {
  std::vector<double> E(k_levels.size(), 0.0);
  for (int j = 0; j < g.J; ++j) {
    const EntropicEval e = evaluate(m, b, s.varrho[j], s.q.row(j).transpose());
    for (size_t k = 0; k < k_levels.size(); ++k) {
      const double ex = std::max(e.rhou - k_levels[k], 0.0);
      E[k] += s.varrho[j] * ex * ex * g.dx;
    }
  }
  return E;
}

} // namespace mixflow
