#include "mixflow/transport.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "mixflow/errors.hpp"

namespace mixflow {

Mat default_M(double T, const Vec& rho, double d) {
  (void)T;
  if (!(d > 0.0)) throw ValidationError("default_M: mobility must be positive");
  const double varrho = rho.sum();
  return d * (Mat(rho.asDiagonal()) - rho * rho.transpose() / varrho);
}

OnsagerMatrices build_onsager(const OnsagerInputs& in, double T, const Vec& rho) {
  const int N = static_cast<int>(rho.size());
  OnsagerMatrices out;
  if (in.user_M) {
    out.M = in.user_M(T, rho);
    if (out.M.rows() != N || out.M.cols() != N)
      throw ValidationError("build_onsager: user M has wrong shape");
    if ((out.M - out.M.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * std::max(1.0, out.M.cwiseAbs().maxCoeff()))
      throw ValidationError("build_onsager: user M must be symmetric");
    const double scale = std::max(1.0, out.M.cwiseAbs().maxCoeff());
    if ((out.M * Vec::Ones(N)).cwiseAbs().maxCoeff() > 1e-10 * scale)
      throw ValidationError("build_onsager: user M must have kernel 1^N");
    Eigen::SelfAdjointEigenSolver<Mat> es(out.M);
    if (es.eigenvalues().minCoeff() < -1e-10 * scale)
      throw ValidationError("build_onsager: user M must be positive semi-definite");
  } else {
    out.M = default_M(T, rho, in.mobility(T, rho));
  }
  const Vec lt = in.ltilde(T, rho);
  if (lt.size() != N) throw ValidationError("build_onsager: ltilde has wrong size");
  const double kt = in.kappatilde(T, rho);
  if (!(kt > 0.0)) throw ValidationError("build_onsager: kappatilde must be positive");
  out.l = -out.M * lt;
  out.kappa = kt + lt.dot(out.M * lt);
  out.Mext = Mat(N + 1, N + 1);
  out.Mext.topLeftCorner(N, N) = out.M;
  out.Mext.topRightCorner(N, 1) = out.l;
  out.Mext.bottomLeftCorner(1, N) = out.l.transpose();
  out.Mext(N, N) = out.kappa;
  return out;
}

std::pair<Mat, Eigen::RowVectorXd> fluxes_primal(const OnsagerMatrices& mats,
                                                 const Mat& wstar_grad, const Mat& b,
                                                 double T) {
  const int N = static_cast<int>(mats.M.rows());
  if (wstar_grad.rows() != N + 1)
    throw DomainError("fluxes_primal: gradient must have N+1 rows");
  if (b.rows() != N || b.cols() != wstar_grad.cols())
    throw DomainError("fluxes_primal: force shape mismatch");
  Mat drive = wstar_grad;
  drive.topRows(N) -= b / T;
  const Mat full = -mats.Mext * drive;
  return {full.topRows(N), full.row(N)};
}

Mat fluxes_entropic(const Basis& basis, const OnsagerMatrices& mats, const Mat& q_grad,
                    double qN, const Mat& btilde) {
  if (!(qN < 0.0)) throw DomainError("fluxes_entropic: q_N must be negative");
  return -mats.Mext * (basis.Q * (q_grad + qN * btilde));
}

EnergyCoeffs energy_coeffs_of(const MixtureModel& m, const Basis& basis,
                              const EntropicEval& e, const OnsagerMatrices& mats) {
  const int N = basis.N;
  EnergyCoeffs out;
  const Vec col = e.hess.col(N);              // D^2_{w*, w*_{N+1}} h*
  const Vec hx = e.hess * basis.xi.col(N);    // D^2 h* xi^{N+1}
  const double dxx = e.dxx;
  const double cx = col.dot(basis.xi.col(N)); // col . xi^{N+1}
  out.a0 = cx / dxx;
  out.a = Vec(N - 1);
  for (int k = 0; k < N - 1; ++k)
    out.a[k] = col.dot(basis.xi.col(k)) - cx * hx.dot(basis.xi.col(k)) / dxx;
  out.d0 = e.hess(N, N) - cx * cx / dxx;

  // Primal-route identity: d0 = T^2 varrho c_v + T^4 (A* u.u - (A* u.1)^2 / A* 1.1)
  // with A* the upper-left block and u_i = H_i/T^2 - gp_i dpdT / T.
  const double T = e.T;
  const double varrho = e.rho.sum();
  const double cv = detail::heat_capacity_at(m, T, e.p, e.rho);
  double sTp = 0.0, spp = 0.0;
  Vec u(N);
  for (int i = 0; i < N; ++i) {
    const GibbsDerivs d = gibbs_derivs(m.species[i], m.ref, T, e.p);
    sTp += e.rho[i] * d.gTp;
    spp += e.rho[i] * d.gpp;
  }
  const double dpdT = -sTp / spp;
  for (int i = 0; i < N; ++i) {
    const GibbsDerivs d = gibbs_derivs(m.species[i], m.ref, T, e.p);
    u[i] = (d.g - T * d.gT) / (T * T) - d.gp * dpdT / T;
  }
  const Mat A = e.hess.topLeftCorner(N, N);
  const Vec ones = Vec::Ones(N);
  const double Auu = u.dot(A * u);
  const double Au1 = ones.dot(A * u);
  const double A11 = ones.dot(A * ones);
  out.d0_alt = T * T * varrho * cv + T * T * T * T * (Auu - Au1 * Au1 / A11);

  out.L = Vec(N - 1);
  Vec lext = Vec::Zero(N + 1);
  lext.head(N) = mats.l;
  for (int k = 0; k < N - 1; ++k) out.L[k] = basis.xi.col(k).dot(lext);
  return out;
}

EnergyCoeffs energy_coeffs(const MixtureModel& m, const Basis& basis,
                           const DualState& ws, const OnsagerMatrices& mats) {
  detail::check_dual(m, ws.wstar);
  const DualEval de = dual_eval(m, ws.wstar);
  EntropicEval e;
  e.Mscr = 0.0;
  e.wstar = ws.wstar;
  e.T = de.T;
  e.p = de.p;
  e.rho = de.rho;
  e.rhou = de.rhou;
  e.hess = hess_hstar_at(m, de.T, de.p, de.rho);
  e.dxx = basis.xi.col(basis.N).dot(e.hess * basis.xi.col(basis.N));
  return energy_coeffs_of(m, basis, e, mats);
}

} // namespace mixflow
