#include "mixflow/dual.hpp"

#include <cmath>
#include <limits>

#include "mixflow/errors.hpp"
#include "mixflow/rootfind.hpp"

namespace mixflow {

namespace detail {

void check_dual(const MixtureModel& m, const Vec& wstar) {
  if (wstar.size() != m.n() + 1) throw DomainError("dual: wstar size mismatch");
  if (!(wstar[m.n()] < 0.0))
    throw DomainError("dual: last component of wstar must be negative");
}

} // namespace detail

namespace {

constexpr double kExpGuard = 700.0;
constexpr double kPCap = 1e300;

/// log(sum_i exp(a_i(p))) and its p-derivative; a_i = M_i (w*_i - g_i/T).
struct LogSum {
  double val;
  double dval;
  double amax;
};

LogSum log_sum(const MixtureModel& m, const Vec& wstar, double T, double p) {
  const int N = m.n();
  Vec a(N), da(N);
  double amax = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < N; ++i) {
    const double Mi = m.species[i].molar_mass;
    const GibbsDerivs d = gibbs_derivs(m.species[i], m.ref, T, p);
    a[i] = Mi * (wstar[i] - d.g / T);
    da[i] = -Mi * d.gp / T;
    amax = std::max(amax, a[i]);
  }
  double s = 0.0, ds = 0.0;
  for (int i = 0; i < N; ++i) {
    const double e = std::exp(a[i] - amax);
    s += e;
    ds += e * da[i];
  }
  return {amax + std::log(s), ds / s, amax};
}

} // namespace

DualEval dual_eval(const MixtureModel& m, const Vec& wstar,
                   std::optional<double> p_hint) {
  detail::check_dual(m, wstar);
  const int N = m.n();
  const double T = -1.0 / wstar[N];

  // The residual log(sum_i x_i) is strictly decreasing in p; solve in ln p
  // (the root can sit hundreds of decades from the starting guess while the
  // scalar field Mscr is being bracketed). Bracket by accelerated geometric
  // expansion from the hint (or the reference pressure).
  auto resid_u = [&](double u) {
    const double p = std::exp(u);
    const LogSum ls = log_sum(m, wstar, T, p);
    return detail::FEval{ls.val, ls.dval * p};
  };
  const double ucap = std::log(kPCap);
  const double u0 = std::log(p_hint.value_or(m.ref.p0));
  const double amax0 = log_sum(m, wstar, T, std::exp(u0)).amax;
  double ulo = u0, uhi = u0;
  double f0 = resid_u(u0).f;
  double step = std::log(10.0);
  if (f0 > 0.0) {
    double fhi = f0;
    while (fhi > 0.0) {
      uhi += step;
      step *= 2.0;
      if (uhi > ucap) {
        if (amax0 > kExpGuard || log_sum(m, wstar, T, kPCap).amax > kExpGuard)
          throw OverflowGuardError(
              "dual_eval: exponent argument exceeds 700, state outside physical range");
        throw PressureRootAboveRange("dual_eval: no pressure root below cap "
                                     "(model lacks a p-singular species?)");
      }
      fhi = resid_u(uhi).f;
    }
  } else if (f0 < 0.0) {
    double flo = f0;
    while (flo < 0.0) {
      ulo -= step;
      step *= 2.0;
      if (ulo < -ucap)
        throw PressureRootBelowRange("dual_eval: no pressure root above zero "
                                     "(model lacks a p-singular species?)");
      flo = resid_u(ulo).f;
    }
  }
  const double p =
      (ulo == uhi) ? std::exp(u0)
                   : std::exp(detail::solve_monotone(resid_u, ulo, uhi,
                                                     0.5 * (ulo + uhi), 1e-13, 200,
                                                     "dual_eval pressure"));

  // rho_i = M_i x_i / sum_j M_j gp_j x_j and rho*u = sum rho_i H_i - p.
  Vec x(N), gp(N), H(N);
  double denom = 0.0;
  for (int i = 0; i < N; ++i) {
    const double Mi = m.species[i].molar_mass;
    const GibbsDerivs d = gibbs_derivs(m.species[i], m.ref, T, p);
    const double ai = Mi * (wstar[i] - d.g / T);
    if (ai > kExpGuard)
      throw OverflowGuardError(
          "dual_eval: exponent argument exceeds 700, state outside physical range");
    x[i] = std::exp(ai);
    gp[i] = d.gp;
    H[i] = d.g - T * d.gT;
    denom += Mi * d.gp * x[i];
  }
  DualEval out;
  out.T = T;
  out.p = p;
  out.rho = Vec(N);
  out.rhou = -p;
  for (int i = 0; i < N; ++i) {
    out.rho[i] = m.species[i].molar_mass * x[i] / denom;
    out.rhou += out.rho[i] * H[i];
  }
  return out;
}

ConservedState grad_hstar(const MixtureModel& m, const DualState& ws) {
  const DualEval e = dual_eval(m, ws.wstar);
  return ConservedState{e.rho, e.rhou};
}

double hstar_value(const MixtureModel& m, const DualState& ws) {
  const DualEval e = dual_eval(m, ws.wstar);
  double dot = e.rhou * ws.wstar[m.n()];
  for (int i = 0; i < m.n(); ++i) dot += e.rho[i] * ws.wstar[i];
  return dot - entropy_density_neg(m, e.T, e.rho);
}

double pressure_dual(const MixtureModel& m, const DualState& ws) {
  return -hstar_value(m, ws) / ws.wstar[m.n()];
}

Mat hess_hstar_at(const MixtureModel& m, double T, double p, const Vec& rho) {
  const int N = m.n();
  Vec M(N), gp(N), gpp(N), gTp(N), gTT(N), H(N);
  for (int i = 0; i < N; ++i) {
    M[i] = m.species[i].molar_mass;
    const GibbsDerivs d = gibbs_derivs(m.species[i], m.ref, T, p);
    gp[i] = d.gp;
    gpp[i] = d.gpp;
    gTp[i] = d.gTp;
    gTT[i] = d.gTT;
    H[i] = d.g - T * d.gT;
  }
  double sum_gp2M = 0.0, sum_gpp = 0.0, sum_MgpH = 0.0, sum_gTp = 0.0;
  double rhoH = 0.0, sum_MH2 = 0.0, sum_gTT = 0.0;
  for (int j = 0; j < N; ++j) {
    sum_gp2M += gp[j] * gp[j] * rho[j] * M[j];
    sum_gpp += gpp[j] * rho[j];
    sum_MgpH += M[j] * rho[j] * gp[j] * H[j];
    sum_gTp += rho[j] * gTp[j];
    rhoH += rho[j] * H[j];
    sum_MH2 += M[j] * rho[j] * H[j] * H[j];
    sum_gTT += rho[j] * gTT[j];
  }

  Mat A(N + 1, N + 1);
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k)
      A(i, k) = rho[i] * ((i == k ? M[i] : 0.0) -
                          rho[k] * (M[i] * gp[i] + M[k] * gp[k]) +
                          rho[k] * sum_gp2M - T * rho[k] * sum_gpp);
  for (int i = 0; i < N; ++i) {
    A(i, N) = rho[i] * (M[i] * H[i] - sum_MgpH) +
              rho[i] * rhoH * (-M[i] * gp[i] + sum_gp2M - T * sum_gpp) -
              T * T * rho[i] * sum_gTp;
    A(N, i) = A(i, N);
  }
  A(N, N) = sum_MH2 - 2.0 * rhoH * sum_MgpH +
            rhoH * rhoH * (sum_gp2M - T * sum_gpp) - 2.0 * rhoH * T * T * sum_gTp -
            T * T * T * sum_gTT;
  return A;
}

Mat hess_hstar(const MixtureModel& m, const DualState& ws) {
  const DualEval e = dual_eval(m, ws.wstar);
  return hess_hstar_at(m, e.T, e.p, e.rho);
}

double d2hstar_xi_xi(const MixtureModel& m, double T, double p, const Vec& rho) {
  const double varrho = rho.sum();
  double s = 0.0;
  for (int i = 0; i < m.n(); ++i) {
    const GibbsDerivs d = gibbs_derivs(m.species[i], m.ref, T, p);
    const double r = 1.0 - d.gp * varrho;
    s += m.species[i].molar_mass * rho[i] * r * r +
         T * varrho * varrho * rho[i] * std::abs(d.gpp);
  }
  return s;
}

} // namespace mixflow
