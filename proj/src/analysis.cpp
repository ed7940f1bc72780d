#include "mixflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixflow/errors.hpp"
#include "mixflow/transport.hpp"

namespace mixflow {

DominanceReport dominant_species(const MixtureModel& m) {
  const int N = m.n();
  double gmax = 0.0;
  for (const auto& s : m.species) gmax = std::max(gmax, s.gamma);
  auto key = [&](int i) {
    const auto& s = m.species[i];
    return gmax > 0.0 ? s.c0 : s.c0 - m.ref.p0 / (s.rhoR * m.ref.T0);
  };
  std::vector<int> cand;
  for (int i = 0; i < N; ++i)
    if (m.species[i].gamma == gmax) cand.push_back(i);
  std::sort(cand.begin(), cand.end(), [&](int a, int b) { return key(a) < key(b); });
  for (size_t k = 1; k < cand.size(); ++k)
    if (key(cand[k - 1]) == key(cand[k]))
      throw NoDominantSpecies(
          "dominant_species: heat-capacity ordering is not strict");
  return DominanceReport{gmax, cand.back(), true};
}

namespace {

const Rational kOne(1), kFive(5), kSix(6), kTwo(2), kThree(3);

Rational delta_of(const MixtureModel& m, int I) {
  const auto& s = m.species[I];
  if (s.variant == GibbsVariant::IdealGas) return Rational(1); // alpha=1, beta=0 limit
  const Rational a = Rational::from_double(s.alpha);
  const Rational b = Rational::from_double(s.beta);
  return a / (kOne - b);
}

} // namespace

Rational GrowthWindow::s_lo(const Rational& beta) const {
  return kTwo * beta * (kOne + gamma) - gamma;
}

Rational GrowthWindow::s_hi(const Rational& beta) const {
  const Rational g1 = kOne + gamma;
  const Rational a = Rational(6, 5) * (kOne + beta) * g1;
  const Rational b =
      Rational(6, 5) * g1 * (kOne + beta - kFive / (kThree * p)) +
      kTwo * (kOne - delta) - gamma;
  return min(a, b);
}

Rational GrowthWindow::l_bound(const Rational& beta, const Rational& s0) const {
  return s0 / kTwo + Rational(3, 5) * (kOne + beta) * (kOne + gamma) - kOne -
         gamma / kTwo;
}

Rational GrowthWindow::visc_bound(const Rational& beta) const {
  return (Rational(6, 5) * (kOne + beta) - kOne) * (kOne + gamma);
}

Rational GrowthWindow::M_bound(const Rational& beta) const {
  // The diffusivities inherit both the l-type and the viscosity-type
  // restriction; in translated exponents the two coincide.
  const Rational from_l = (Rational(6, 5) * (kOne + beta) - kOne) * (kOne + gamma);
  return min(from_l, visc_bound(beta));
}

GrowthWindow growth_window(const MixtureModel& m, const Rational& p) {
  if (!(Rational(5) < p)) throw InfeasibleWindow("growth_window: requires p > 5");
  const DominanceReport dom = dominant_species(m);
  GrowthWindow w;
  w.p = p;
  w.gamma = Rational::from_double(dom.gamma_max);
  w.delta = delta_of(m, dom.dominant_index);
  const Rational g1 = kOne + w.gamma;
  // delta < 1 + (2/5 - 1/p)(1+gamma)
  if (!(w.delta < kOne + (Rational(2, 5) - kOne / p) * g1))
    throw InfeasibleWindow("growth_window: pressure exponent too large for the "
                           "heat-capacity growth");
  w.beta_lo = max(kOne, (kFive * w.delta - kOne) / kSix);
  w.beta_hi = min(kThree + kFive * w.gamma / (kTwo * g1),
                  kThree - kFive / p + kFive / g1 * (kOne - w.delta));
  if (!(w.beta_lo < w.beta_hi))
    throw InfeasibleWindow("growth_window: empty beta interval");
  return w;
}

GrowthReport check_growth(const MixtureModel& m, const Rational& p,
                          const CoeffGrowthSpec& spec) {
  GrowthReport rep;
  try {
    rep.window = growth_window(m, p);
  } catch (const InfeasibleWindow& e) {
    rep.violated = e.what();
    return rep;
  } catch (const NoDominantSpecies& e) {
    rep.violated = e.what();
    return rep;
  }
  const GrowthWindow& w = rep.window;
  const Rational g1 = kOne + w.gamma;

  // kappa's lower exponent caps beta through s_lo(beta) <= kappa_lower.
  const Rational beta_cap = (spec.kappa_lower + w.gamma) / (kTwo * g1);
  if (beta_cap < w.beta_lo) {
    rep.violated = "kappa lower-growth exponent below the admissible window";
    return rep;
  }

  std::vector<Rational> betas;
  if (beta_cap < w.beta_hi) betas.push_back(beta_cap);
  for (int k : {16, 4, 2}) {
    const Rational cand =
        (w.beta_lo + Rational(k - 1) * min(beta_cap, w.beta_hi)) / Rational(k);
    if (w.beta_lo <= cand && cand < w.beta_hi && cand <= beta_cap)
      betas.push_back(cand);
  }
  betas.push_back(w.beta_lo);

  std::string first_violation;
  for (const Rational& beta : betas) {
    const Rational slo = w.s_lo(beta);
    const Rational shi = w.s_hi(beta);
    if (!(slo < shi)) continue;
    if (spec.kappa_lower < slo) {
      if (first_violation.empty())
        first_violation = "kappa lower-growth exponent below the admissible window";
      continue;
    }
    const Rational s0 = spec.kappa_lower < shi
                            ? spec.kappa_lower
                            : (slo + Rational(15) * shi) / Rational(16);
    Rational s1 = max(s0, spec.kappa_upper);
    std::string bad;
    if (!(s1 < shi))
      bad = "kappa upper-growth exponent exceeds the admissible window";
    else if (!(spec.l <= w.l_bound(beta, s0)))
      bad = "thermo-diffusion growth exponent exceeds its bound";
    else if (!(spec.eta < w.visc_bound(beta)) || !(spec.lambda < w.visc_bound(beta)))
      bad = "viscosity growth exponent exceeds its bound";
    else if (!(spec.M < w.M_bound(beta)))
      bad = "diffusivity growth exponent exceeds its bound";
    if (bad.empty()) {
      rep.pass = true;
      rep.beta = beta;
      rep.s0 = s0;
      rep.s1 = s1;
      return rep;
    }
    if (first_violation.empty()) first_violation = bad;
  }
  rep.violated = first_violation.empty() ? "empty exponent window" : first_violation;
  return rep;
}

double asymptotic_T_cap(const MixtureModel& m, const DominanceReport& dom) {
  if (dom.gamma_max <= 0.0) return std::numeric_limits<double>::infinity();
  const double g = dom.gamma_max;
  const double cI = m.species[dom.dominant_index].c0;
  double Mmax = 0.0;
  for (int i = 0; i < m.n(); ++i)
    if (i != dom.dominant_index) Mmax = std::max(Mmax, m.species[i].molar_mass);
  if (Mmax == 0.0) return std::numeric_limits<double>::infinity();
  // Minority densities decay like exp(-b T^g) with b ~ M_j c_I / (g (g+1) T0^g);
  // keep b T^g below ~600 so they stay representable.
  return m.ref.T0 * std::pow(600.0 * g * (g + 1.0) / (Mmax * cI), 1.0 / g);
}

namespace {

double delta_double(const MixtureModel& m, const DominanceReport& dom) {
  const auto& s = m.species[dom.dominant_index];
  if (s.variant == GibbsVariant::IdealGas) return 1.0;
  return s.alpha / (1.0 - s.beta);
}

} // namespace

namespace {

double quantity_value(const MixtureModel& m, const Basis& b, const EntropicEval& e,
                      const std::string& q) {
  if (q == "rhou") return e.rhou;
  if (q == "rhoH") return e.rhou + e.p;
  if (q == "cv") return detail::heat_capacity_at(m, e.T, e.p, e.rho);
  if (q == "pressure") return e.p;
  if (q == "Mscr") return e.Mscr;
  if (q == "d0" || q == "a0" || q == "ak") {
    OnsagerInputs oi;
    const OnsagerMatrices mats = build_onsager(oi, e.T, e.rho);
    const EnergyCoeffs ec = energy_coeffs_of(m, b, e, mats);
    if (q == "d0") return ec.d0;
    if (q == "a0") return std::abs(ec.a0);
    return ec.a.cwiseAbs().maxCoeff();
  }
  if (q.rfind("rho:", 0) == 0) {
    const int i = std::stoi(q.substr(4));
    return e.rho[i];
  }
  if (q.rfind("x:", 0) == 0) {
    const int i = std::stoi(q.substr(2));
    double n_tot = 0.0;
    for (int k = 0; k < m.n(); ++k) n_tot += e.rho[k] / m.species[k].molar_mass;
    return e.rho[i] / m.species[i].molar_mass / n_tot;
  }
  throw ValidationError("fit_asymptotics: unknown quantity '" + q + "'");
}

} // namespace

AsymptoticFit fit_asymptotics(const MixtureModel& m, const Basis& b, double varrho,
                              const Vec& qbar, const TRange& range,
                              const std::string& quantity) {
  if (range.points < 8)
    throw ValidationError("fit_asymptotics: at least 8 samples required");
  if (qbar.size() != b.N - 1)
    throw DomainError("fit_asymptotics: qbar must have N-1 components");
  const DominanceReport dom = dominant_species(m);
  const double g = dom.gamma_max;

  double hi = range.hi;
  const double cap = asymptotic_T_cap(m, dom);
  hi = std::min(hi, cap);
  const double lo = std::min(range.lo, hi / 8.0);

  const bool minority =
      quantity.rfind("rho:", 0) == 0 && std::stoi(quantity.substr(4)) != dom.dominant_index;

  std::vector<double> X(range.points), Y(range.points);
  EvalHints hints;
  Vec q(b.N);
  q.head(b.N - 1) = qbar;
  for (int k = 0; k < range.points; ++k) {
    const double T = lo * std::pow(hi / lo, double(k) / (range.points - 1));
    q[b.N - 1] = -1.0 / T;
    const EntropicEval e = evaluate(m, b, varrho, q, hints);
    hints = EvalHints{e.Mscr, e.p};
    const double val = quantity_value(m, b, e, quantity);
    if (!std::isfinite(val) || val == 0.0)
      throw FitUnreliable("fit_asymptotics: " + quantity +
                          " vanishes or is non-finite at T=" + std::to_string(T));
    if (minority)
      X[k] = g > 0.0 ? std::pow(T, g) : std::log(T);
    else
      X[k] = std::log(T);
    Y[k] = minority ? std::log(val) : std::log(std::abs(val));
  }

  // Least squares Y = slope X + c.
  const int n = range.points;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < n; ++k) {
    sx += X[k];
    sy += Y[k];
    sxx += X[k] * X[k];
    sxy += X[k] * Y[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (int k = 0; k < n; ++k) {
    const double r = Y[k] - (icept + slope * X[k]);
    ss_res += r * r;
    ss_tot += (Y[k] - ybar) * (Y[k] - ybar);
  }
  AsymptoticFit fit;
  fit.quantity = quantity;
  fit.slope = slope;
  fit.T_lo = lo;
  fit.T_hi = hi;
  // RMS of the fit residuals against the sample spread, floored at one so
  // near-constant quantities (slope ~ 0) are not flagged as nonlinear.
  fit.residual = std::sqrt(ss_res / n) / std::max(1.0, std::sqrt(ss_tot / n));

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double delta = delta_double(m, dom);
  if (quantity == "rhou" || quantity == "rhoH")
    fit.predicted = 1.0 + g;
  else if (quantity == "cv")
    fit.predicted = g;
  else if (quantity == "pressure")
    fit.predicted = delta;
  else if (quantity == "d0")
    fit.predicted = 2.0 + g;
  else if (quantity == "a0")
    fit.predicted = g + delta; // upper bound
  else if (quantity == "ak")
    fit.predicted = 1.0 + g; // upper bound
  else
    fit.predicted = nan;

  if (fit.residual > 0.5 && !minority)
    throw FitUnreliable("fit_asymptotics: " + quantity +
                        " is far from a power law over the sampled range");
  return fit;
}

} // namespace mixflow
