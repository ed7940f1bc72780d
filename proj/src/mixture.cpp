#include "mixflow/mixture.hpp"

#include <cmath>
#include <limits>

#include "mixflow/errors.hpp"
#include "mixflow/rootfind.hpp"

namespace mixflow {

namespace detail {

void check_state(const MixtureModel& m, double T, const Vec& rho) {
  if (rho.size() != m.n()) throw DomainError("mixture: rho size mismatch");
  if (!(T > 0.0)) throw DomainError("mixture: temperature must be positive");
  for (int i = 0; i < rho.size(); ++i)
    if (!(rho[i] > 0.0))
      throw DomainError("mixture: partial mass densities must be positive");
}

void check_conserved(const MixtureModel& m, const ConservedState& w) {
  if (w.rho.size() != m.n()) throw DomainError("mixture: rho size mismatch");
  double emin = 0.0;
  for (int i = 0; i < m.n(); ++i) {
    if (!(w.rho[i] > 0.0))
      throw DomainError("mixture: partial mass densities must be positive");
    emin += m.species[i].g0 * w.rho[i];
  }
  if (!(w.rhou > emin))
    throw DomainError("mixture: internal energy below the admissible cone");
}

double internal_energy_at(const MixtureModel& m, double T, double p, const Vec& rho) {
  double e = -p;
  for (int i = 0; i < m.n(); ++i) e += rho[i] * enthalpy(m.species[i], m.ref, T, p);
  return e;
}

double entropy_density_neg_at(const MixtureModel& m, double T, double p,
                              const Vec& rho) {
  double h = 0.0;
  double n_tot = 0.0;
  for (int i = 0; i < m.n(); ++i) n_tot += rho[i] / m.species[i].molar_mass;
  for (int i = 0; i < m.n(); ++i) {
    const double ni = rho[i] / m.species[i].molar_mass;
    h += rho[i] * gibbs_derivs(m.species[i], m.ref, T, p).gT + ni * std::log(ni / n_tot);
  }
  return h;
}

double heat_capacity_at(const MixtureModel& m, double T, double p, const Vec& rho) {
  double sTT = 0.0, sTp = 0.0, spp = 0.0;
  for (int i = 0; i < m.n(); ++i) {
    const GibbsDerivs d = gibbs_derivs(m.species[i], m.ref, T, p);
    sTT += rho[i] * d.gTT;
    sTp += rho[i] * d.gTp;
    spp += rho[i] * d.gpp;
  }
  return -T / rho.sum() * (sTT - sTp * sTp / spp);
}

} // namespace detail

namespace {

constexpr double kPressureTol = 1e-12;
constexpr int kMaxIter = 200;

/// Mole fractions of (T,rho); the logarithm arguments are strictly positive
/// on the checked domain.
Vec mole_fractions(const MixtureModel& m, const Vec& rho) {
  Vec x(m.n());
  double n_tot = 0.0;
  for (int i = 0; i < m.n(); ++i) {
    x[i] = rho[i] / m.species[i].molar_mass;
    n_tot += x[i];
  }
  return x / n_tot;
}

double mixing_entropy(const MixtureModel& m, const Vec& rho) {
  const Vec x = mole_fractions(m, rho);
  double s = 0.0;
  for (int i = 0; i < m.n(); ++i)
    s += rho[i] / m.species[i].molar_mass * std::log(x[i]);
  return s;
}

/// Single-species root of dg/dp(T, p) = 1/varrho in closed form.
double species_pressure_root(const SpeciesParams& s, const ReferenceState& ref, double T,
                             double varrho) {
  const double tr = T / ref.T0;
  if (s.variant == GibbsVariant::IdealGas) return ref.p0 * varrho / s.rhoR * tr;
  return ref.p0 * std::pow(varrho / s.rhoR, 1.0 / (1.0 - s.beta)) *
         std::pow(tr, s.alpha / (1.0 - s.beta));
}

} // namespace

MixtureModel make_mixture(std::vector<SpeciesParams> species, ReferenceState ref) {
  if (species.empty()) throw ValidationError("mixture: needs at least one species");
  for (const auto& s : species) {
    const ValidationReport rep = validate_species(s, ref);
    if (!rep.ok())
      throw ValidationError("mixture: species '" + s.name +
                            "' invalid: " + rep.violations.front());
  }
  return MixtureModel{std::move(species), ref};
}

std::pair<double, double> p_bounds(const MixtureModel& m, double T, double total_rho) {
  if (!(T > 0.0) || !(total_rho > 0.0))
    throw DomainError("p_bounds: T and varrho must be positive");
  double pmin = std::numeric_limits<double>::infinity();
  double pmax = 0.0;
  for (const auto& s : m.species) {
    const double pi = species_pressure_root(s, m.ref, T, total_rho);
    pmin = std::min(pmin, pi);
    pmax = std::max(pmax, pi);
  }
  return {pmin, pmax};
}

double pressure(const MixtureModel& m, double T, const Vec& rho,
                std::optional<double> hint) {
  detail::check_state(m, T, rho);
  auto [lo, hi] = p_bounds(m, T, rho.sum());
  if (hi <= lo * (1.0 + 1e-15)) return lo;
  auto resid = [&](double p) {
    detail::FEval e{};
    double f = -1.0, df = 0.0;
    for (int i = 0; i < m.n(); ++i) {
      const GibbsDerivs d = gibbs_derivs(m.species[i], m.ref, T, p);
      f += rho[i] * d.gp;
      df += rho[i] * d.gpp;
    }
    e.f = f;
    e.df = df;
    return e;
  };
  const double x0 = hint ? std::min(std::max(*hint, lo), hi) : std::sqrt(lo * hi);
  return detail::solve_monotone(resid, lo, hi, x0, kPressureTol, kMaxIter,
                                "mixture pressure");
}

double free_energy(const MixtureModel& m, double T, const Vec& rho) {
  const double p = pressure(m, T, rho);
  double f = -p;
  for (int i = 0; i < m.n(); ++i) f += rho[i] * gibbs(m.species[i], m.ref, T, p);
  return f + T * mixing_entropy(m, rho);
}

double internal_energy(const MixtureModel& m, double T, const Vec& rho) {
  const double p = pressure(m, T, rho);
  double e = -p;
  for (int i = 0; i < m.n(); ++i) e += rho[i] * enthalpy(m.species[i], m.ref, T, p);
  return e;
}

double entropy_density_neg(const MixtureModel& m, double T, const Vec& rho) {
  const double p = pressure(m, T, rho);
  double h = mixing_entropy(m, rho);
  for (int i = 0; i < m.n(); ++i)
    h += rho[i] * gibbs_derivs(m.species[i], m.ref, T, p).gT;
  return h;
}

double heat_capacity(const MixtureModel& m, double T, const Vec& rho) {
  const double p = pressure(m, T, rho);
  double sTT = 0.0, sTp = 0.0, spp = 0.0;
  for (int i = 0; i < m.n(); ++i) {
    const GibbsDerivs d = gibbs_derivs(m.species[i], m.ref, T, p);
    sTT += rho[i] * d.gTT;
    sTp += rho[i] * d.gTp;
    spp += rho[i] * d.gpp;
  }
  const double cv = -T / rho.sum() * (sTT - sTp * sTp / spp);
  if (!(cv > 0.0)) throw ConsistencyError("heat_capacity: nonpositive result");
  return cv;
}

Vec chemical_potentials(const MixtureModel& m, double T, const Vec& rho) {
  const double p = pressure(m, T, rho);
  const Vec x = mole_fractions(m, rho);
  Vec mu(m.n());
  for (int i = 0; i < m.n(); ++i)
    mu[i] = gibbs(m.species[i], m.ref, T, p) +
            T / m.species[i].molar_mass * std::log(x[i]);
  return mu;
}

Vec volume_fractions(const MixtureModel& m, double T, const Vec& rho) {
  const double p = pressure(m, T, rho);
  Vec phi(m.n());
  for (int i = 0; i < m.n(); ++i)
    phi[i] = rho[i] * gibbs_derivs(m.species[i], m.ref, T, p).gp;
  return phi;
}

double temperature_from_energy(const MixtureModel& m, const Vec& rho, double rhou,
                               std::optional<double> hint) {
  detail::check_conserved(m, ConservedState{rho, rhou});
  const double tol = 1e-12 * std::max(1.0, std::abs(rhou));
  auto resid = [&](double T) {
    detail::FEval e{};
    e.f = internal_energy(m, T, rho) - rhou;
    e.df = rho.sum() * heat_capacity(m, T, rho);
    return e;
  };
  // Expand a bracket around the guess; epsilon(T) is strictly increasing with
  // limits sum g0*rho (T->0+) and +infinity.
  double Tg = hint.value_or(1.0);
  double lo = Tg, hi = Tg;
  double flo = resid(lo).f, fhi = flo;
  while (flo > 0.0) {
    lo *= 0.5;
    if (lo < 1e-300)
      throw ConvergenceError("temperature_from_energy: lower bracket not found");
    flo = resid(lo).f;
  }
  while (fhi < 0.0) {
    hi *= 2.0;
    if (hi > 1e300)
      throw ConvergenceError("temperature_from_energy: upper bracket not found");
    fhi = resid(hi).f;
  }
  if (std::abs(flo) <= tol) return lo;
  if (std::abs(fhi) <= tol) return hi;
  return detail::solve_monotone(resid, lo, hi, std::sqrt(lo * hi), tol, kMaxIter,
                                "temperature_from_energy");
}

double entropy_h(const MixtureModel& m, const ConservedState& w) {
  const double T = temperature_from_energy(m, w.rho, w.rhou);
  return entropy_density_neg(m, T, w.rho);
}

Vec grad_h(const MixtureModel& m, const ConservedState& w) {
  const double T = temperature_from_energy(m, w.rho, w.rhou);
  const double p = pressure(m, T, w.rho);
  const Vec x = mole_fractions(m, w.rho);
  Vec g(m.n() + 1);
  for (int i = 0; i < m.n(); ++i)
    g[i] = gibbs(m.species[i], m.ref, T, p) / T +
           std::log(x[i]) / m.species[i].molar_mass;
  g[m.n()] = -1.0 / T;
  return g;
}

Mat hess_h(const MixtureModel& m, const ConservedState& w) {
  const int N = m.n();
  const double T = temperature_from_energy(m, w.rho, w.rhou);
  const double p = pressure(m, T, w.rho);

  Vec gp(N), gpp(N), gTp(N), H(N);
  double sTT = 0.0, sTp = 0.0, spp = 0.0;
  for (int i = 0; i < N; ++i) {
    const GibbsDerivs d = gibbs_derivs(m.species[i], m.ref, T, p);
    gp[i] = d.gp;
    gpp[i] = d.gpp;
    gTp[i] = d.gTp;
    H[i] = d.g - T * d.gT;
    sTT += w.rho[i] * d.gTT;
    sTp += w.rho[i] * d.gTp;
    spp += w.rho[i] * d.gpp;
  }
  const double rho_cv = -T * (sTT - sTp * sTp / spp); // varrho * c_v

  // dT/drho_i at fixed rho*u and the fixed-T free-energy Hessian.
  Vec dT(N);
  double n_tot = 0.0;
  for (int i = 0; i < N; ++i) n_tot += w.rho[i] / m.species[i].molar_mass;
  Mat A = Mat::Zero(N + 1, N + 1);
  for (int i = 0; i < N; ++i) {
    const double dp_drhoi = -gp[i] / spp;
    const double deps_drhoi = H[i] - T * sTp * dp_drhoi;
    dT[i] = -deps_drhoi / rho_cv;
  }
  for (int i = 0; i < N; ++i) {
    for (int k = i; k < N; ++k) {
      const double Mi = m.species[i].molar_mass;
      const double Mk = m.species[k].molar_mass;
      // D^2_rho f at fixed T, with the ideal-mixing block carrying the factor
      // T that the gradient mu_i = g_i + (T/M_i) ln x_i demands.
      const double f2 = -gp[i] * gp[k] / spp +
                        T * ((i == k ? Mi / w.rho[i] : 0.0) - 1.0 / n_tot) / (Mi * Mk);
      A(i, k) = f2 / T + rho_cv / (T * T) * dT[i] * dT[k];
      A(k, i) = A(i, k);
    }
    A(i, N) = dT[i] / (T * T);
    A(N, i) = A(i, N);
  }
  A(N, N) = 1.0 / (rho_cv * T * T);
  return A;
}

} // namespace mixflow
