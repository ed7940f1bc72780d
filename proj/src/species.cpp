#include "mixflow/species.hpp"

#include <cmath>

#include "mixflow/errors.hpp"

namespace mixflow {

namespace {

void require_state(double T, double p) {
  if (!(T > 0.0)) throw DomainError("species: temperature must be positive");
  if (!(p > 0.0)) throw DomainError("species: pressure must be positive");
}

} // namespace

double gibbs(const SpeciesParams& s, const ReferenceState& ref, double T, double p) {
  require_state(T, p);
  const double tr = T / ref.T0;
  const double pr = p / ref.p0;
  if (s.variant == GibbsVariant::IdealGas) {
    return ref.p0 / s.rhoR * tr * std::log(pr) - s.c0 * T * (std::log(tr) - 1.0) +
           s.g1 * T + s.g0;
  }
  const double A = ref.p0 / (s.beta * s.rhoR) * std::pow(tr, s.alpha) * std::pow(pr, s.beta);
  const double heat =
      s.c0 * ref.T0 / (s.gamma * (s.gamma + 1.0)) * std::pow(tr, s.gamma + 1.0);
  return A - heat + s.g1 * T + s.g0;
}

GibbsDerivs gibbs_derivs(const SpeciesParams& s, const ReferenceState& ref, double T,
                         double p) {
  require_state(T, p);
  GibbsDerivs d{};
  const double tr = T / ref.T0;
  const double pr = p / ref.p0;
  if (s.variant == GibbsVariant::IdealGas) {
    const double lp = std::log(pr);
    const double lt = std::log(tr);
    d.g = ref.p0 / s.rhoR * tr * lp - s.c0 * T * (lt - 1.0) + s.g1 * T + s.g0;
    d.gT = ref.p0 / (s.rhoR * ref.T0) * lp - s.c0 * lt + s.g1;
    d.gp = ref.p0 * T / (s.rhoR * ref.T0 * p);
    d.gTT = -s.c0 / T;
    d.gTp = d.gp / T;
    d.gpp = -d.gp / p;
    return d;
  }
  const double A = ref.p0 / (s.beta * s.rhoR) * std::pow(tr, s.alpha) * std::pow(pr, s.beta);
  const double tg = std::pow(tr, s.gamma);
  d.g = A - s.c0 * ref.T0 / (s.gamma * (s.gamma + 1.0)) * tg * tr + s.g1 * T + s.g0;
  d.gT = s.alpha / T * A - s.c0 / s.gamma * tg + s.g1;
  d.gp = s.beta / p * A;
  d.gTT = s.alpha * (s.alpha - 1.0) / (T * T) * A - s.c0 / T * tg;
  d.gTp = s.alpha / T * d.gp;
  d.gpp = (s.beta - 1.0) / p * d.gp;
  return d;
}

double enthalpy(const SpeciesParams& s, const ReferenceState& ref, double T, double p) {
  const GibbsDerivs d = gibbs_derivs(s, ref, T, p);
  return d.g - T * d.gT;
}

double cv_species(const SpeciesParams& s, const ReferenceState& ref, double T, double p) {
  const GibbsDerivs d = gibbs_derivs(s, ref, T, p);
  const double cv = -T * (d.gTT - d.gTp * d.gTp / d.gpp);
  if (!(cv > 0.0))
    throw ConsistencyError("cv_species: nonpositive heat capacity (invalid parameters)");
  return cv;
}

ValidationReport validate_species(const SpeciesParams& s, const ReferenceState& ref) {
  ValidationReport rep;
  auto bad = [&rep](const std::string& msg) { rep.violations.push_back(msg); };

  if (!(ref.p0 > 0.0)) bad("reference pressure p0 must be positive");
  if (!(ref.T0 > 0.0)) bad("reference temperature T0 must be positive");
  if (!(s.rhoR > 0.0)) bad("rhoR must be positive");
  if (!(s.molar_mass > 0.0)) bad("molar_mass must be positive");
  if (!(s.c0 > 0.0)) bad("c0 must be positive");

  if (s.variant == GibbsVariant::Tait) {
    if (!(s.alpha >= 0.0 && s.alpha < 1.0)) bad("Tait requires 0 <= alpha < 1");
    if (!(s.beta > 0.0 && s.beta < 1.0)) bad("Tait requires 0 < beta < 1");
    if (!(s.alpha + s.beta <= 1.0)) bad("Tait requires alpha + beta <= 1");
    if (!(s.gamma > 0.0))
      bad("Tait requires gamma > 0 (the gamma = 0 heat-capacity term is the "
          "ideal-gas variant)");
  } else {
    if (s.gamma != 0.0) bad("ideal-gas variant stores gamma = 0");
    if (!(s.c0 > ref.p0 / (ref.T0 * s.rhoR)))
      bad("ideal-gas variant requires c0 > p0/(T0*rhoR)");
  }
  if (!rep.ok()) return rep;

  // Sample the consistency signs gp > 0, gpp < 0, gTT < 0 and
  // gTT - gTp^2/gpp < 0 on a 7x7 log grid.
  const int n = 7;
  const double lo = 1e-3, hi = 1e6;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double T = lo * std::pow(hi / lo, double(i) / (n - 1));
      const double p = lo * std::pow(hi / lo, double(j) / (n - 1));
      const GibbsDerivs d = gibbs_derivs(s, ref, T, p);
      if (!(d.gp > 0.0)) bad("dg/dp <= 0 at sampled state");
      if (!(d.gpp < 0.0)) bad("d2g/dp2 >= 0 at sampled state");
      if (!(d.gTT < 0.0)) bad("d2g/dT2 >= 0 at sampled state");
      if (!(d.gTT - d.gTp * d.gTp / d.gpp < 0.0))
        bad("specific heat determinant sign violated at sampled state");
      if (!rep.ok()) return rep;
    }
  }
  return rep;
}

} // namespace mixflow
