#ifndef MIXFLOW_ANALYSIS_HPP
#define MIXFLOW_ANALYSIS_HPP

#include <string>
#include <vector>

#include "mixflow/entropic.hpp"
#include "mixflow/mixture.hpp"
#include "mixflow/rational.hpp"

namespace mixflow {

/// Which constituent controls the large-temperature behaviour: gamma_max and
/// the tie-break ordering on the heat-capacity constants.
struct DominanceReport {
  double gamma_max;
  int dominant_index;
  bool strict_ordering_ok;
};

DominanceReport dominant_species(const MixtureModel& m); // throws NoDominantSpecies

/// Admissible exponent windows of the temperature maximum principle at
/// integrability index p. All bounds are exact rationals; the interval upper
/// ends are exclusive, the l bound is inclusive, the viscosity and
/// diffusivity bounds are exclusive.
struct GrowthWindow {
  Rational p;
  Rational gamma;
  Rational delta; // alpha_I / (1 - beta_I)
  Rational beta_lo, beta_hi;

  Rational s_lo(const Rational& beta) const;
  Rational s_hi(const Rational& beta) const;
  Rational l_bound(const Rational& beta, const Rational& s0) const;
  Rational visc_bound(const Rational& beta) const;
  Rational M_bound(const Rational& beta) const;
};

GrowthWindow growth_window(const MixtureModel& m, const Rational& p);

/// Claimed temperature-growth exponents of the transport coefficients:
/// kappa between T^kappa_lower and T^kappa_upper, |l|, |M|, eta, |lambda|
/// bounded by the respective powers.
struct CoeffGrowthSpec {
  Rational kappa_lower;
  Rational kappa_upper;
  Rational l;
  Rational M;
  Rational eta;
  Rational lambda;
};

struct GrowthReport {
  bool pass = false;
  Rational beta, s0, s1; // witness when pass
  std::string violated;  // first violated condition otherwise
  GrowthWindow window;
};

/// Searches the (beta, s0, s1) window for a witness making every growth
/// condition hold; exact rational arithmetic throughout.
GrowthReport check_growth(const MixtureModel& m, const Rational& p,
                          const CoeffGrowthSpec& spec);

struct TRange {
  double lo = 1e2;
  double hi = 1e6;
  int points = 12;
};

/// Least-squares slope of a thermodynamic quantity at fixed (varrho, qbar)
/// against T. Quantities: "rhou", "rhoH", "cv", "pressure", "d0", "a0",
/// "ak", "rho:<i>", "x:<i>", "Mscr". Minority densities ("rho:<i>" with i not
/// dominant) regress ln rho against T^gamma_max (gamma_max > 0) or ln T.
struct AsymptoticFit {
  std::string quantity;
  double slope;
  double predicted; // NaN when only a decay form is predicted
  double T_lo, T_hi;
  double residual; // normalized RMS of the linear fit
};

AsymptoticFit fit_asymptotics(const MixtureModel& m, const Basis& b, double varrho,
                              const Vec& qbar, const TRange& range,
                              const std::string& quantity);

/// Largest safe temperature for gamma_max > 0 models: the minority exponent
/// b T^gamma stays below ~600 so the decaying densities remain representable.
double asymptotic_T_cap(const MixtureModel& m, const DominanceReport& dom);

class FitUnreliable : public std::runtime_error {
public:
  explicit FitUnreliable(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace mixflow

#endif
