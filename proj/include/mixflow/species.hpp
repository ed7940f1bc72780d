#ifndef MIXFLOW_SPECIES_HPP
#define MIXFLOW_SPECIES_HPP

#include <string>
#include <vector>

namespace mixflow {

/// Nondimensional reference state. The gas constant is normalised to one
/// throughout the library.
struct ReferenceState {
  double p0 = 1.0;
  double T0 = 1.0;
};

enum class GibbsVariant { Tait, IdealGas };

/// Per-constituent Gibbs free-energy parameters.
///
/// Tait variant:
///   g(T,p) = (p0/(beta*rhoR)) (T/T0)^alpha (p/p0)^beta
///            - (c0*T0/(gamma*(gamma+1))) (T/T0)^(gamma+1) + g1*T + g0
/// Ideal-gas variant (the beta->0, alpha->1 limit; gamma := 0):
///   g(T,p) = (p0/rhoR)(T/T0) ln(p/p0) - c0*T*(ln(T/T0) - 1) + g1*T + g0
struct SpeciesParams {
  GibbsVariant variant = GibbsVariant::IdealGas;
  double alpha = 0.0; // Tait only
  double beta = 0.0;  // Tait only
  double gamma = 0.0; // Tait only; ideal gas stores 0
  double c0 = 1.0;    // heat-capacity coefficient
  double rhoR = 1.0;  // reference bulk density
  double g1 = 0.0;
  double g0 = 0.0;
  double molar_mass = 1.0;
  std::string name;
};

/// Value and first/second derivatives of g at one (T,p) point.
/// gp is the specific volume of the pure constituent.
struct GibbsDerivs {
  double g;
  double gT;
  double gp;
  double gTT;
  double gTp;
  double gpp;
};

double gibbs(const SpeciesParams& s, const ReferenceState& ref, double T, double p);
GibbsDerivs gibbs_derivs(const SpeciesParams& s, const ReferenceState& ref, double T,
                         double p);

/// H = g - T dg/dT.
double enthalpy(const SpeciesParams& s, const ReferenceState& ref, double T, double p);

/// c_v = -T (gTT - gTp^2/gpp); constant for the ideal-gas variant.
double cv_species(const SpeciesParams& s, const ReferenceState& ref, double T, double p);

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  bool ok() const { return violations.empty(); }
};

/// Checks the parameter constraints of each variant and samples the
/// concavity/sign invariants of the derivatives on a log-spaced (T,p) grid.
ValidationReport validate_species(const SpeciesParams& s, const ReferenceState& ref);

} // namespace mixflow

#endif
