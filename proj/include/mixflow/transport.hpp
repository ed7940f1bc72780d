#ifndef MIXFLOW_TRANSPORT_HPP
#define MIXFLOW_TRANSPORT_HPP

#include <functional>
#include <utility>

#include "mixflow/entropic.hpp"
#include "mixflow/mixture.hpp"

namespace mixflow {

/// State-dependent inputs for the Onsager closure. The default mobility model
/// is M = d (diag(rho) - rho rho^T / varrho); a user-supplied M replaces it
/// and is validated (PSD of rank N-1 with kernel 1^N).
struct OnsagerInputs {
  std::function<double(double, const Vec&)> mobility =
      [](double, const Vec&) { return 1.0; };
  std::function<Vec(double, const Vec&)> ltilde = [](double, const Vec& rho) {
    return Vec::Zero(rho.size()).eval();
  };
  std::function<double(double, const Vec&)> kappatilde =
      [](double, const Vec&) { return 1.0; };
  std::function<Mat(double, const Vec&)> user_M; // optional
};

/// Assembled transport matrices at one state: l = -M ltilde,
/// kappa = kappatilde + M ltilde . ltilde, Mext = [[M, l], [l^T, kappa]].
struct OnsagerMatrices {
  Mat M;
  Vec l;
  double kappa;
  Mat Mext;
};

Mat default_M(double T, const Vec& rho, double d);

OnsagerMatrices build_onsager(const OnsagerInputs& in, double T, const Vec& rho);

/// Fick-Onsager-Fourier fluxes from the gradient of w* (rows: grad(mu_j/T),
/// last row grad(-1/T)) and the per-species forces b (N x dim).
/// Returns the diffusion fluxes J (N x dim, columns sum to zero) and the heat
/// flux Jh (1 x dim).
std::pair<Mat, Eigen::RowVectorXd> fluxes_primal(const OnsagerMatrices& mats,
                                                 const Mat& wstar_grad, const Mat& b,
                                                 double T);

/// Entropic form of the combined flux: -Mext Q (grad q + q_N btilde).
Mat fluxes_entropic(const Basis& b, const OnsagerMatrices& mats, const Mat& q_grad,
                    double qN, const Mat& btilde);

/// Coefficients of the internal-energy form of the heat flux:
/// grad eps = a . grad qbar + a0 grad varrho + d0 grad q_N, with
/// d0 >= T^2 varrho c_v. d0_alt is the same quantity assembled through the
/// primal-variable route (independent cross-check), L_k = xi^k . (l, 0).
struct EnergyCoeffs {
  double a0;
  Vec a;  // size N-1
  double d0;
  double d0_alt;
  Vec L;  // size N-1
};

EnergyCoeffs energy_coeffs(const MixtureModel& m, const Basis& basis,
                           const DualState& ws, const OnsagerMatrices& mats);

/// Variant over a precomputed entropic bundle.
EnergyCoeffs energy_coeffs_of(const MixtureModel& m, const Basis& basis,
                              const EntropicEval& e, const OnsagerMatrices& mats);

} // namespace mixflow

#endif
