#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "mixflow/errors.hpp"
#include "mixflow/transport.hpp"
#include "test_helpers.hpp"

using namespace mixflow;
using namespace mixflow::testing;

namespace {

OnsagerInputs constant_inputs(double d, Vec lt, double kt) {
  OnsagerInputs in;
  in.mobility = [d](double, const Vec&) { return d; };
  in.ltilde = [lt](double, const Vec&) { return lt; };
  in.kappatilde = [kt](double, const Vec&) { return kt; };
  return in;
}

} // namespace

TEST_CASE("default mobility matrix") {
  const Vec rho = (Vec(2) << 1.0, 1.0).finished();
  const Mat M = default_M(1.0, rho, 1.0);
  CHECK(M(0, 0) == doctest::Approx(0.5));
  CHECK(M(0, 1) == doctest::Approx(-0.5));
  CHECK(M(1, 0) == doctest::Approx(-0.5));
  CHECK(M(1, 1) == doctest::Approx(0.5));

  RandomStates rs(71);
  for (int k = 0; k < 50; ++k) {
    const Vec r = rs.rho(4);
    const Mat Mk = default_M(rs.T(), r, 0.7);
    CHECK((Mk * Vec::Ones(4)).cwiseAbs().maxCoeff() < 1e-14);
    for (int t = 0; t < 20; ++t) {
      Vec z(4);
      for (int i = 0; i < 4; ++i) z[i] = -1.0 + 2.0 * rs.u(rs.rng);
      CHECK(z.dot(Mk * z) >= -1e-14);
    }
  }
}

TEST_CASE("build_onsager") {
  const Vec rho = (Vec(2) << 1.0, 1.0).finished();
  SUBCASE("zero ltilde gives block-diagonal extension") {
    const OnsagerMatrices om =
        build_onsager(constant_inputs(1.0, Vec::Zero(2), 2.5), 1.0, rho);
    CHECK(om.l.cwiseAbs().maxCoeff() == 0.0);
    CHECK(om.kappa == doctest::Approx(2.5));
  }
  SUBCASE("worked example") {
    const OnsagerMatrices om =
        build_onsager(constant_inputs(1.0, (Vec(2) << 1.0, 0.0).finished(), 1.0), 1.0,
                      rho);
    CHECK(om.l[0] == doctest::Approx(-0.5));
    CHECK(om.l[1] == doctest::Approx(0.5));
    CHECK(om.kappa == doctest::Approx(1.5));
    // kernel (1,1,0)
    Vec k(3);
    k << 1.0, 1.0, 0.0;
    CHECK((om.Mext * k).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("extended matrix is PSD with one-dimensional kernel") {
    const Basis bas = build_basis(3);
    RandomStates rs(73);
    for (int k = 0; k < 40; ++k) {
      const Vec r = rs.rho(3);
      Vec lt(3);
      for (int i = 0; i < 3; ++i) lt[i] = -1.0 + 2.0 * rs.u(rs.rng);
      const OnsagerMatrices om =
          build_onsager(constant_inputs(0.8, lt, 1.3), rs.T(), r);
      Eigen::SelfAdjointEigenSolver<Mat> es(om.Mext);
      const double scale = om.Mext.cwiseAbs().maxCoeff();
      CHECK(es.eigenvalues()[0] >= -1e-10 * scale);
      CHECK(es.eigenvalues()[1] > 1e-10 * scale); // kernel exactly 1-dim
      Vec kvec(4);
      kvec << 1.0, 1.0, 1.0, 0.0;
      CHECK((om.Mext * kvec).cwiseAbs().maxCoeff() < 1e-12 * scale);
      // The projected matrix onto the basis columns is strictly SPD.
      const Mat Mt = bas.Q.transpose() * om.Mext * bas.Q;
      Eigen::LLT<Mat> llt(Mt);
      CHECK(llt.info() == Eigen::Success);
    }
  }
  SUBCASE("user-supplied M is validated") {
    OnsagerInputs in = constant_inputs(1.0, Vec::Zero(2), 1.0);
    in.user_M = [](double, const Vec& r) {
      const Vec a = r.cwiseProduct(r);
      return (Mat(a.asDiagonal()) - a * a.transpose() / a.sum()).eval();
    };
    const OnsagerMatrices om = build_onsager(in, 1.0, rho);
    CHECK((om.M * Vec::Ones(2)).cwiseAbs().maxCoeff() < 1e-14);
    OnsagerInputs bad = constant_inputs(1.0, Vec::Zero(2), 1.0);
    bad.user_M = [](double, const Vec& r) {
      return Mat(Mat::Identity(r.size(), r.size()));
    };
    CHECK_THROWS_AS(build_onsager(bad, 1.0, rho), ValidationError);
  }
}

TEST_CASE("primal fluxes") {
  const Vec rho = (Vec(2) << 0.8, 1.2).finished();
  const OnsagerMatrices om =
      build_onsager(constant_inputs(1.0, (Vec(2) << 0.4, -0.2).finished(), 1.1), 1.0,
                    rho);
  SUBCASE("zero gradients and forces give zero flux") {
    const auto [J, Jh] = fluxes_primal(om, Mat::Zero(3, 1), Mat::Zero(2, 1), 1.5);
    CHECK(J.cwiseAbs().maxCoeff() == 0.0);
    CHECK(Jh.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("pure temperature gradient drives l and kappa") {
    Mat G = Mat::Zero(3, 1);
    G(2, 0) = -0.3; // grad(-1/T); grad(1/T) = +0.3
    const auto [J, Jh] = fluxes_primal(om, G, Mat::Zero(2, 1), 1.5);
    CHECK(J(0, 0) == doctest::Approx(om.l[0] * 0.3));
    CHECK(J(1, 0) == doctest::Approx(om.l[1] * 0.3));
    CHECK(Jh(0) == doctest::Approx(om.kappa * 0.3));
  }
  SUBCASE("diffusion fluxes sum to zero") {
    RandomStates rs(79);
    for (int k = 0; k < 50; ++k) {
      Mat G(3, 2), bf(2, 2);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) G(i, j) = -1.0 + 2.0 * rs.u(rs.rng);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) bf(i, j) = -1.0 + 2.0 * rs.u(rs.rng);
      const auto [J, Jh] = fluxes_primal(om, G, bf, rs.T());
      CHECK(J.colwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("entropic and primal flux routes agree") {
  const MixtureModel m = model_two_gases();
  const Basis b = build_basis(2);
  RandomStates rs(83);
  for (int k = 0; k < 40; ++k) {
    const double T = rs.T();
    const Vec rho = rs.rho(2);
    const EntropicState s =
        to_entropic(m, b, ConservedState{rho, internal_energy(m, T, rho)});
    const EntropicEval e = evaluate(m, b, s.varrho, s.q);
    const OnsagerMatrices om =
        build_onsager(constant_inputs(0.9, (Vec(2) << 0.3, -0.5).finished(), 1.2), T,
                      rho);

    // Manufactured gradients: q_x arbitrary, varrho_x arbitrary, plus forces
    // decomposed in the xi basis (the bbar part must drop out).
    Mat q_x(2, 1), btil(2, 1);
    double varrho_x = -0.4 + 0.8 * rs.u(rs.rng);
    for (int i = 0; i < 2; ++i) q_x(i, 0) = -1.0 + 2.0 * rs.u(rs.rng);
    btil(0, 0) = -1.0 + 2.0 * rs.u(rs.rng);
    btil(1, 0) = 0.0; // eta^N . (b, 0) vanishes for physical forces
    const double bbar = -1.0 + 2.0 * rs.u(rs.rng);

    // grad w* = Q q_x + (dM/drho varrho_x + sum_k dM/dq_k q_x) xi^{N+1}.
    const Vec u = b.Q.transpose() * (e.hess * b.xi.col(2));
    double Mx = varrho_x / e.dxx;
    for (int l = 0; l < 2; ++l) Mx += (-u[l] / e.dxx) * q_x(l, 0);
    const Mat G = b.Q * q_x + b.xi.col(2) * Mx;

    Mat bforce(2, 1);
    bforce.col(0) =
        (b.Q * btil.col(0) + bbar * b.xi.col(2)).head(2); // species rows
    const auto [J, Jh] = fluxes_primal(om, G, bforce, T);
    const Mat Je = fluxes_entropic(b, om, q_x, s.q[1], btil);
    CHECK((Je.topRows(2) - J).cwiseAbs().maxCoeff() <
          1e-10 * std::max(1.0, J.cwiseAbs().maxCoeff()));
    CHECK(std::abs(Je(2, 0) - Jh(0)) < 1e-10 * std::max(1.0, std::abs(Jh(0))));
    // rows 1..N sum to zero
    CHECK(std::abs(Je.topRows(2).colwise().sum()(0)) < 1e-12);
  }
}

TEST_CASE("entropy production is nonnegative") {
  RandomStates rs(89);
  for (int k = 0; k < 50; ++k) {
    const Vec r = rs.rho(3);
    Vec lt(3);
    for (int i = 0; i < 3; ++i) lt[i] = -1.0 + 2.0 * rs.u(rs.rng);
    const OnsagerMatrices om = build_onsager(constant_inputs(0.8, lt, 1.3), rs.T(), r);
    Mat G(4, 3);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 3; ++j) G(i, j) = -1.0 + 2.0 * rs.u(rs.rng);
    CHECK((G.transpose() * (om.Mext * G)).trace() >= -1e-12);
  }
}

TEST_CASE("energy coefficients") {
  const MixtureModel m = model_two_gases();
  const Basis b = build_basis(2);
  RandomStates rs(97);
  for (int k = 0; k < 100; ++k) {
    const double T = rs.T();
    const Vec rho = rs.rho(2);
    const Vec ws = grad_h(m, ConservedState{rho, internal_energy(m, T, rho)});
    const OnsagerMatrices om =
        build_onsager(constant_inputs(1.0, (Vec(2) << 0.2, 0.1).finished(), 1.0), T,
                      rho);
    const EnergyCoeffs ec = energy_coeffs(m, b, DualState{ws}, om);
    CHECK(ec.d0 > 0.0);
    CHECK(rel_err(ec.d0_alt, ec.d0) < 1e-8);
    const double floor = T * T * rho.sum() * heat_capacity(m, T, rho);
    CHECK(ec.d0 >= floor - 1e-10 * std::max(1.0, floor));
    CHECK(ec.L[0] == doctest::Approx(b.xi.col(0).head(2).dot(om.l)));
  }
}

TEST_CASE("identical species at a symmetric state: d0 attains its floor") {
  const MixtureModel m = make_mixture({ideal_gas(2.0, 1.0), ideal_gas(2.0, 1.0)});
  const Basis b = build_basis(2);
  const Vec rho = (Vec(2) << 0.9, 0.9).finished();
  const double T = 1.4;
  const Vec ws = grad_h(m, ConservedState{rho, internal_energy(m, T, rho)});
  const OnsagerMatrices om =
      build_onsager(constant_inputs(1.0, Vec::Zero(2), 1.0), T, rho);
  const EnergyCoeffs ec = energy_coeffs(m, b, DualState{ws}, om);
  const double floor = T * T * rho.sum() * heat_capacity(m, T, rho);
  CHECK(ec.d0 == doctest::Approx(floor).epsilon(1e-10));
}

TEST_CASE("heat-flux rewrite agrees with the direct form on a smooth field") {
  const MixtureModel m = model_two_gases();
  const Basis b = build_basis(2);
  const OnsagerInputs oi = constant_inputs(0.9, (Vec(2) << 0.3, -0.1).finished(), 1.4);

  // Manufactured smooth 1-D profiles with analytic derivatives.
  auto varrho_f = [](double x) { return 1.0 + 0.3 * std::sin(2 * std::numbers::pi * x); };
  auto varrho_x = [](double x) {
    return 0.3 * 2 * std::numbers::pi * std::cos(2 * std::numbers::pi * x);
  };
  auto q1_f = [](double x) { return 0.2 * std::cos(2 * std::numbers::pi * x); };
  auto q1_x = [](double x) {
    return -0.2 * 2 * std::numbers::pi * std::sin(2 * std::numbers::pi * x);
  };
  auto qN_f = [](double x) { return -std::exp(0.3 * std::cos(2 * std::numbers::pi * x)); };
  auto qN_x = [](double x) {
    return -std::exp(0.3 * std::cos(2 * std::numbers::pi * x)) * (-0.3) * 2 *
           std::numbers::pi * std::sin(2 * std::numbers::pi * x);
  };

  double worst = 0.0;
  for (int i = 0; i <= 50; ++i) {
    const double x = i / 50.0;
    EntropicState s;
    s.varrho = varrho_f(x);
    s.q = (Vec(2) << q1_f(x), qN_f(x)).finished();
    const EntropicEval e = evaluate(m, b, s.varrho, s.q);
    const OnsagerMatrices om = build_onsager(oi, e.T, e.rho);
    const EnergyCoeffs ec = energy_coeffs_of(m, b, e, om);

    const Vec qx = (Vec(2) << q1_x(x), qN_x(x)).finished();
    const double rx = varrho_x(x);

    // Direct form: Jh = -kappa grad q_N - L . grad qbar.
    const double direct = -om.kappa * qx[1] - ec.L[0] * qx[0];
    // Energy form: grad eps via the chain rule through R_N.
    const Mat Rq = R_jacobian_of(b, e);
    const Vec Rr = R_drho_of(b, e);
    const double eps_x = Rq.row(1).dot(qx) + Rr[1] * rx;
    const double rewritten = -(om.kappa / ec.d0) * (eps_x - ec.a0 * rx) -
                             (ec.L[0] - (om.kappa / ec.d0) * ec.a[0]) * qx[0];
    worst = std::max(worst,
                     std::abs(rewritten - direct) / std::max(1.0, std::abs(direct)));
  }
  CHECK(worst < 1e-8);
}
