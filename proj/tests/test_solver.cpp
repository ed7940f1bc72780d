#include <doctest.h>

#include "mixflow/errors.hpp"
#include "mixflow/solver.hpp"
#include "test_helpers.hpp"

using namespace mixflow;
using namespace mixflow::testing;

namespace {

SolverInputs basic_inputs(double d = 1.0, double kappa = 1.0, double eta = 0.01,
                          double lambda = 0.0) {
  SolverInputs in;
  in.onsager.mobility = [d](double, const Vec&) { return d; };
  in.onsager.kappatilde = [kappa](double, const Vec&) { return kappa; };
  in.eta = [eta](double, const Vec&) { return eta; };
  in.lambda = [lambda](double, const Vec&) { return lambda; };
  return in;
}

FieldState uniform_state(const MixtureModel& m, const Basis& b, const Grid1D& g,
                         double T, const Vec& rho) {
  return init_from_primal(
      m, b, g, [T](double) { return T; }, [rho](double) { return rho; },
      [](double) { return 0.0; });
}

} // namespace

TEST_CASE("init_from_primal") {
  const MixtureModel m = model_two_gases();
  const Basis b = build_basis(2);
  const Grid1D g = Grid1D::uniform(1.0, 16);
  SUBCASE("uniform data give uniform fields with q_N = -1/T") {
    const Vec rho = (Vec(2) << 1.0, 0.7).finished();
    const FieldState s = uniform_state(m, b, g, 1.3, rho);
    for (int j = 0; j < g.J; ++j) {
      CHECK(s.varrho[j] == doctest::Approx(1.7));
      CHECK(s.q(j, 1) == doctest::Approx(-1.0 / 1.3));
      CHECK(s.q(j, 0) == doctest::Approx(s.q(0, 0)));
    }
  }
  SUBCASE("round trip recovers the primal fields") {
    auto T0 = [](double x) { return 1.0 + 0.1 * std::sin(2 * std::numbers::pi * x); };
    auto rho0 = [](double x) {
      return (Vec(2) << 1.0 + 0.05 * std::cos(2 * std::numbers::pi * x), 0.8).finished();
    };
    const FieldState s =
        init_from_primal(m, b, g, T0, rho0, [](double) { return 0.0; });
    for (int j = 0; j < g.J; ++j) {
      const FromEntropic fe =
          from_entropic(m, b, EntropicState{s.varrho[j], s.q.row(j).transpose()});
      CHECK(rel_err(fe.mix.T, T0(g.x[j])) < 1e-10);
      CHECK(rel_err(fe.mix.rho[0], rho0(g.x[j])[0]) < 1e-10);
      CHECK(rel_err(fe.mix.rho[1], rho0(g.x[j])[1]) < 1e-10);
    }
  }
  SUBCASE("invalid initial data are rejected") {
    CHECK_THROWS_AS(uniform_state(m, b, g, -1.0, (Vec(2) << 1, 1).finished()),
                    DomainError);
  }
}

TEST_CASE("uniform equilibrium is an exact fixed point") {
  const MixtureModel m = model_two_gases();
  const Basis b = build_basis(2);
  const Grid1D g = Grid1D::uniform(1.0, 32);
  const FieldState s = uniform_state(m, b, g, 1.2, (Vec(2) << 0.9, 0.6).finished());
  StepConfig cfg;
  cfg.dt = 1e-3;
  const auto [out, diag] = step(m, b, g, basic_inputs(), BoundarySpec::insulated(), s,
                                cfg);
  CHECK(diag.fp_iters == 1);
  CHECK((out.q - s.q).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((out.varrho - s.varrho).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(out.v.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("temperature perturbation conserves mass and energy per step") {
  const MixtureModel m = make_mixture({ideal_gas(2.0, 1.0), ideal_gas(2.0, 1.0)});
  const Basis b = build_basis(2);
  const Grid1D g = Grid1D::uniform(1.0, 48);
  auto T0 = [](double x) { return 1.0 + 0.01 * std::sin(2 * std::numbers::pi * x); };
  auto rho0 = [](double) { return (Vec(2) << 0.8, 0.8).finished(); };
  FieldState s = init_from_primal(m, b, g, T0, rho0, [](double) { return 0.0; });
  StepConfig cfg;
  cfg.dt = 2e-4;
  const SolverInputs in = basic_inputs(1.0, 1.0, 0.02, 0.0);
  WorkspacePtr ws = make_workspace();
  double E_prev = -1.0;
  Vec mass_prev;
  for (int n = 0; n < 20; ++n) {
    const auto [out, diag] = step(m, b, g, in, BoundarySpec::insulated(), s, cfg, ws);
    if (n > 0) {
      CHECK(std::abs(diag.energy - E_prev) / std::abs(E_prev) < 1e-10);
      CHECK((diag.species_mass - mass_prev).cwiseAbs().maxCoeff() < 1e-11);
    }
    E_prev = diag.energy;
    mass_prev = diag.species_mass;
    s = out;
  }
}

TEST_CASE("two-gas relaxation: conservation and entropy growth over many steps") {
  // Equal heat capacities and reference densities but different molar masses:
  // the energy density and pressure stay uniform, v stays zero, and the
  // composition relaxes purely by cross-diffusion.
  const MixtureModel m = make_mixture({ideal_gas(2.0, 1.0, 1.0), ideal_gas(2.0, 1.0, 2.0)});
  const Basis b = build_basis(2);
  const Grid1D g = Grid1D::uniform(1.0, 40);
  auto rho0 = [](double x) {
    const double s = 0.1 * std::sin(2 * std::numbers::pi * x);
    return (Vec(2) << 0.8 + s, 0.8 - s).finished();
  };
  FieldState s =
      init_from_primal(m, b, g, [](double) { return 1.0; }, rho0,
                       [](double) { return 0.0; });
  StepConfig cfg;
  cfg.dt = 5e-4;
  const SolverInputs in = basic_inputs(2.0, 1.0, 0.02, 0.0);
  WorkspacePtr ws = make_workspace();

  Vec mass0;
  double E0 = 0.0, S_prev = 0.0, q1_amp0 = 0.0;
  for (int n = 0; n < 200; ++n) {
    const auto [out, diag] = step(m, b, g, in, BoundarySpec::insulated(), s, cfg, ws);
    if (n == 0) {
      mass0 = diag.species_mass;
      E0 = diag.energy;
      S_prev = diag.entropy;
      q1_amp0 = out.q.col(0).maxCoeff() - out.q.col(0).minCoeff();
    } else {
      CHECK((diag.species_mass - mass0).cwiseAbs().maxCoeff() / mass0.maxCoeff() <
            1e-9);
      CHECK(std::abs(diag.energy - E0) / std::abs(E0) < 1e-8);
      CHECK(diag.entropy - S_prev >= -1e-8 * std::abs(S_prev));
      S_prev = diag.entropy;
    }
    CHECK(diag.sup_qN < 0.0);
    s = out;
  }
  // Composition relaxes toward uniform.
  const double q1_amp = s.q.col(0).maxCoeff() - s.q.col(0).minCoeff();
  CHECK(q1_amp < 0.5 * q1_amp0);
}

TEST_CASE("Robin cooling drains energy") {
  const MixtureModel m = model_two_gases();
  const Basis b = build_basis(2);
  const Grid1D g = Grid1D::uniform(1.0, 24);
  FieldState s = uniform_state(m, b, g, 1.5, (Vec(2) << 0.9, 0.9).finished());
  StepConfig cfg;
  cfg.dt = 5e-4;
  const SolverInputs in = basic_inputs();
  WorkspacePtr ws = make_workspace();
  double E_prev = std::numeric_limits<double>::infinity();
  for (int n = 0; n < 30; ++n) {
    const auto [out, diag] =
        step(m, b, g, in, BoundarySpec::robin(2.0, 0.8), s, cfg, ws);
    CHECK(diag.energy < E_prev);
    E_prev = diag.energy;
    s = out;
  }
  const FromEntropic fe =
      from_entropic(m, b, EntropicState{s.varrho[0], s.q.row(0).transpose()});
  CHECK(fe.mix.T < 1.5);
}

TEST_CASE("fixed-point changes decrease monotonically after the second iteration") {
  const MixtureModel m = model_two_gases();
  const Basis b = build_basis(2);
  const Grid1D g = Grid1D::uniform(1.0, 24);
  auto T0 = [](double x) { return 1.0 + 0.05 * std::sin(2 * std::numbers::pi * x); };
  auto rho0 = [](double x) {
    const double c = 0.05 * std::cos(2 * std::numbers::pi * x);
    return (Vec(2) << 0.9 + c, 0.9 - c).finished();
  };
  FieldState s = init_from_primal(m, b, g, T0, rho0, [](double) { return 0.0; });
  StepConfig cfg;
  cfg.dt = 2e-3;
  cfg.fp_tol = 1e-10; // above the coefficient-root noise floor
  for (int halving = 0; halving <= 3; ++halving) {
    try {
      const auto [out, diag] =
          step(m, b, g, basic_inputs(), BoundarySpec::insulated(), s, cfg);
      for (size_t i = 2; i < diag.fp_changes.size(); ++i)
        CHECK(diag.fp_changes[i] <= diag.fp_changes[i - 1]);
      break;
    } catch (const FixedPointDiverged&) {
      REQUIRE(halving < 3);
      cfg.dt *= 0.5;
    }
  }
}

TEST_CASE("CFL violation is reported") {
  const MixtureModel m = model_two_gases();
  const Basis b = build_basis(2);
  const Grid1D g = Grid1D::uniform(1.0, 16);
  FieldState s = uniform_state(m, b, g, 1.0, (Vec(2) << 1.0, 1.0).finished());
  s.v.setConstant(1.0);
  s.v[0] = s.v[g.J - 1] = 0.0;
  StepConfig cfg;
  cfg.dt = 0.1; // max|v| dt / dx = 1.6 > 0.5
  CHECK_THROWS_AS(step(m, b, g, basic_inputs(), BoundarySpec::insulated(), s, cfg),
                  CFLViolation);
}

TEST_CASE("strong boundary heating never yields an inadmissible state") {
  const MixtureModel m = model_two_gases();
  const Basis b = build_basis(2);
  const Grid1D g = Grid1D::uniform(1.0, 16);
  FieldState s = uniform_state(m, b, g, 1.0, (Vec(2) << 1.0, 1.0).finished());
  StepConfig cfg;
  cfg.dt = 0.05;
  cfg.fp_maxiter = 200;
  // A negative-alpha Robin law pumps energy in without bound; every returned
  // state must still satisfy q_N < 0 and the run must end in a clean error.
  bool failed_cleanly = false;
  FieldState cur = s;
  try {
    for (int n = 0; n < 400; ++n) {
      auto [out, diag] = step(m, b, g, basic_inputs(1.0, 50.0, 0.01, 0.0),
                              BoundarySpec::robin(-400.0, 1.0), cur, cfg);
      CHECK(diag.sup_qN < 0.0);
      cur = out;
    }
  } catch (const DomainExit&) {
    failed_cleanly = true;
  } catch (const FixedPointDiverged&) {
    failed_cleanly = true;
  } catch (const ConvergenceError&) {
    failed_cleanly = true;
  }
  CHECK(failed_cleanly);
}

TEST_CASE("reactions convert species while conserving total mass") {
  const MixtureModel m = model_two_gases();
  const Basis b = build_basis(2);
  const Grid1D g = Grid1D::uniform(1.0, 16);
  FieldState s = uniform_state(m, b, g, 1.0, (Vec(2) << 1.0, 1.0).finished());
  SolverInputs in = basic_inputs();
  // Hook returns an unbalanced rate; the solver projects it onto zero sum.
  in.reactions = [](double, const Vec& rho) {
    return (Vec(2) << -0.5 * rho[0], 0.1).finished();
  };
  StepConfig cfg;
  cfg.dt = 1e-3;
  WorkspacePtr ws = make_workspace();
  double total0 = 0.0, rho1_first = 0.0, rho1_last = 0.0;
  for (int n = 0; n < 40; ++n) {
    const auto [out, diag] = step(m, b, g, in, BoundarySpec::insulated(), s, cfg, ws);
    if (n == 0) {
      total0 = diag.species_mass.sum();
      rho1_first = diag.species_mass[0];
    } else {
      CHECK(rel_err(diag.species_mass.sum(), total0) < 1e-10);
    }
    rho1_last = diag.species_mass[0];
    s = out;
  }
  CHECK(rho1_last < rho1_first); // species 1 consumed
}

TEST_CASE("per-species forces drive flow and diffusion without breaking mass") {
  const MixtureModel m = model_two_gases();
  const Basis b = build_basis(2);
  const Grid1D g = Grid1D::uniform(1.0, 16);
  FieldState s = uniform_state(m, b, g, 1.0, (Vec(2) << 1.0, 1.0).finished());
  SolverInputs in = basic_inputs(1.0, 1.0, 0.05, 0.0);
  in.forces = [](double, double) { return (Vec(2) << 0.4, -0.2).finished(); };
  StepConfig cfg;
  cfg.dt = 5e-4;
  WorkspacePtr ws = make_workspace();
  Vec mass0;
  for (int n = 0; n < 40; ++n) {
    const auto [out, diag] = step(m, b, g, in, BoundarySpec::insulated(), s, cfg, ws);
    if (n == 0)
      mass0 = diag.species_mass;
    else
      CHECK((diag.species_mass - mass0).cwiseAbs().maxCoeff() < 1e-9);
    s = out;
  }
  // The net force accelerates the bulk and tilts the composition.
  CHECK(s.v.cwiseAbs().maxCoeff() > 1e-6);
  CHECK(s.q.col(0).maxCoeff() - s.q.col(0).minCoeff() > 1e-8);
}

TEST_CASE("run emits diagnostics and snapshots") {
  const MixtureModel m = model_two_gases();
  const Basis b = build_basis(2);
  const Grid1D g = Grid1D::uniform(1.0, 16);
  const FieldState s = uniform_state(m, b, g, 1.1, (Vec(2) << 1.0, 0.5).finished());
  StepConfig cfg;
  cfg.dt = 1e-3;
  cfg.k_levels = {10.0, 2.0};
  const RunResult res = run(m, b, g, basic_inputs(), BoundarySpec::insulated(), s, cfg,
                            20e-3, 10);
  CHECK(res.diagnostics.size() == 20);
  CHECK(res.snapshots.size() == 3); // initial + 2 cadence snapshots
  for (const auto& d : res.diagnostics) {
    CHECK(d.t > 0.0);
    CHECK(d.fp_iters >= 1);
    CHECK(rel_err(d.energy, res.diagnostics.front().energy) < 1e-12);
    CHECK(rel_err(d.entropy, res.diagnostics.front().entropy) < 1e-12);
  }
}

TEST_CASE("truncation functional") {
  const MixtureModel m = model_two_gases();
  const Basis b = build_basis(2);
  const Grid1D g = Grid1D::uniform(2.0, 16);
  const Vec rho = (Vec(2) << 1.0, 0.5).finished();
  const double T = 1.3;
  const FieldState s = uniform_state(m, b, g, T, rho);
  const double eps = internal_energy(m, T, rho);
  SUBCASE("level above the maximum gives zero") {
    const auto E = diagnostics_truncation(s, m, b, g, {eps + 1.0});
    CHECK(E[0] == 0.0);
  }
  SUBCASE("uniform state, k = eps - 1 gives varrho * L") {
    const auto E = diagnostics_truncation(s, m, b, g, {eps - 1.0});
    CHECK(E[0] == doctest::Approx(rho.sum() * g.L).epsilon(1e-9));
  }
  SUBCASE("nonincreasing in k") {
    const auto E =
        diagnostics_truncation(s, m, b, g, {eps - 2.0, eps - 1.0, eps - 0.5});
    CHECK(E[0] >= E[1]);
    CHECK(E[1] >= E[2]);
  }
}
