#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "mixflow/analysis.hpp"
#include "mixflow/config.hpp"
#include "mixflow/csv.hpp"
#include "mixflow/errors.hpp"

namespace fs = std::filesystem;
using namespace mixflow;

namespace {

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  bool quiet = false;
};

std::ofstream open_out(const Options& opt, const std::string& name) {
  fs::create_directories(opt.out_dir);
  std::ofstream f(fs::path(opt.out_dir) / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + name);
  return f;
}

void info(const Options& opt, const std::string& line) {
  if (!opt.quiet) std::cout << line << "\n";
}

int cmd_validate(const Options& opt) {
  const ScenarioConfig cfg = load_config(opt.config_path);
  bool ok = true;
  bool any_ideal = false;
  for (size_t i = 0; i < cfg.species.size(); ++i) {
    const auto& s = cfg.species[i];
    if (s.variant == GibbsVariant::IdealGas) any_ideal = true;
    const ValidationReport rep = validate_species(s, cfg.ref);
    const std::string label =
        "species[" + std::to_string(i) + "]" + (s.name.empty() ? "" : " " + s.name);
    if (rep.ok()) {
      info(opt, label + ": ok");
    } else {
      ok = false;
      for (const auto& v : rep.violations) std::cout << label + ": FAIL " + v << "\n";
    }
  }
  if (!ok) return 1;
  if (!any_ideal)
    std::cout << "warning: no ideal-gas species present; the dual domain may not "
                 "cover all of R^N x R_-\n";

  const MixtureModel m = cfg.model();
  const SolverInputs in = cfg.solver_inputs();

  // Transport structure at a few states.
  std::mt19937_64 rng(cfg.seed ? cfg.seed : 12345);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto rand_T = [&] { return std::pow(10.0, -1.0 + 3.0 * u(rng)); };
  auto rand_rho = [&] {
    Vec r(m.n());
    for (int i = 0; i < m.n(); ++i) r[i] = std::pow(10.0, -1.0 + 2.0 * u(rng));
    return r;
  };
  for (int k = 0; k < 5; ++k) {
    const double T = rand_T();
    const Vec rho = rand_rho();
    const OnsagerMatrices om = build_onsager(in.onsager, T, rho);
    Eigen::SelfAdjointEigenSolver<Mat> es(om.Mext);
    const double scale = std::max(1.0, om.Mext.cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
      std::cout << "transport: FAIL extended Onsager matrix not PSD\n";
      return 1;
    }
  }
  info(opt, "transport: ok");

  // Dual round-trip smoke test.
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double T = rand_T();
    const Vec rho = rand_rho();
    const double rhou = internal_energy(m, T, rho);
    const ConservedState w{rho, rhou};
    const Vec ws = grad_h(m, w);
    const ConservedState back = grad_hstar(m, DualState{ws});
    double err = std::abs(back.rhou - rhou) / std::max(1.0, std::abs(rhou));
    for (int i = 0; i < m.n(); ++i)
      err = std::max(err, std::abs(back.rho[i] - rho[i]) / rho[i]);
    worst = std::max(worst, err);
  }
  if (worst > 1e-9) {
    std::cout << "legendre round-trip: FAIL worst relative error "
              << format_double(worst) << "\n";
    return 1;
  }
  info(opt, "legendre round-trip: ok (worst " + format_double(worst) + ")");
  info(opt, "all checks passed");
  return 0;
}

int cmd_simulate(const Options& opt) {
  const ScenarioConfig cfg = load_config(opt.config_path);
  const MixtureModel m = cfg.model();
  if (m.n() < 2) throw ValidationError("simulate: needs at least two species");
  const Basis b = build_basis(m.n());
  const Grid1D g = cfg.grid();
  const SolverInputs in = cfg.solver_inputs();
  const BoundarySpec bc = cfg.boundary();
  const StepConfig sc = cfg.step_config();
  const FieldState s0 = cfg.initial_state(m, b, g);

  RunResult res;
  try {
    res = run(m, b, g, in, bc, s0, sc, cfg.t_end, cfg.snapshot_every);
  } catch (const DomainExit& e) {
    std::cout << "DomainExit at t=" << format_double(e.t) << ": " << e.what() << "\n";
    return 3;
  } catch (const FixedPointDiverged& e) {
    std::cout << "FixedPointDiverged at t=" << format_double(e.t) << ": " << e.what()
              << "\n";
    return 3;
  } catch (const CFLViolation& e) {
    std::cout << "CFLViolation at t=" << format_double(e.t) << ": " << e.what() << "\n";
    return 3;
  }

  {
    auto f = open_out(opt, "diagnostics.csv");
    CsvWriter csv(f);
    std::vector<std::string> names{"t"};
    for (int i = 0; i < m.n(); ++i) names.push_back("mass_" + std::to_string(i + 1));
    names.insert(names.end(), {"energy", "entropy", "sup_qN", "min_varrho", "max_T"});
    for (size_t k = 0; k < sc.k_levels.size(); ++k)
      names.push_back("E_k" + std::to_string(k + 1));
    names.push_back("fp_iters");
    csv.header(names);
    for (const Diagnostics& d : res.diagnostics) {
      csv.field(d.t);
      for (int i = 0; i < m.n(); ++i) csv.field(d.species_mass[i]);
      csv.field(d.energy);
      csv.field(d.entropy);
      csv.field(d.sup_qN);
      csv.field(d.min_varrho);
      csv.field(d.max_T);
      for (double e : d.truncation) csv.field(e);
      csv.field(static_cast<long long>(d.fp_iters));
      csv.end_row();
    }
  }
  int snap_id = 0;
  for (const FieldState& s : res.snapshots) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%04d.csv", snap_id++);
    auto f = open_out(opt, name);
    CsvWriter csv(f);
    std::vector<std::string> names{"x", "varrho"};
    for (int k = 0; k < m.n(); ++k) names.push_back("q_" + std::to_string(k + 1));
    names.push_back("v");
    names.push_back("T");
    for (int i = 0; i < m.n(); ++i) names.push_back("rho_" + std::to_string(i + 1));
    names.push_back("p");
    csv.header(names);
    for (int j = 0; j < g.J; ++j) {
      const EntropicEval e = evaluate(m, b, s.varrho[j], s.q.row(j).transpose());
      csv.field(g.x[j]);
      csv.field(s.varrho[j]);
      for (int k = 0; k < m.n(); ++k) csv.field(s.q(j, k));
      csv.field(s.v[j]);
      csv.field(e.T);
      for (int i = 0; i < m.n(); ++i) csv.field(e.rho[i]);
      csv.field(e.p);
      csv.end_row();
    }
  }
  info(opt, "simulate: " + std::to_string(res.diagnostics.size()) + " steps, " +
                std::to_string(snap_id) + " snapshots written");
  return 0;
}

int cmd_check_growth(const Options& opt, const std::string& p_override) {
  const ScenarioConfig cfg = load_config(opt.config_path);
  if (!cfg.has_growth_spec)
    throw ValidationError("check-growth: config lacks a 'growth_spec' block");
  const MixtureModel m = cfg.model();
  Rational p = cfg.growth_p;
  if (!p_override.empty()) p = Rational::parse(p_override);
  const GrowthReport rep = check_growth(m, p, cfg.growth_spec);
  if (rep.pass) {
    std::cout << "PASS (beta=" << rep.beta.str() << ", s0=" << rep.s0.str()
              << ", s1=" << rep.s1.str() << ")\n";
    return 0;
  }
  std::cout << "FAIL: " << rep.violated << "\n";
  return 1;
}

int cmd_asymptotics(const Options& opt) {
  const ScenarioConfig cfg = load_config(opt.config_path);
  const MixtureModel m = cfg.model();
  if (m.n() < 2) throw ValidationError("asymptotics: needs at least two species");
  const Basis b = build_basis(m.n());
  std::vector<std::string> quantities = cfg.asym_quantities;
  if (quantities.empty()) {
    quantities = {"rhou", "rhoH", "cv", "pressure", "d0"};
    const DominanceReport dom = dominant_species(m);
    for (int i = 0; i < m.n(); ++i)
      if (i != dom.dominant_index) quantities.push_back("rho:" + std::to_string(i));
  }
  auto f = open_out(opt, "asymptotics.csv");
  CsvWriter csv(f);
  csv.header({"quantity", "slope", "predicted", "T_lo", "T_hi", "residual"});
  for (const auto& q : quantities) {
    const AsymptoticFit fit =
        fit_asymptotics(m, b, cfg.asym_varrho, cfg.asym_qbar, cfg.asym_range, q);
    csv.field(fit.quantity);
    csv.field(fit.slope);
    csv.field(fit.predicted);
    csv.field(fit.T_lo);
    csv.field(fit.T_hi);
    csv.field(fit.residual);
    csv.end_row();
    info(opt, q + ": slope " + format_double(fit.slope) +
                  (std::isnan(fit.predicted)
                       ? std::string(" (decay form)")
                       : " (predicted " + format_double(fit.predicted) + ")"));
  }
  return 0;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

int cmd_tabulate(const Options& opt, const std::string& T_list,
                 const std::string& rho_list) {
  const ScenarioConfig cfg = load_config(opt.config_path);
  const MixtureModel m = cfg.model();
  const std::vector<double> Ts = parse_list(T_list);
  std::vector<Vec> rhos;
  std::stringstream ss(rho_list);
  std::string group;
  while (std::getline(ss, group, ';')) {
    const std::vector<double> r = parse_list(group);
    if (static_cast<int>(r.size()) != m.n())
      throw ValidationError("tabulate: each rho group needs one entry per species");
    rhos.push_back(Eigen::Map<const Vec>(r.data(), r.size()));
  }
  if (Ts.empty() || rhos.empty())
    throw ValidationError("tabulate: provide --T and --rho lists");

  auto f = open_out(opt, "eos_table.csv");
  CsvWriter csv(f);
  std::vector<std::string> names{"T"};
  for (int i = 0; i < m.n(); ++i) names.push_back("rho_" + std::to_string(i + 1));
  names.insert(names.end(), {"p", "rhou", "rhos", "cv"});
  for (int i = 0; i < m.n(); ++i) names.push_back("mu_" + std::to_string(i + 1));
  csv.header(names);
  for (const double T : Ts) {
    for (const Vec& rho : rhos) {
      csv.field(T);
      for (int i = 0; i < m.n(); ++i) csv.field(rho[i]);
      csv.field(pressure(m, T, rho));
      csv.field(internal_energy(m, T, rho));
      csv.field(-entropy_density_neg(m, T, rho));
      csv.field(heat_capacity(m, T, rho));
      const Vec mu = chemical_potentials(m, T, rho);
      for (int i = 0; i < m.n(); ++i) csv.field(mu[i]);
      csv.end_row();
    }
  }
  info(opt, "tabulate: " + std::to_string(Ts.size() * rhos.size()) + " rows written");
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"multicomponent-fluid thermodynamics toolkit and 1-D simulator"};
  app.require_subcommand(1);
  Options opt;
  std::string p_override, T_list, rho_list;

  auto add_common = [&](CLI::App* sub, bool need_config = true) {
    auto* o = sub->add_option("--config", opt.config_path, "scenario JSON path");
    if (need_config) o->required();
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_flag("--quiet", opt.quiet, "suppress informational output");
  };

  auto* validate = app.add_subcommand("validate", "check model and closure structure");
  add_common(validate);
  auto* simulate = app.add_subcommand("simulate", "run the 1-D scenario");
  add_common(simulate);
  auto* growth = app.add_subcommand("check-growth",
                                    "test coefficient growth exponents against the "
                                    "temperature maximum principle window");
  add_common(growth);
  growth->add_option("--p", p_override, "integrability exponent p > 5 (fraction ok)");
  auto* asym = app.add_subcommand("asymptotics", "fit large-T exponents");
  add_common(asym);
  auto* tab = app.add_subcommand("tabulate", "equation-of-state table");
  add_common(tab);
  tab->add_option("--T", T_list, "comma-separated temperatures")->required();
  tab->add_option("--rho", rho_list,
                  "semicolon-separated density groups, e.g. '1,1;2,0.5'")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(opt);
    if (simulate->parsed()) return cmd_simulate(opt);
    if (growth->parsed()) return cmd_check_growth(opt, p_override);
    if (asym->parsed()) return cmd_asymptotics(opt);
    if (tab->parsed()) return cmd_tabulate(opt, T_list, rho_list);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
