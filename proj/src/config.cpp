#include "mixflow/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mixflow/errors.hpp"

namespace mixflow {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ValidationError("config: unknown key '" + where + it.key() + "'");
}

double num(const json& obj, const std::string& where, const std::string& key,
           double dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_number())
    throw ValidationError("config: '" + where + key + "' must be a number");
  return obj[key].get<double>();
}

double num_req(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key))
    throw ValidationError("config: missing required key '" + where + key + "'");
  if (!obj[key].is_number())
    throw ValidationError("config: '" + where + key + "' must be a number");
  return obj[key].get<double>();
}

Vec vec_of(const json& arr, const std::string& where) {
  if (!arr.is_array())
    throw ValidationError("config: '" + where + "' must be an array of numbers");
  Vec v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number())
      throw ValidationError("config: '" + where + "' must contain only numbers");
    v[i] = arr[i].get<double>();
  }
  return v;
}

Rational rational_of(const json& v, const std::string& where) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number()) return Rational::from_double(v.get<double>());
  throw ValidationError("config: '" + where + "' must be a number or a fraction string");
}

} // namespace

ScenarioConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  reject_unknown(root, "",
                 {"schema", "reference", "species", "transport", "solver", "boundary",
                  "initial", "forces", "growth_spec", "asymptotics", "seed"});
  ScenarioConfig c;
  if (!root.contains("schema") || !root["schema"].is_number_integer())
    throw ValidationError("config: missing integer key 'schema'");
  c.schema = root["schema"].get<int>();
  if (c.schema != 1) throw ValidationError("config: unsupported schema version");

  if (root.contains("reference")) {
    const json& r = root["reference"];
    reject_unknown(r, "reference.", {"p0", "T0"});
    c.ref.p0 = num(r, "reference.", "p0", 1.0);
    c.ref.T0 = num(r, "reference.", "T0", 1.0);
    if (!(c.ref.p0 > 0.0)) throw ValidationError("config: 'reference.p0' must be > 0");
    if (!(c.ref.T0 > 0.0)) throw ValidationError("config: 'reference.T0' must be > 0");
  }

  if (!root.contains("species") || !root["species"].is_array() ||
      root["species"].empty())
    throw ValidationError("config: 'species' must be a non-empty array");
  for (const json& sj : root["species"]) {
    reject_unknown(sj, "species[].",
                   {"name", "variant", "alpha", "beta", "gamma", "c0", "rhoR", "g1",
                    "g0", "molar_mass"});
    SpeciesParams s;
    if (!sj.contains("variant") || !sj["variant"].is_string())
      throw ValidationError("config: 'species[].variant' must be a string");
    const std::string v = sj["variant"].get<std::string>();
    if (v == "ideal_gas") {
      s.variant = GibbsVariant::IdealGas;
      if (sj.contains("alpha") || sj.contains("beta") || sj.contains("gamma"))
        throw ValidationError(
            "config: 'species[].alpha/beta/gamma' apply to the tait variant only");
    } else if (v == "tait") {
      s.variant = GibbsVariant::Tait;
      s.alpha = num_req(sj, "species[].", "alpha");
      s.beta = num_req(sj, "species[].", "beta");
      s.gamma = num_req(sj, "species[].", "gamma");
    } else {
      throw ValidationError("config: 'species[].variant' must be 'tait' or 'ideal_gas'");
    }
    s.c0 = num_req(sj, "species[].", "c0");
    s.rhoR = num_req(sj, "species[].", "rhoR");
    s.g1 = num(sj, "species[].", "g1", 0.0);
    s.g0 = num(sj, "species[].", "g0", 0.0);
    s.molar_mass = num(sj, "species[].", "molar_mass", 1.0);
    if (sj.contains("name")) s.name = sj["name"].get<std::string>();
    c.species.push_back(s);
  }
  const int N = static_cast<int>(c.species.size());
  c.ltilde0 = Vec::Zero(N);
  c.rho_init = Vec::Ones(N);
  c.rho_amplitudes = Vec::Zero(N);
  c.asym_qbar = Vec::Zero(std::max(0, N - 1));

  if (root.contains("transport")) {
    const json& t = root["transport"];
    reject_unknown(t, "transport.", {"mobility", "kappa", "ltilde", "viscosity"});
    if (t.contains("mobility")) {
      reject_unknown(t["mobility"], "transport.mobility.", {"d0", "exponent"});
      c.mobility0 = num(t["mobility"], "transport.mobility.", "d0", 1.0);
      c.mobility_exp = num(t["mobility"], "transport.mobility.", "exponent", 0.0);
      if (!(c.mobility0 > 0.0))
        throw ValidationError("config: 'transport.mobility.d0' must be > 0");
    }
    if (t.contains("kappa")) {
      reject_unknown(t["kappa"], "transport.kappa.", {"kappa0", "exponent"});
      c.kappa0 = num(t["kappa"], "transport.kappa.", "kappa0", 1.0);
      c.kappa_exp = num(t["kappa"], "transport.kappa.", "exponent", 0.0);
      if (!(c.kappa0 > 0.0))
        throw ValidationError("config: 'transport.kappa.kappa0' must be > 0");
    }
    if (t.contains("ltilde")) {
      reject_unknown(t["ltilde"], "transport.ltilde.", {"l0", "exponent"});
      if (t["ltilde"].contains("l0")) {
        c.ltilde0 = vec_of(t["ltilde"]["l0"], "transport.ltilde.l0");
        if (c.ltilde0.size() != N)
          throw ValidationError("config: 'transport.ltilde.l0' must have one entry "
                                "per species");
      }
      c.ltilde_exp = num(t["ltilde"], "transport.ltilde.", "exponent", 0.0);
    }
    if (t.contains("viscosity")) {
      reject_unknown(t["viscosity"], "transport.viscosity.",
                     {"eta0", "eta_exponent", "lambda0", "lambda_exponent"});
      c.eta0 = num(t["viscosity"], "transport.viscosity.", "eta0", 0.0);
      c.eta_exp = num(t["viscosity"], "transport.viscosity.", "eta_exponent", 0.0);
      c.lambda0 = num(t["viscosity"], "transport.viscosity.", "lambda0", 0.0);
      c.lambda_exp =
          num(t["viscosity"], "transport.viscosity.", "lambda_exponent", 0.0);
      if (c.eta0 < 0.0)
        throw ValidationError("config: 'transport.viscosity.eta0' must be >= 0");
    }
  }

  if (root.contains("solver")) {
    const json& s = root["solver"];
    reject_unknown(s, "solver.",
                   {"grid", "dt", "t_end", "fp_tol", "fp_maxiter", "cfl_max",
                    "k_levels", "snapshot_every"});
    if (s.contains("grid")) {
      reject_unknown(s["grid"], "solver.grid.", {"length", "cells"});
      c.grid_length = num(s["grid"], "solver.grid.", "length", 1.0);
      if (s["grid"].contains("cells")) c.grid_cells = s["grid"]["cells"].get<int>();
      if (c.grid_cells < 8)
        throw ValidationError("config: 'solver.grid.cells' must be >= 8");
    }
    c.dt = num(s, "solver.", "dt", 1e-3);
    if (!(c.dt > 0.0)) throw ValidationError("config: 'solver.dt' must be > 0");
    c.t_end = num(s, "solver.", "t_end", 0.1);
    c.fp_tol = num(s, "solver.", "fp_tol", 1e-9);
    if (s.contains("fp_maxiter")) c.fp_maxiter = s["fp_maxiter"].get<int>();
    c.cfl_max = num(s, "solver.", "cfl_max", 0.5);
    if (!(c.cfl_max > 0.0 && c.cfl_max <= 1.0))
      throw ValidationError("config: 'solver.cfl_max' must be in (0, 1]");
    if (s.contains("k_levels")) {
      const Vec k = vec_of(s["k_levels"], "solver.k_levels");
      c.k_levels.assign(k.data(), k.data() + k.size());
    }
    if (s.contains("snapshot_every"))
      c.snapshot_every = s["snapshot_every"].get<int>();
  }

  if (root.contains("boundary")) {
    const json& bj = root["boundary"];
    reject_unknown(bj, "boundary.", {"type", "alpha", "T_ext"});
    if (!bj.contains("type") || !bj["type"].is_string())
      throw ValidationError("config: 'boundary.type' must be a string");
    c.boundary_type = bj["type"].get<std::string>();
    if (c.boundary_type == "robin") {
      c.robin_alpha = num_req(bj, "boundary.", "alpha");
      c.robin_T_ext = num_req(bj, "boundary.", "T_ext");
      if (!(c.robin_alpha >= 0.0))
        throw ValidationError("config: 'boundary.alpha' must be >= 0");
    } else if (c.boundary_type != "insulated") {
      throw ValidationError("config: 'boundary.type' must be 'insulated' or 'robin'");
    }
  }

  if (root.contains("initial")) {
    const json& ij = root["initial"];
    reject_unknown(ij, "initial.",
                   {"type", "T", "rho", "v", "T_amplitude", "rho_amplitudes",
                    "v_amplitude", "modes"});
    if (ij.contains("type")) c.initial_type = ij["type"].get<std::string>();
    if (c.initial_type != "uniform" && c.initial_type != "sinusoidal")
      throw ValidationError("config: 'initial.type' must be 'uniform' or 'sinusoidal'");
    c.T_init = num(ij, "initial.", "T", 1.0);
    if (ij.contains("rho")) {
      c.rho_init = vec_of(ij["rho"], "initial.rho");
      if (c.rho_init.size() != N)
        throw ValidationError("config: 'initial.rho' must have one entry per species");
    }
    c.v_init = num(ij, "initial.", "v", 0.0);
    c.T_amplitude = num(ij, "initial.", "T_amplitude", 0.0);
    if (ij.contains("rho_amplitudes")) {
      c.rho_amplitudes = vec_of(ij["rho_amplitudes"], "initial.rho_amplitudes");
      if (c.rho_amplitudes.size() != N)
        throw ValidationError(
            "config: 'initial.rho_amplitudes' must have one entry per species");
    }
    c.v_amplitude = num(ij, "initial.", "v_amplitude", 0.0);
    if (ij.contains("modes")) c.modes = ij["modes"].get<int>();
  }

  if (root.contains("forces")) {
    const json& fj = root["forces"];
    reject_unknown(fj, "forces.", {"type", "b"});
    const std::string ft = fj.contains("type") ? fj["type"].get<std::string>() : "none";
    if (ft == "constant") {
      c.has_forces = true;
      c.force_b = vec_of(fj["b"], "forces.b");
      if (c.force_b.size() != N)
        throw ValidationError("config: 'forces.b' must have one entry per species");
    } else if (ft != "none") {
      throw ValidationError("config: 'forces.type' must be 'none' or 'constant'");
    }
  }

  if (root.contains("growth_spec")) {
    const json& gj = root["growth_spec"];
    reject_unknown(gj, "growth_spec.",
                   {"p", "kappa_lower", "kappa_upper", "l", "M", "eta", "lambda"});
    c.has_growth_spec = true;
    if (gj.contains("p")) c.growth_p = rational_of(gj["p"], "growth_spec.p");
    auto field = [&](const char* k) -> Rational {
      if (!gj.contains(k))
        throw ValidationError(std::string("config: missing 'growth_spec.") + k + "'");
      return rational_of(gj[k], std::string("growth_spec.") + k);
    };
    c.growth_spec.kappa_lower = field("kappa_lower");
    c.growth_spec.kappa_upper = field("kappa_upper");
    c.growth_spec.l = field("l");
    c.growth_spec.M = field("M");
    c.growth_spec.eta = field("eta");
    c.growth_spec.lambda = field("lambda");
  }

  if (root.contains("asymptotics")) {
    const json& aj = root["asymptotics"];
    reject_unknown(aj, "asymptotics.",
                   {"varrho", "qbar", "T_min", "T_max", "points", "quantities"});
    c.asym_varrho = num(aj, "asymptotics.", "varrho", 1.0);
    if (aj.contains("qbar")) {
      c.asym_qbar = vec_of(aj["qbar"], "asymptotics.qbar");
      if (c.asym_qbar.size() != N - 1)
        throw ValidationError("config: 'asymptotics.qbar' must have N-1 entries");
    }
    c.asym_range.lo = num(aj, "asymptotics.", "T_min", 1e2);
    c.asym_range.hi = num(aj, "asymptotics.", "T_max", 1e6);
    if (aj.contains("points")) c.asym_range.points = aj["points"].get<int>();
    if (aj.contains("quantities"))
      for (const json& q : aj["quantities"])
        c.asym_quantities.push_back(q.get<std::string>());
  }

  if (root.contains("seed")) c.seed = root["seed"].get<unsigned long long>();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

MixtureModel ScenarioConfig::model() const { return make_mixture(species, ref); }

Grid1D ScenarioConfig::grid() const { return Grid1D::uniform(grid_length, grid_cells); }

StepConfig ScenarioConfig::step_config() const {
  StepConfig s;
  s.dt = dt;
  s.fp_tol = fp_tol;
  s.fp_maxiter = fp_maxiter;
  s.cfl_max = cfl_max;
  s.k_levels = k_levels;
  return s;
}

BoundarySpec ScenarioConfig::boundary() const {
  if (boundary_type == "robin") return BoundarySpec::robin(robin_alpha, robin_T_ext);
  return BoundarySpec::insulated();
}

SolverInputs ScenarioConfig::solver_inputs() const {
  SolverInputs in;
  const double d0 = mobility0, dm = mobility_exp;
  in.onsager.mobility = [d0, dm](double T, const Vec&) { return d0 * std::pow(T, dm); };
  const double k0 = kappa0, ks = kappa_exp;
  in.onsager.kappatilde = [k0, ks](double T, const Vec&) {
    return k0 * std::pow(T, ks);
  };
  const Vec l0 = ltilde0;
  const double le = ltilde_exp;
  in.onsager.ltilde = [l0, le](double T, const Vec&) {
    return (l0 * std::pow(T, le)).eval();
  };
  const double e0 = eta0, ee = eta_exp, la0 = lambda0, lae = lambda_exp;
  in.eta = [e0, ee](double T, const Vec&) { return e0 * std::pow(T, ee); };
  in.lambda = [la0, lae](double T, const Vec&) { return la0 * std::pow(T, lae); };
  if (has_forces) {
    const Vec b = force_b;
    in.forces = [b](double, double) { return b; };
  }
  return in;
}

FieldState ScenarioConfig::initial_state(const MixtureModel& m, const Basis& b,
                                         const Grid1D& g) const {
  const double L = grid_length;
  const double two_pi_m = 2.0 * std::numbers::pi * modes;
  auto shape = [two_pi_m, L](double x) { return std::sin(two_pi_m * x / L); };
  const bool sine = initial_type == "sinusoidal";
  auto T0 = [this, sine, shape](double x) {
    return T_init + (sine ? T_amplitude * shape(x) : 0.0);
  };
  auto rho0 = [this, sine, shape](double x) {
    Vec r = rho_init;
    if (sine) r += rho_amplitudes * shape(x);
    return r;
  };
  auto v0 = [this, sine, shape](double x) {
    return v_init + (sine ? v_amplitude * shape(x) : 0.0);
  };
  return init_from_primal(m, b, g, T0, rho0, v0);
}

} // namespace mixflow
