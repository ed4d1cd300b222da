#include "loggas/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "loggas/transforms.hpp"

namespace loggas {

using nlohmann::json;

namespace {

template <class T>
void take(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("scenario field '") + key + "' has the wrong type");
  }
}

const char* initial_name(InitialKind k) {
  switch (k) {
    case InitialKind::ScaledSemicircle: return "scaled-semicircle";
    case InitialKind::QuarticEquilibrium: return "quartic-equilibrium";
    case InitialKind::Equilibrium: return "equilibrium";
    case InitialKind::Tabulated: return "tabulated";
  }
  return "?";
}

}  // namespace

void Scenario::validate() const {
  if (schema != kScenarioSchema) throw ConfigError("unsupported scenario schema '" + schema + "'");
  if (!(beta >= 1.0)) throw ConfigError("beta ≥ 1 required");
  if (N < 1) throw ConfigError("N ≥ 1 required");
  if (!(horizon > 0.0)) throw ConfigError("horizon > 0 required");
  if (!(dt > 0.0)) throw ConfigError("dt > 0 required");
  if (replicas < 2) throw ConfigError("replicas ≥ 2 required");
  if (snapshots < 1) throw ConfigError("snapshots ≥ 1 required");
  if (!(tol.ode_atol > 0.0 && tol.ode_rtol > 0.0 && tol.plemelj_eps > 0.0 && tol.edge_bisect > 0.0))
    throw ConfigError("all tolerances must be > 0");
  if (potential_family == "harmonic") {
    if (!(kappa > 0.0)) throw ConfigError("kappa > 0 required");
  } else if (potential_family != "quartic" && potential_family != "polynomial") {
    throw ConfigError("unknown potential family '" + potential_family + "'");
  }
  if (initial == InitialKind::ScaledSemicircle && !(s0 > 0.0)) throw ConfigError("s0 > 0 required");
  if (initial == InitialKind::QuarticEquilibrium && potential_family != "quartic")
    throw ConfigError("quartic-equilibrium initial data needs the quartic potential");
  if (initial == InitialKind::Tabulated && tabulated_path.empty()) throw ConfigError("tabulated initial data needs a path");
  if (ou.nmax < 1 || !(ou.dt > 0.0) || !(ou.t_end > 0.0) || ou.record_every < 1)
    throw ConfigError("ou block: nmax ≥ 1, dt > 0, t_end > 0, record_every ≥ 1 required");
  for (double d : kernel.dt)
    if (!(d >= 0.0)) throw ConfigError("kernel dt values must be ≥ 0");
  make_potential();
}

std::shared_ptr<const Potential> Scenario::make_potential() const {
  if (potential_family == "harmonic") return std::make_shared<Potential>(Potential::harmonic(kappa));
  if (potential_family == "quartic") return std::make_shared<Potential>(Potential::quartic(c));
  return std::make_shared<Potential>(coeffs, alpha);
}

std::shared_ptr<const Density> Scenario::make_equilibrium() const { return equilibrium_density(*make_potential(), beta); }

std::shared_ptr<const Density> Scenario::make_initial() const {
  switch (initial) {
    case InitialKind::ScaledSemicircle: {
      if (potential_family != "harmonic") throw ConfigError("scaled-semicircle initial data needs the harmonic potential");
      return std::make_shared<SemicircleDensity>(std::sqrt(beta / kappa) * s0);
    }
    case InitialKind::QuarticEquilibrium:
    case InitialKind::Equilibrium: return make_equilibrium();
    case InitialKind::Tabulated: {
      GridFunction g = read_grid_csv(tabulated_path);
      return std::make_shared<TabulatedDensity>(g.xs, g.values);
    }
  }
  throw ConfigError("unknown initial data");
}

std::vector<double> Scenario::times() const {
  std::vector<double> ts;
  for (int k = 1; k <= snapshots; ++k) ts.push_back(horizon * k / snapshots);
  return ts;
}

Scenario parse_scenario(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  Scenario s;
  if (!j.contains("schema")) throw ConfigError("scenario lacks a schema field");
  take(j, "schema", s.schema);
  if (j.contains("potential")) {
    const json& p = j["potential"];
    take(p, "family", s.potential_family);
    take(p, "kappa", s.kappa);
    take(p, "c", s.c);
    take(p, "coeffs", s.coeffs);
    take(p, "alpha", s.alpha);
  }
  take(j, "beta", s.beta);
  if (j.contains("initial")) {
    const json& in = j["initial"];
    std::string kind = "scaled-semicircle";
    take(in, "kind", kind);
    if (kind == "scaled-semicircle") s.initial = InitialKind::ScaledSemicircle;
    else if (kind == "quartic-equilibrium") s.initial = InitialKind::QuarticEquilibrium;
    else if (kind == "equilibrium") s.initial = InitialKind::Equilibrium;
    else if (kind == "tabulated") s.initial = InitialKind::Tabulated;
    else throw ConfigError("unknown initial kind '" + kind + "'");
    take(in, "s0", s.s0);
    take(in, "path", s.tabulated_path);
    if (!s.tabulated_path.empty() && std::filesystem::path(s.tabulated_path).is_relative())
      s.tabulated_path = (std::filesystem::path(base_dir) / s.tabulated_path).string();
  }
  take(j, "N", s.N);
  take(j, "horizon", s.horizon);
  take(j, "dt", s.dt);
  take(j, "replicas", s.replicas);
  take(j, "seed", s.seed);
  take(j, "output", s.output);
  take(j, "snapshots", s.snapshots);
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    take(t, "ode_atol", s.tol.ode_atol);
    take(t, "ode_rtol", s.tol.ode_rtol);
    take(t, "plemelj_eps", s.tol.plemelj_eps);
    take(t, "edge_bisect", s.tol.edge_bisect);
  }
  if (j.contains("kernel")) {
    const json& k = j["kernel"];
    take(k, "x2", s.kernel.x2);
    take(k, "x1", s.kernel.x1);
    take(k, "dt", s.kernel.dt);
  }
  if (j.contains("ou")) {
    const json& o = j["ou"];
    take(o, "nmax", s.ou.nmax);
    take(o, "dt", s.ou.dt);
    take(o, "t_end", s.ou.t_end);
    take(o, "record_every", s.ou.record_every);
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scenario " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string scenario_json(const Scenario& s) {
  json j;
  j["schema"] = s.schema;
  j["potential"] = {{"family", s.potential_family}, {"kappa", s.kappa}, {"c", s.c}, {"coeffs", s.coeffs}, {"alpha", s.alpha}};
  j["beta"] = s.beta;
  j["initial"] = {{"kind", initial_name(s.initial)}, {"s0", s.s0}, {"path", s.tabulated_path}};
  j["N"] = s.N;
  j["horizon"] = s.horizon;
  j["dt"] = s.dt;
  j["replicas"] = s.replicas;
  j["seed"] = s.seed;
  j["output"] = s.output;
  j["snapshots"] = s.snapshots;
  j["tolerances"] = {{"ode_atol", s.tol.ode_atol}, {"ode_rtol", s.tol.ode_rtol}, {"plemelj_eps", s.tol.plemelj_eps},
                     {"edge_bisect", s.tol.edge_bisect}};
  j["kernel"] = {{"x2", s.kernel.x2}, {"x1", s.kernel.x1}, {"dt", s.kernel.dt}};
  j["ou"] = {{"nmax", s.ou.nmax}, {"dt", s.ou.dt}, {"t_end", s.ou.t_end}, {"record_every", s.ou.record_every}};
  return j.dump(2);
}

}  // namespace loggas
