#include "semiflow/config.hpp"

#include <cmath>
#include <fstream>

namespace semiflow::cli {

using nlohmann::json;

namespace {

double num_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  if (!j[key].is_number()) {
    throw ConfigError(std::string("config: field '") + key +
                      "' must be a number");
  }
  return j[key].get<double>();
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  return resolve_config(std::move(doc));
}

RunConfig resolve_config(json doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be object");
  doc["version"] = doc.value("version", 1);
  if (!doc.contains("model") || !doc["model"].is_object() ||
      !doc["model"].contains("name")) {
    throw ConfigError("config: missing model.name");
  }
  if (!doc.contains("basis") || !doc["basis"].is_object()) {
    throw ConfigError("config: missing basis object");
  }
  json& b = doc["basis"];
  b["dim"] = b.value("dim", 1);
  if (!b.contains("lengths")) b["lengths"] = json::array({1.0});
  if (!b.contains("modes")) throw ConfigError("config: missing basis.modes");
  b["bc"] = b.value("bc", std::string("neumann"));
  if (!b.contains("grid")) {
    json g = json::array();
    for (const auto& m : b["modes"]) g.push_back(2 * m.get<int>());
    b["grid"] = g;
  }
  if (!doc.contains("mesh")) doc["mesh"] = json::object();
  json& m = doc["mesh"];
  m["T"] = num_or(m, "T", 1.0);
  m["N"] = m.value("N", 64);
  if (!m.contains("r")) m["r"] = nullptr;
  if (!doc.contains("seed")) doc["seed"] = 1;
  if (!doc.contains("picard")) doc["picard"] = json::object();
  doc["picard"]["tol"] = num_or(doc["picard"], "tol", 1e-10);
  doc["picard"]["max_iter"] = doc["picard"].value("max_iter", 40);
  if (!doc.contains("reference")) doc["reference"] = json::object();
  doc["reference"]["steps"] = doc["reference"].value("steps", 100);
  doc["reference"]["tol"] = num_or(doc["reference"], "tol", 1e-10);

  RunConfig cfg;
  cfg.out_dir = doc.value("out", std::string());
  cfg.doc = std::move(doc);
  return cfg;
}

BasisPtr make_basis(const RunConfig& cfg) {
  const json& b = cfg.doc["basis"];
  BasisSpec spec;
  spec.dim = b["dim"].get<int>();
  if (spec.dim < 1 || spec.dim > 2) {
    throw ConfigError("config: basis.dim must be 1 or 2");
  }
  const std::string bc = b["bc"].get<std::string>();
  if (bc == "neumann") {
    spec.bc = Bc::Neumann;
  } else if (bc == "dirichlet") {
    spec.bc = Bc::Dirichlet;
  } else {
    throw ConfigError("config: basis.bc must be neumann or dirichlet");
  }
  for (int ax = 0; ax < spec.dim; ++ax) {
    spec.lengths[ax] = b["lengths"][ax].get<double>();
    spec.modes[ax] = b["modes"][ax].get<int>();
    spec.grid[ax] = b["grid"][ax].get<int>();
  }
  return Basis::build(spec);
}

ModelSpec make_model(const RunConfig& cfg, const BasisPtr& basis) {
  const json& m = cfg.doc["model"];
  const std::string name = m["name"].get<std::string>();
  ModelSpec model;
  if (name == "pp") {
    SourceSpec g;
    if (m.contains("source")) {
      for (const auto& term : m["source"]) {
        SourceTerm t;
        t.c = term.value("c", 0.0);
        t.m = term.value("m", 0);
        t.k = term.value("k", 0);
        g.push_back(t);
      }
    }
    model = pp_model(basis, num_or(m, "p", 3.0), num_or(m, "q", 4.0),
                     num_or(m, "eps", 0.05), g, num_or(m, "cross", 1.0));
  } else if (name == "degenerate") {
    model = degenerate_model(basis, num_or(m, "p", 4.0), num_or(m, "q", 4.0),
                             num_or(m, "s", 0.0), num_or(m, "tau", 0.8),
                             num_or(m, "a", std::nan("")));
  } else if (name == "motility") {
    model = motility_model(basis, num_or(m, "p", 4.0 * basis->dim()),
                           num_or(m, "eps", 0.02), num_or(m, "kappa", 0.35),
                           num_or(m, "chi0", 0.1));
  } else if (name == "heat") {
    ExponentBudget budget;
    budget.alpha = 0.1;
    budget.beta = 0.1;
    budget.gamma = 0.0;
    budget.xi = 0.4;
    budget.q = 2.0;
    budget = derive_weight(budget, ProblemMode::Semilinear);
    model = heat_model(basis, m.value("arity", 1), budget);
  } else if (name == "scalar-relaxation") {
    model = scalar_relaxation_model(basis);
  } else {
    throw ConfigError("config: unknown model '" + name + "'");
  }
  if (cfg.doc.contains("budget")) {
    const json& o = cfg.doc["budget"];
    ExponentBudget& b = model.budget;
    b.beta = num_or(o, "beta", b.beta);
    b.gamma = num_or(o, "gamma", b.gamma);
    b.alpha = num_or(o, "alpha", b.alpha);
    b.xi = num_or(o, "xi", b.xi);
    b.q = num_or(o, "q", b.q);
    b.mu = num_or(o, "mu", b.mu);
    b.alpha0 = num_or(o, "alpha0", b.alpha0);
    b.gamma0 = num_or(o, "gamma0", b.gamma0);
  }
  return model;
}

MeshSpec make_mesh(const RunConfig& cfg, const ExponentBudget& budget) {
  const json& m = cfg.doc["mesh"];
  const double T = m["T"].get<double>();
  const int N = m["N"].get<int>();
  const double r = m["r"].is_null()
                       ? MeshSpec::default_grading(budget.mu, budget.q)
                       : m["r"].get<double>();
  return MeshSpec::graded(T, N, r);
}

namespace {

SpectralField component_field(const json& spec, const BasisPtr& basis,
                              std::uint64_t seed, double default_order) {
  const std::string kind = spec.value("kind", std::string("zero"));
  if (kind == "zero") return SpectralField(basis);
  if (kind == "constant") {
    return constant_field(basis, num_or(spec, "value", 1.0));
  }
  if (kind == "bump") {
    return bump_field(basis, num_or(spec, "amplitude", 1.0),
                      num_or(spec, "width", 0.12));
  }
  if (kind == "cosine") {
    return cosine_field(basis, num_or(spec, "amplitude", 1.0),
                        spec.value("mode", 1));
  }
  if (kind == "rough") {
    const double scale = num_or(spec, "amplitude", 1.0);
    SpectralField f = rough_initial_data(
        basis, num_or(spec, "order", default_order),
        spec.contains("seed") ? spec["seed"].get<std::uint64_t>() : seed);
    f *= scale;
    return f;
  }
  if (kind == "coeffs") {
    std::vector<double> c = spec["values"].get<std::vector<double>>();
    c.resize(basis->num_modes(), 0.0);
    return SpectralField(basis, std::move(c));
  }
  throw ConfigError("config: unknown initial-data kind '" + kind + "'");
}

}  // namespace

SystemState make_initial(const RunConfig& cfg, const ModelSpec& model) {
  const std::uint64_t seed = cfg.doc["seed"].get<std::uint64_t>();
  std::vector<SpectralField> comps;
  comps.reserve(model.arity);
  const json init = cfg.doc.value("initial", json::object());
  if (init.contains("components")) {
    const json& arr = init["components"];
    if (!arr.is_array() || static_cast<int>(arr.size()) != model.arity) {
      throw ConfigError("config: initial.components must list one entry "
                        "per model component");
    }
    for (int i = 0; i < model.arity; ++i) {
      const double ord =
          model.offsets[i] + model.theta_weights[i] * model.budget.alpha;
      comps.push_back(component_field(arr[i], model.basis, seed + i, ord));
    }
  } else {
    // Shorthand: the entry describes the first component; the rest zero.
    for (int i = 0; i < model.arity; ++i) {
      if (i == 0) {
        const double ord =
            model.offsets[0] + model.theta_weights[0] * model.budget.alpha;
        comps.push_back(component_field(init, model.basis, seed, ord));
      } else {
        comps.emplace_back(model.basis);
      }
    }
  }
  return model.make_state(std::move(comps));
}

}  // namespace semiflow::cli
