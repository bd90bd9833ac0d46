#include "semiflow/runner.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "semiflow/analysis.hpp"
#include "semiflow/evolution.hpp"
#include "semiflow/mild.hpp"

namespace semiflow::cli {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

namespace fs = std::filesystem;

class Emitter {
 public:
  Emitter(const RunConfig& cfg, std::string command)
      : dir_(cfg.out_dir), command_(std::move(command)), config_(cfg.doc) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }

  bool active() const { return !dir_.empty(); }

  void write_json(const std::string& name, const json& doc) const {
    if (!active()) return;
    std::ofstream out(fs::path(dir_) / name, std::ios::binary);
    out << doc.dump(2) << "\n";
  }

  void write_csv(const std::string& name,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) const {
    if (!active()) return;
    std::ofstream out(fs::path(dir_) / name, std::ios::binary);
    for (size_t i = 0; i < header.size(); ++i) {
      out << (i ? "," : "") << header[i];
    }
    out << "\n";
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i) {
        out << (i ? "," : "") << format_double(row[i]);
      }
      out << "\n";
    }
  }

  void manifest(const std::string& status, json extra = json::object()) const {
    if (!active()) return;
    json m;
    m["artifact_version"] = kArtifactVersion;
    m["command"] = command_;
    m["status"] = status;
    m["config"] = config_;
    m["outputs"] = extra;
    write_json("manifest.json", m);
  }

 private:
  std::string dir_;
  std::string command_;
  json config_;
};

json fit_to_json(const FitResult& fit) {
  json j;
  j["exponent"] = fit.exponent;
  j["prefactor"] = fit.prefactor;
  j["r2"] = fit.r2;
  j["window"] = {fit.window_lo, fit.window_hi};
  j["samples"] = fit.samples;
  return j;
}

std::vector<std::vector<double>> trajectory_rows(const ModelSpec& model,
                                                 const WeightedTrajectory& u) {
  std::vector<std::vector<double>> rows;
  const ExponentBudget& b = model.budget;
  for (int j = 0; j < u.num_nodes(); ++j) {
    const SystemState& s = u.states[j];
    std::vector<double> row = {
        u.times[j], s.norm_at(b.beta), s.norm_at(b.alpha), s.norm_at(b.xi),
        std::pow(u.times[j], u.mu) * s.norm_at(b.xi)};
    for (const auto& c : s.components) row.push_back(c.l2_norm());
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> trajectory_header(const ModelSpec& model) {
  std::vector<std::string> h = {"t", "norm_beta", "norm_alpha", "norm_xi",
                                "weighted_norm_xi"};
  for (int i = 0; i < model.arity; ++i) {
    h.push_back("component" + std::to_string(i) + "_l2");
  }
  return h;
}

ExponentBudget resolved_budget(const ModelSpec& model) {
  ExponentBudget b = model.budget;
  if (!b.has_weight()) b = derive_weight(b, model.mode);
  return b;
}

}  // namespace

int cmd_validate(const RunConfig& cfg) {
  Emitter emit(cfg, "validate");
  json report;
  std::vector<std::string> violations;
  try {
    const BasisPtr basis = make_basis(cfg);
    ModelSpec model = make_model(cfg, basis);
    violations = validate_budget(model.budget, model.mode);
  } catch (const std::invalid_argument& e) {
    // Model factories report hypothesis violations by name.
    violations.push_back(e.what());
  }
  report["violations"] = violations;
  report["ok"] = violations.empty();
  emit.write_json("validate.json", report);
  emit.manifest(violations.empty() ? "ok" : "violations");
  if (violations.empty()) {
    std::cout << "ok\n";
    return kExitOk;
  }
  for (const auto& v : violations) std::cout << "violation: " << v << "\n";
  return kExitHypothesis;
}

int cmd_picard(const RunConfig& cfg) {
  Emitter emit(cfg, "picard");
  const BasisPtr basis = make_basis(cfg);
  ModelSpec model = make_model(cfg, basis);
  model.budget = resolved_budget(model);
  const SystemState u0 = make_initial(cfg, model);
  const MeshSpec mesh = make_mesh(cfg, model.budget);
  const double tol = cfg.doc["picard"]["tol"].get<double>();
  const int max_iter = cfg.doc["picard"]["max_iter"].get<int>();

  json report;
  try {
    auto [traj, pr] = picard_solve(model, u0, mesh, tol, max_iter);
    report["iterates"] = pr.iterates;
    report["contraction_ratios"] = pr.contraction_ratios;
    report["max_ratio"] =
        pr.contraction_ratios.empty()
            ? 0.0
            : *std::max_element(pr.contraction_ratios.begin(),
                                pr.contraction_ratios.end());
    report["final_residual"] = pr.final_residual;
    report["converged"] = pr.converged;
    emit.write_json("picard.json", report);
    emit.write_csv("trajectory.csv", trajectory_header(model),
                   trajectory_rows(model, traj));
    emit.manifest(pr.converged ? "ok" : "not-converged");
    return pr.converged ? kExitOk : kExitNonContraction;
  } catch (const NonConvergenceError& e) {
    report["iterates"] = e.report.iterates;
    report["contraction_ratios"] = e.report.contraction_ratios;
    report["converged"] = false;
    report["error"] = e.what();
    emit.write_json("picard.json", report);
    emit.manifest("non-contraction");
    std::cout << e.what() << "\n";
    return kExitNonContraction;
  }
}

int cmd_simulate(const RunConfig& cfg) {
  Emitter emit(cfg, "simulate");
  const BasisPtr basis = make_basis(cfg);
  ModelSpec model = make_model(cfg, basis);
  model.budget = resolved_budget(model);
  const SystemState u0 = make_initial(cfg, model);
  const double T = cfg.doc["mesh"]["T"].get<double>();
  const int steps = cfg.doc["reference"]["steps"].get<int>();
  const double tol = cfg.doc["reference"]["tol"].get<double>();

  const ReferenceResult ref = integrate_reference(model, u0, T, steps, tol);
  auto rows = trajectory_rows(model, ref.trajectory);
  auto header = trajectory_header(model);
  header.push_back("mass0");
  for (size_t j = 0; j < rows.size(); ++j) {
    rows[j].push_back(mass(ref.trajectory.states[j].components[0]));
  }
  emit.write_csv("trajectory.csv", header, rows);
  json report;
  report["step_underflow"] = ref.step_underflow;
  report["stop_time"] = ref.stop_time;
  report["initial_mass"] = mass(u0.components[0]);
  report["final_mass"] =
      mass(ref.trajectory.states.back().components[0]);
  emit.write_json("simulate.json", report);
  emit.manifest(ref.step_underflow ? "step-underflow" : "ok", report);
  return kExitOk;
}

int cmd_rates(const RunConfig& cfg) {
  Emitter emit(cfg, "rates");
  const BasisPtr basis = make_basis(cfg);
  ModelSpec model = make_model(cfg, basis);
  model.budget = resolved_budget(model);
  const ExponentBudget& b = model.budget;
  const json analysis = cfg.doc.value("analysis", json::object());

  json report;

  // Smoothing rates of the scalar heat semigroup on this basis.
  {
    std::vector<double> thetas = {0.25, 0.5, 0.75};
    if (analysis.contains("thetas")) {
      thetas = analysis["thetas"].get<std::vector<double>>();
    }
    double wlo = 1e-3, whi = 1e-1;
    if (analysis.contains("window")) {
      wlo = analysis["window"][0].get<double>();
      whi = analysis["window"][1].get<double>();
    }
    const GeneratorSpec heat = GeneratorSpec::diagonal(basis, {1.0});
    std::vector<double> tgrid;
    const int n = 40;
    for (int i = 0; i < n; ++i) {
      tgrid.push_back(wlo * std::pow(whi / wlo, i / double(n - 1)));
    }
    json fits = json::array();
    for (double theta : thetas) {
      const SmoothingTable table = measure_smoothing(heat, theta, tgrid);
      std::vector<std::pair<double, double>> samples;
      for (size_t i = 0; i < table.times.size(); ++i) {
        samples.emplace_back(table.times[i], table.norms[i]);
      }
      json f = fit_to_json(fit_power_law(samples, wlo, whi));
      f["theta"] = theta;
      fits.push_back(f);
    }
    report["smoothing"] = fits;
  }

  // Hoelder and weighted-decay fits along a solved trajectory.
  {
    const SystemState u0 = make_initial(cfg, model);
    const MeshSpec mesh = make_mesh(cfg, b);
    auto [traj, pr] = picard_solve(model, u0, mesh,
                                   cfg.doc["picard"]["tol"].get<double>(),
                                   cfg.doc["picard"]["max_iter"].get<int>());
    json holder = json::array();
    for (double theta : {0.0, b.alpha / 2.0}) {
      json f = fit_to_json(holder_exponent(traj, theta));
      f["theta"] = theta;
      f["floor"] = std::min(b.alpha - theta,
                            std::max(0.0, 1.0 - b.mu * b.q));
      holder.push_back(f);
    }
    report["holder"] = holder;
    const double wlo = traj.times[1];
    const double whi = traj.horizon() / 3.0;
    const DecayCheck decay =
        weighted_decay_check(traj, b.mu, b.xi, wlo, whi);
    report["decay"] = fit_to_json(decay.fit);
    report["decay"]["decay_exponent"] = decay.decay_exponent;
    report["decay"]["weighted_member"] = decay.member;
    report["picard_converged"] = pr.converged;
  }

  emit.write_json("rates.json", report);
  emit.manifest("ok");
  return kExitOk;
}

int cmd_probe(const RunConfig& cfg) {
  Emitter emit(cfg, "probe");
  const BasisPtr basis = make_basis(cfg);
  ModelSpec model = make_model(cfg, basis);
  model.budget = resolved_budget(model);
  const json p = cfg.doc.value("probe", json::object());
  const double R = p.value("R", 1.0);
  const int samples = p.value("samples", 256);
  const double cap_lo = p.value("cap_lo", 2.0);
  const double cap_hi = p.value("cap_hi", 20.0);
  const std::uint64_t seed = cfg.doc["seed"].get<std::uint64_t>();

  json report;
  std::vector<std::vector<double>> rows;
  for (double q : {model.budget.q, 1.0}) {
    const ProbeResult res =
        lipschitz_probe(model, R, samples, seed, q, cap_lo, cap_hi);
    for (const auto& row : res.rows) {
      rows.push_back({q, row.xi_scale, row.quotient});
    }
    // Scale dependence read off pinned batches at both window ends.
    const ProbeResult lo =
        lipschitz_probe(model, R, samples / 4, seed, q, cap_lo, cap_lo);
    const ProbeResult hi =
        lipschitz_probe(model, R, samples / 4, seed, q, cap_hi, cap_hi);
    json summary;
    summary["q"] = q;
    summary["max_quotient"] = res.max_quotient;
    summary["max_low_end"] = lo.max_quotient;
    summary["max_high_end"] = hi.max_quotient;
    summary["growth_ratio"] =
        lo.max_quotient > 0.0 ? hi.max_quotient / lo.max_quotient : 0.0;
    report[q == 1.0 ? "q1" : "model_q"] = summary;
  }
  emit.write_csv("probe.csv", {"q", "xi_scale", "quotient"}, rows);
  emit.write_json("probe.json", report);
  emit.manifest("ok");
  return kExitOk;
}

int cmd_blowup(const RunConfig& cfg) {
  Emitter emit(cfg, "blowup");
  const BasisPtr basis = make_basis(cfg);
  ModelSpec model = make_model(cfg, basis);
  model.budget = resolved_budget(model);
  const json bw = cfg.doc.value("blowup", json::object());
  std::vector<double> amplitudes = {0.5, 1.0, 2.0, 4.0, 8.0};
  if (bw.contains("amplitudes")) {
    amplitudes = bw["amplitudes"].get<std::vector<double>>();
  }
  const double factor = bw.value("threshold_factor", 1000.0);
  const double p_norm = bw.value("p", model.integrabilities[0]);
  const double T = cfg.doc["mesh"]["T"].get<double>();
  const int steps = cfg.doc["reference"]["steps"].get<int>();
  const double tol = cfg.doc["reference"]["tol"].get<double>();

  const SystemState base = make_initial(cfg, model);
  const NormSpec norm = NormSpec::grid_lp(0.0, p_norm);

  std::vector<std::vector<double>> rows;
  json verdicts = json::array();
  int flips = 0;
  bool prev = false;
  for (size_t i = 0; i < amplitudes.size(); ++i) {
    const SystemState u0 = amplitudes[i] * base;
    const double initial = field_norm(u0.components[0], norm);
    const double threshold = factor * initial;
    const ReferenceResult ref = integrate_reference(model, u0, T, steps, tol);
    const BlowupVerdict v = blowup_monitor(ref.trajectory, norm, threshold,
                                           ref.step_underflow, 0);
    const double m0 = mass(u0.components[0]);
    const double mT = mass(ref.trajectory.states.back().components[0]);
    rows.push_back({amplitudes[i], v.triggered ? 1.0 : 0.0, v.trigger_time,
                    initial, threshold, std::fabs(mT - m0) / std::fabs(m0)});
    json jv;
    jv["amplitude"] = amplitudes[i];
    jv["triggered"] = v.triggered;
    jv["trigger_time"] = v.trigger_time;
    jv["step_underflow"] = ref.step_underflow;
    jv["mass_rel_drift"] = std::fabs(mT - m0) / std::fabs(m0);
    verdicts.push_back(jv);
    if (i > 0 && v.triggered != prev) ++flips;
    prev = v.triggered;
  }
  emit.write_csv("sweep.csv",
                 {"amplitude", "triggered", "trigger_time", "initial_norm",
                  "threshold", "mass_rel_drift"},
                 rows);
  json report;
  report["verdicts"] = verdicts;
  report["flips"] = flips;
  report["single_flip"] = (flips == 1);
  emit.write_json("blowup.json", report);
  emit.manifest("ok");
  return kExitOk;
}

int run_command(const std::string& command, const RunConfig& cfg) {
  try {
    if (command == "validate") return cmd_validate(cfg);
    if (command == "picard") return cmd_picard(cfg);
    if (command == "simulate") return cmd_simulate(cfg);
    if (command == "rates") return cmd_rates(cfg);
    if (command == "probe") return cmd_probe(cfg);
    if (command == "blowup") return cmd_blowup(cfg);
    std::cerr << "unknown command: " << command << "\n";
    return kExitParse;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  } catch (const NonConvergenceError& e) {
    std::cerr << e.what() << "\n";
    return kExitNonContraction;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitHypothesis;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace semiflow::cli
