#include <CLI11.hpp>
#include <iostream>

#include "semiflow/runner.hpp"

// Command-line front door. Subcommands: validate, picard, simulate, rates,
// probe, blowup. Every run is deterministic given its config file.

int main(int argc, char** argv) {
  CLI::App app{"semiflow: spectral mild-solution laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  int threads = 1;

  const std::vector<std::string> commands = {"validate", "picard", "simulate",
                                             "rates",    "probe",  "blowup"};
  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "Path to the JSON run config")
        ->required();
    sub->add_option("--out", out_dir, "Output directory override");
    sub->add_option("--seed", seed, "Seed override");
    sub->add_option("--threads", threads, "Worker pool size for sweeps");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    semiflow::cli::RunConfig cfg = semiflow::cli::load_config(config_path);
    if (!out_dir.empty()) {
      cfg.out_dir = out_dir;
      cfg.doc["out"] = out_dir;
    }
    if (seed >= 0) cfg.doc["seed"] = static_cast<std::uint64_t>(seed);
    return semiflow::cli::run_command(command, cfg);
  } catch (const semiflow::cli::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return semiflow::cli::kExitParse;
  }
}
