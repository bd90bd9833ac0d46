#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "semiflow/mild.hpp"
#include "semiflow/models.hpp"
#include "semiflow/spaces.hpp"
#include "semiflow/spectral.hpp"

// Run configuration: a single JSON document with a versioned key set,
// resolved against defaults at load time so that the manifest embeds the
// exact inputs of every run.

namespace semiflow::cli {

/// Malformed configuration (parse error or schema violation); maps to
/// exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  nlohmann::json doc;   // resolved: defaults filled in
  std::string out_dir;  // empty = no artifacts
};

/// Parse and resolve a config file. Throws ConfigError with a diagnostic.
RunConfig load_config(const std::string& path);
/// Resolve an in-memory document (defaults, schema checks).
RunConfig resolve_config(nlohmann::json doc);

BasisPtr make_basis(const RunConfig& cfg);
/// Builds the named model and applies any budget overrides. Hypothesis
/// violations surface as std::invalid_argument (exit code 1).
ModelSpec make_model(const RunConfig& cfg, const BasisPtr& basis);
MeshSpec make_mesh(const RunConfig& cfg, const ExponentBudget& budget);
SystemState make_initial(const RunConfig& cfg, const ModelSpec& model);

}  // namespace semiflow::cli
