#pragma once

#include <string>

#include "semiflow/config.hpp"

// Run orchestration: each subcommand consumes a resolved RunConfig, writes
// CSV/JSON artifacts plus a manifest into the configured output directory,
// and returns the process exit code.
//
// Exit codes (stable contract): 0 success, 1 config/hypothesis violation,
// 2 parse error, 3 non-contraction, 4 numerical failure.

namespace semiflow::cli {

inline constexpr const char* kArtifactVersion = "1.0.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitHypothesis = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitNonContraction = 3;
inline constexpr int kExitNumerical = 4;

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

int cmd_validate(const RunConfig& cfg);
int cmd_picard(const RunConfig& cfg);
int cmd_simulate(const RunConfig& cfg);
int cmd_rates(const RunConfig& cfg);
int cmd_probe(const RunConfig& cfg);
int cmd_blowup(const RunConfig& cfg);

/// Dispatch by subcommand name; maps exceptions to the exit-code contract.
int run_command(const std::string& command, const RunConfig& cfg);

}  // namespace semiflow::cli
