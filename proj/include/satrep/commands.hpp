#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "satrep/config.hpp"
#include "satrep/io.hpp"

namespace satrep::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;        // Finite saturation / preorder holds / plain success
inline constexpr int kExitError = 1;     // parse, validation or numerical error
inline constexpr int kExitNegative = 2;  // ExceededCap verdict / preorder fails

struct RunConfig {
  Tolerances tol{};
  int n_max = 8;
  std::optional<std::uint64_t> seed;
  std::size_t n_steps = 200;
  std::size_t n_traj = 1000;
  std::size_t bins = 50;
  std::vector<int> n_list;  // hellinger; empty means 1..n_max
  unsigned threads = 1;
};

nlohmann::json to_json(const RunConfig& c);

struct CommandResult {
  nlohmann::json report;  // {"version", "command", "config", "result", "timing_ms"}
  int exit_code = kExitOk;
  std::optional<std::string> csv;
};

CommandResult cmd_saturation(const io::Problem& problem, const RunConfig& config);
CommandResult cmd_preorder(const io::Problem& a, const io::Problem& b, const RunConfig& config);
/// Requires config.seed; the problem must carry a "state".
CommandResult cmd_simulate(const io::Problem& problem, const RunConfig& config);
CommandResult cmd_hellinger(const io::Problem& problem, const RunConfig& config);

}  // namespace satrep::cli
