#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "scooprr/kernel.hpp"

namespace scooprr {

// Stable process exit codes.
enum ExitCode : int {
  kExitTerminated = 0,
  kExitFault = 1,
  kExitDeadlocked = 2,
  kExitDiverged = 3,
  kExitMismatch = 4,
};

struct RunConfig {
  enum class Mode { FreeRun, Replay };
  enum class Report { Text, Machine };

  std::string scenario;
  Mode mode = Mode::FreeRun;
  std::optional<uint64_t> seed;  // free-run
  std::string trace_in;          // replay
  std::string trace_out;
  uint64_t step_budget = Kernel::kDefaultBudget;
  Report report = Report::Text;
  std::optional<int64_t> items;  // producer-consumer size
};

struct FuzzConfig {
  std::string scenario;
  uint64_t seed_from = 0;
  uint64_t seed_count = 100;
  std::string out_dir;  // witness traces land here when given
  uint64_t step_budget = Kernel::kDefaultBudget;
  RunConfig::Report report = RunConfig::Report::Text;
  std::optional<int64_t> items;
};

// Each returns the process exit code; faults never escape.
int cmd_run(const RunConfig& config);
int cmd_record(const RunConfig& config);
int cmd_replay(const RunConfig& config);
int cmd_verify(const RunConfig& config);
int cmd_fuzz(const FuzzConfig& config);

// Parses argv (subcommands run/record/replay/verify/fuzz) and dispatches.
int cli_main(int argc, char** argv);

}  // namespace scooprr
