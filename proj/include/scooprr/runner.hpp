#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "scooprr/analysis.hpp"
#include "scooprr/kernel.hpp"
#include "scooprr/program.hpp"
#include "scooprr/schedule.hpp"

namespace scooprr {

// Everything a finished run leaves behind.
struct RunResult {
  RunOutcomeKind outcome = RunOutcomeKind::Terminated;
  LogicalSchedule schedule;  // recorded while the run executed
  DeadlockReport deadlock;   // empty when the run terminated
  std::map<ProcessorId, ObjectState> final_objects;
  std::vector<ProcessorId> approvals;  // requester of each approval, in order
};

// One free run under the seed, with the recorder attached.
RunResult run_record(const Scenario& scenario, uint64_t seed,
                     uint64_t step_budget = Kernel::kDefaultBudget);

// Replays the schedule while re-recording. Faults MalformedSchedule before
// running, ReplayDivergence when the gate starves the program, and
// IncompleteReplay when the run quiesces with approvals still promised.
RunResult run_replay(const Scenario& scenario, const LogicalSchedule& schedule,
                     uint64_t step_budget = Kernel::kDefaultBudget);

// Pins the approval order outright; the test hook behind seedless
// reproductions.
RunResult run_forced(const Scenario& scenario, std::vector<ProcessorId> order,
                     uint64_t step_budget = Kernel::kDefaultBudget);

}  // namespace scooprr
