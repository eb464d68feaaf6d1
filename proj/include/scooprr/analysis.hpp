#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "scooprr/kernel.hpp"
#include "scooprr/schedule.hpp"

namespace scooprr {

// Same partition of 1..N into the same per-processor interval lists.
bool schedules_equal(const LogicalSchedule& a, const LogicalSchedule& b);

// "" when equal; otherwise a one-line description of the first difference
// (scanning processors in id order, then interval lists position by
// position, then the totals).
std::string first_schedule_difference(const LogicalSchedule& a,
                                      const LogicalSchedule& b);

// One request the arbiter can never approve again.
struct BlockedRequest {
  ProcessorId requester;
  // (target, holder) for every target somebody else holds.
  std::vector<std::pair<ProcessorId, ProcessorId>> wanted;
  std::string wait_name;
  bool wait_holds = false;  // did the wait condition hold at detection time?
};

// Why a run stopped short: every blocked request, the requester→holder
// wait-for edges, and — when the blockage is circular — one cycle through
// the resource-allocation graph, alternating requesters and the targets
// they wait on, rotated so the smallest processor id leads.
struct DeadlockReport {
  std::vector<BlockedRequest> blocked;
  std::vector<std::pair<ProcessorId, ProcessorId>> wait_for;
  std::vector<ProcessorId> cycle;  // empty for non-circular blockage
};

// Inspects a quiesced kernel's pending requests and lock table. Empty report
// when nothing is pending (a terminated run).
DeadlockReport detect_deadlock(const Kernel& kernel);

// What a sweep of consecutive free-run seeds found, keyed by schedule
// fingerprint.
struct FuzzSummary {
  uint64_t seeds_run = 0;
  std::map<uint64_t, RunOutcomeKind> outcomes;
  std::map<uint64_t, uint64_t> witness_seeds;  // first seed that produced it
  std::map<uint64_t, LogicalSchedule> schedules;

  size_t distinct_schedules() const { return outcomes.size(); }
};

// Records the scenario under free-run(seed) for every seed in
// [seed_from, seed_from + seed_count). A faulting seed aborts the sweep with
// the seed number prefixed to the fault message.
FuzzSummary fuzz(const Scenario& scenario, uint64_t seed_from,
                 uint64_t seed_count,
                 uint64_t step_budget = Kernel::kDefaultBudget);

}  // namespace scooprr
