#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scooprr/value.hpp"

namespace scooprr {

// One maximal run of consecutive approval numbers belonging to one processor.
struct Interval {
  uint64_t l = 0;
  uint64_t u = 0;
  bool operator==(const Interval&) const = default;
};

// Strictly increasing and separated: consecutive intervals of the same
// processor satisfy l2 >= u1 + 2 (an adjacent run would have been one run).
using IntervalList = std::vector<Interval>;

// Per-processor interval lists partitioning {1..total}. Denotes the
// equivalence class of executions with the same approval order. Processors
// that never had a request approved are absent (no empty lists).
struct LogicalSchedule {
  std::map<ProcessorId, IntervalList> per_processor;
  uint64_t total = 0;
  bool operator==(const LogicalSchedule&) const = default;
};

// First structural violation found, or nullopt when the schedule is valid.
// `proc` names the processor whose interval list exhibits the problem, when
// one is attributable (the trace decoder uses it for line numbers).
struct ScheduleDefect {
  std::string message;
  std::optional<ProcessorId> proc;
};
std::optional<ScheduleDefect> schedule_defect(const LogicalSchedule& s);

// "" when valid, otherwise the defect message.
std::string schedule_validate(const LogicalSchedule& s);

// Algorithm: on each approval, either extend the processor's open run (its
// local counter keeps pace with the global counter) or close the open run
// [base+1, base+count] into its interval list and start a new one. Terminate
// closes every open run. The result partitions {1..N} by construction.
class Recorder {
 public:
  Recorder();

  // Handle "the scheduler approved p's request".
  void on_approved(const ProcessorId& p);

  // Close open runs and emit the schedule. Idempotent; fires on normal
  // termination and on deadlock alike (a deadlocked run's schedule is the
  // whole point of recording it).
  const LogicalSchedule& on_terminate();

  uint64_t approvals() const { return counter_g_; }
  bool finished() const { return finished_; }

 private:
  struct OpenRun {
    uint64_t base = 0;   // global counter value when the run started
    uint64_t count = 0;  // approvals in the run so far
  };

  uint64_t counter_g_ = 0;
  std::map<ProcessorId, OpenRun> open_;  // presence = local counter defined
  LogicalSchedule schedule_;
  bool finished_ = false;
};

// Replays a schedule as a gate: Check(p) answers whether p's request is next
// (the global counter falls inside one of p's intervals) and advances the
// counter when it is.
class Replayer {
 public:
  // Faults MalformedSchedule when the partition invariant does not hold.
  explicit Replayer(LogicalSchedule schedule);

  enum class Check { Ok, NotOk };

  // Unknown processors behave as an empty interval list (NotOk); divergence
  // reporting is centralized in the scheduler's round logic.
  Check check(const ProcessorId& p);

  // Faults IncompleteReplay unless every recorded approval was replayed.
  void assert_complete() const;

  uint64_t counter() const { return counter_g_; }
  uint64_t total() const { return schedule_.total; }
  const LogicalSchedule& schedule() const { return schedule_; }

 private:
  LogicalSchedule schedule_;
  uint64_t counter_g_ = 1;  // next expected approval number
};

}  // namespace scooprr
