#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "scooprr/program.hpp"
#include "scooprr/schedule.hpp"
#include "scooprr/value.hpp"

namespace scooprr {

// A processor's request to atomically lock the handlers of its controlled
// arguments with the wait condition holding. Approval of such a request is
// the only critical event. `targets` may be empty: a queued feature
// application with no controlled formals still synchronizes (and its approval
// is numbered), it just locks nothing.
struct LockingRequest {
  ProcessorId requester;
  std::vector<ProcessorId> targets;       // lock set: deduplicated, sorted
  std::vector<ProcessorId> wait_targets;  // declared order, for wait atoms
  WaitCond wait;
  std::string wait_name;  // diagnostic form of the predicate
  uint64_t serial = 0;    // per-requester submission ordinal
};

// The arbiter's read-only window into kernel state: lock table and object
// states for wait-condition evaluation. Evaluation never mutates anything.
class LockStateView {
 public:
  virtual ~LockStateView() = default;
  virtual std::optional<ProcessorId> locked_by(const ProcessorId& p) const = 0;
  virtual const ObjectState& object_of(const ProcessorId& p) const = 0;
};

bool eval_wait_condition(const LockStateView& view, const LockingRequest& req);

// Chooses which satisfiable pending request to approve in a round.
class SchedulePolicy {
 public:
  virtual ~SchedulePolicy() = default;

  // `satisfiable` holds indices into `pending`, in submission order. Returns
  // the chosen index, or nullopt to approve nothing this round.
  virtual std::optional<size_t> choose(
      const std::vector<LockingRequest>& pending,
      const std::vector<size_t>& satisfiable) = 0;

  // True when the policy refused although candidates existed (the replay
  // gate's divergence signal); the free run never refuses.
  virtual bool refused() const { return false; }
};

// Seeded uniform draw over the satisfiable pending requests. The draw uses
// rejection sampling on the raw engine output so that identical seeds choose
// identically on every platform.
class FreeRunPolicy : public SchedulePolicy {
 public:
  explicit FreeRunPolicy(uint64_t seed) : rng_(seed) {}

  std::optional<size_t> choose(const std::vector<LockingRequest>& pending,
                               const std::vector<size_t>& satisfiable) override;

 private:
  std::mt19937_64 rng_;
};

uint64_t uniform_below(std::mt19937_64& rng, uint64_t n);

// Replay gate: approves the unique satisfiable request whose requester owns
// the current global counter value in the recorded schedule.
class ReplayPolicy : public SchedulePolicy {
 public:
  explicit ReplayPolicy(LogicalSchedule schedule) : gate_(std::move(schedule)) {}

  std::optional<size_t> choose(const std::vector<LockingRequest>& pending,
                               const std::vector<size_t>& satisfiable) override;
  bool refused() const override { return refused_; }

  Replayer& gate() { return gate_; }

 private:
  Replayer gate_;
  bool refused_ = false;
};

// Approves requests in a forced requester order; a test hook for pinning an
// exact approval sequence (e.g. the market example's) without a seed search.
class ForcedOrderPolicy : public SchedulePolicy {
 public:
  explicit ForcedOrderPolicy(std::vector<ProcessorId> order)
      : order_(std::move(order)) {}

  std::optional<size_t> choose(const std::vector<LockingRequest>& pending,
                               const std::vector<size_t>& satisfiable) override;
  bool refused() const override { return refused_; }
  size_t position() const { return pos_; }

 private:
  std::vector<ProcessorId> order_;
  size_t pos_ = 0;
  bool refused_ = false;
};

// The arbiter: pending locking requests in submission order, satisfiability
// against live lock/object state, and policy-driven approval. One approval
// per round; every round re-evaluates satisfiability from scratch, which
// subsumes re-evaluation on every lock-state change.
class Arbiter {
 public:
  Arbiter(const LockStateView& view, SchedulePolicy& policy)
      : view_(view), policy_(policy) {}

  // Appends to pending. Faults DoubleSynchronization when the requester
  // already has an outstanding request (a processor is sequential).
  void submit(LockingRequest req);

  // True iff every target is unlocked and the wait condition holds now.
  bool satisfiable(const LockingRequest& req) const;

  struct RoundResult {
    bool approved = false;
    std::optional<ProcessorId> who;
    bool any_satisfiable = false;  // before the policy choice
    bool gate_refused = false;     // policy refused despite candidates
  };
  RoundResult schedule_round();

  const std::vector<LockingRequest>& pending() const { return pending_; }
  bool has_pending(const ProcessorId& requester) const;

  // Invoked with the approved request once it leaves pending. The kernel
  // grants the locks, notifies the recorder, and wakes the requester here.
  void set_approval_hook(std::function<void(const LockingRequest&)> hook) {
    approval_hook_ = std::move(hook);
  }

 private:
  void approve(size_t index);

  const LockStateView& view_;
  SchedulePolicy& policy_;
  std::vector<LockingRequest> pending_;
  std::function<void(const LockingRequest&)> approval_hook_;
};

}  // namespace scooprr
