#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scooprr/program.hpp"
#include "scooprr/schedule.hpp"
#include "scooprr/scheduler.hpp"
#include "scooprr/value.hpp"

namespace scooprr {

// Queued work item on a processor: separate command, separate query, or the
// unlock marker a lock holder leaves behind. Markers carry no feature, args
// or reply.
struct FeatureRequest {
  enum class Kind { Command, Query, Unlock };
  Kind kind = Kind::Command;
  std::string feature;
  std::vector<Value> args;
  SlotRef reply;       // separate query only
  ProcessorId client;  // enqueuer; for Unlock: the holder being released
  uint64_t tag = 0;    // per-supplier enqueue ordinal (FIFO auditing)
};

enum class ProcStatus { Idle, Running, BlockedOnLock, BlockedOnFuture, Done };

enum class RunOutcomeKind { Terminated, Deadlocked };

const char* outcome_name(RunOutcomeKind k);

// Instrumentation tap. on_applied fires for every dequeued request, unlock
// markers included, in application order.
class RunObserver {
 public:
  virtual ~RunObserver() = default;
  virtual void on_approved(const LockingRequest&) {}
  virtual void on_enqueued(const ProcessorId& /*supplier*/, const FeatureRequest&) {}
  virtual void on_applied(const ProcessorId& /*supplier*/, const FeatureRequest&) {}
  virtual void on_created(const ProcessorId& /*child*/) {}
};

// Frame-local variables: plain values or futures. Reading a future that is
// not yet filled throws NeedFuture and the step is retried once it fills.
class Locals {
 public:
  void set(const std::string& name, Value v) { vars_[name] = std::move(v); }
  void set_slot(const std::string& name, SlotRef slot) {
    vars_[name] = std::move(slot);
  }
  bool has(const std::string& name) const { return vars_.count(name) != 0; }
  Value force(const std::string& name) const;

 private:
  std::map<std::string, std::variant<Value, SlotRef>> vars_;
};

// The cooperative execution engine: processors hosting objects, per-processor
// FIFO request queues, separate and non-separate calls, lock-protected access
// to controlled targets, wait-by-necessity futures, and queued unlock
// requests. Processors advance in rounds — everyone runs until globally stuck
// (only non-critical actions), then the arbiter approves at most one locking
// request — so the approval order alone determines the execution.
class Kernel : public LockStateView {
 public:
  // Takes a private copy of the scenario. Faults Internal when the scenario
  // fails validation.
  Kernel(const Scenario& scenario, SchedulePolicy& policy);

  // LockStateView (wait-condition evaluation window).
  std::optional<ProcessorId> locked_by(const ProcessorId& p) const override;
  const ObjectState& object_of(const ProcessorId& p) const override;

  // Creates the root processor and loads the scenario's root routine.
  // Idempotent; run_until_quiescent calls it on first use. The bootstrap
  // start emits no locking request.
  void bootstrap();

  // Drives the program to quiescence: Terminated when every queue and stack
  // is empty and nothing is pending; Deadlocked when no processor can make
  // progress but at least one is blocked. An attached recorder's terminate
  // handler fires in both cases. Faults BudgetExhausted past the step budget
  // and ReplayDivergence when a replay gate starves a satisfiable program.
  RunOutcomeKind run_until_quiescent();

  // --- operations also exposed for direct use in tests ------------------

  // New processor handled by a fresh hierarchical id; classless (objects
  // created this way have no feature table).
  ProcessorId create_processor(const ProcessorId& creator,
                               const ObjectState& object_template);

  // Appends a request to the supplier's queue. The client must hold the
  // supplier's lock (faults UncontrolledSeparateCall otherwise). Returns the
  // result slot when wants_result.
  SlotRef enqueue_separate_call(const ProcessorId& client,
                                const ProcessorId& supplier,
                                const std::string& feature,
                                std::vector<Value> args, bool wants_result);

  // Runs a synchronization-free feature synchronously on the processor's own
  // stack; no critical event. Returns the result for queries.
  std::optional<Value> execute_non_separate(const ProcessorId& processor,
                                            const std::string& feature,
                                            std::vector<Value> args);

  // Drives the kernel until the slot fills and returns its value; faults
  // LostResult when the program quiesces without filling it.
  Value await_result(const ProcessorId& client, const SlotRef& slot);

  // One unlock marker to every processor the holder currently has locked.
  void issue_unlock_requests(const ProcessorId& holder);

  // --- wiring ------------------------------------------------------------
  void attach_recorder(Recorder* recorder) { recorder_ = recorder; }
  void attach_observer(RunObserver* observer) { observer_ = observer; }
  void set_step_budget(uint64_t budget) { budget_ = budget; }
  static constexpr uint64_t kDefaultBudget = 1'000'000;

  // --- inspection ----------------------------------------------------------
  const Arbiter& arbiter() const { return arbiter_; }
  std::vector<ProcessorId> processor_ids() const;
  bool exists(const ProcessorId& p) const { return procs_.count(p) != 0; }
  ProcStatus status_of(const ProcessorId& p) const;
  size_t call_depth(const ProcessorId& p) const;
  const std::deque<FeatureRequest>& queue_of(const ProcessorId& p) const;
  std::map<ProcessorId, ObjectState> object_snapshot() const;
  uint64_t steps_taken() const { return steps_; }

 private:
  struct BodyCursor {
    const Body* body = nullptr;
    size_t next = 0;
    std::vector<ProcessorId> unlock_on_exit;  // separate-block locks
  };

  struct Frame {
    const Routine* routine = nullptr;
    Locals locals;
    std::vector<BodyCursor> cursors;
    SlotRef reply;                            // separate query application
    std::string bind_into_caller;             // non-separate query binding
    std::vector<ProcessorId> unlock_on_exit;  // routine-level locks
  };

  // What an approval lets the blocked processor begin.
  struct PendingStart {
    enum class What { Routine, Block };
    What what = What::Routine;
    const Routine* routine = nullptr;
    std::vector<Value> args;
    SlotRef reply;
    std::string bind_into_caller;
    std::optional<FeatureRequest> origin;  // dequeued request, for on_applied
    const SeparateBlockStep* block = nullptr;
  };

  struct Processor {
    ProcessorId id;
    const ClassDef* cls = nullptr;
    ObjectState object;
    std::deque<FeatureRequest> queue;
    std::optional<ProcessorId> locked_by;
    std::vector<Frame> stack;
    ProcStatus status = ProcStatus::Idle;
    uint32_t creations = 0;
    std::optional<PendingStart> pending_start;
    SlotRef awaited;
    uint64_t next_serial = 0;
    uint64_t enqueue_tags = 0;
  };

  Processor& proc(const ProcessorId& p);
  const Processor& cproc(const ProcessorId& p) const;
  const Routine& resolve(const Processor& p, const std::string& feature) const;

  ProcessorId create_impl(Processor& creator, const ClassDef* cls,
                          ObjectState object);
  void enqueue(Processor& supplier, FeatureRequest req);

  // One action for one processor; false when it cannot act.
  bool micro_step(Processor& p);
  // Everyone to global stuckness; true when anything moved.
  bool step_all();
  void count_step();

  bool dequeue_next(Processor& p);
  void submit_sync(Processor& p, const std::vector<ProcessorId>& declared,
                   WaitCond wait, PendingStart start);
  void on_approval(const LockingRequest& req);
  void start_pending(Processor& p, const std::vector<ProcessorId>& lock_targets);
  void begin_routine(Processor& p, const Routine& routine,
                     std::vector<Value> args, SlotRef reply,
                     std::string bind_into_caller,
                     std::vector<ProcessorId> locks);

  bool advance_frame(Processor& p);
  void finish_cursor(Processor& p);
  void finish_frame(Processor& p);
  void emit_unlock_markers(Processor& p, const std::vector<ProcessorId>& targets);

  void exec_step(Processor& p, const Step& step);
  void exec(Processor& p, const ComputeStep& s);
  void exec(Processor& p, const CallStep& s);
  void exec(Processor& p, const QueryStep& s);
  void exec(Processor& p, const CreateStep& s);
  void exec(Processor& p, const NonSeparateCallStep& s);
  void exec(Processor& p, const SeparateBlockStep& s);
  void exec(Processor& p, const BranchStep& s);

  Frame& top_frame(Processor& p);
  Value eval_arg(Processor& p, const ArgExpr& e);
  std::vector<Value> eval_args(Processor& p, const std::vector<ArgExpr>& es);
  Value eval_result(Processor& p, Frame& f, const ResultSpec& spec);
  void nonseparate_invoke(Processor& p, const std::string& feature,
                          std::vector<Value> args, std::string bind_into);

  bool terminated() const;
  RunOutcomeKind finish_run(RunOutcomeKind kind);

  Scenario scenario_;
  SchedulePolicy& policy_;
  Arbiter arbiter_;
  std::map<ProcessorId, Processor> procs_;
  Recorder* recorder_ = nullptr;
  RunObserver* observer_ = nullptr;
  uint64_t budget_ = kDefaultBudget;
  uint64_t steps_ = 0;
  bool bootstrapped_ = false;
};

// Helpers shared by execution and tests: typed access to Values.
int64_t as_int(const Value& v);
bool as_bool(const Value& v);
const ProcessorId& as_pid(const Value& v);
const IntList& as_list(const Value& v);

}  // namespace scooprr
