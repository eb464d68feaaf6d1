#include "scooprr/runner.hpp"

namespace scooprr {

namespace {

class ApprovalLog : public RunObserver {
 public:
  void on_approved(const LockingRequest& req) override {
    order_.push_back(req.requester);
  }
  std::vector<ProcessorId> take() { return std::move(order_); }

 private:
  std::vector<ProcessorId> order_;
};

RunResult drive(const Scenario& scenario, SchedulePolicy& policy,
                uint64_t step_budget) {
  Kernel kernel(scenario, policy);
  kernel.set_step_budget(step_budget);
  Recorder recorder;
  kernel.attach_recorder(&recorder);
  ApprovalLog log;
  kernel.attach_observer(&log);

  RunResult result;
  result.outcome = kernel.run_until_quiescent();
  result.schedule = recorder.on_terminate();
  result.deadlock = detect_deadlock(kernel);
  result.final_objects = kernel.object_snapshot();
  result.approvals = log.take();
  return result;
}

}  // namespace

RunResult run_record(const Scenario& scenario, uint64_t seed,
                     uint64_t step_budget) {
  FreeRunPolicy policy(seed);
  return drive(scenario, policy, step_budget);
}

RunResult run_replay(const Scenario& scenario, const LogicalSchedule& schedule,
                     uint64_t step_budget) {
  ReplayPolicy policy(schedule);
  RunResult result = drive(scenario, policy, step_budget);
  policy.gate().assert_complete();
  return result;
}

RunResult run_forced(const Scenario& scenario, std::vector<ProcessorId> order,
                     uint64_t step_budget) {
  ForcedOrderPolicy policy(std::move(order));
  return drive(scenario, policy, step_budget);
}

}  // namespace scooprr
