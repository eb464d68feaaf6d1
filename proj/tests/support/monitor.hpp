#pragma once

// Run auditor built purely on the observer hooks plus the kernel's read-only
// lock-state view. Maintains its own shadow lock table so violations of the
// runtime's guarantees show up as recorded strings instead of silently
// relying on the kernel's internal bookkeeping:
//   - an approval never grants a target somebody still holds,
//   - the wait condition holds at the moment of approval,
//   - each supplier applies requests in exactly the order they were enqueued.

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "scooprr/kernel.hpp"
#include "scooprr/scheduler.hpp"

namespace scooprr::testsupport {

class SafetyMonitor : public RunObserver {
 public:
  explicit SafetyMonitor(const LockStateView& view) : view_(&view) {}

  void on_approved(const LockingRequest& req) override {
    ++approvals_;
    for (const auto& target : req.targets) {
      auto it = shadow_locks_.find(target);
      if (it != shadow_locks_.end()) {
        violations_.push_back("approval " + std::to_string(approvals_) +
                              " grants " + target.str() + " to " +
                              req.requester.str() + " while " +
                              it->second.str() + " still holds it");
      }
      shadow_locks_[target] = req.requester;
    }
    if (!eval_wait_condition(*view_, req)) {
      violations_.push_back("approval " + std::to_string(approvals_) + " of " +
                            req.requester.str() + " with wait condition " +
                            req.wait_name + " false");
    }
  }

  void on_enqueued(const ProcessorId& supplier,
                   const FeatureRequest& req) override {
    pending_tags_[supplier].push_back(req.tag);
  }

  void on_applied(const ProcessorId& supplier,
                  const FeatureRequest& req) override {
    auto& fifo = pending_tags_[supplier];
    if (fifo.empty() || fifo.front() != req.tag) {
      violations_.push_back("request tag " + std::to_string(req.tag) +
                            " applied out of order on " + supplier.str());
    } else {
      fifo.pop_front();
    }
    if (req.kind == FeatureRequest::Kind::Unlock) {
      auto it = shadow_locks_.find(supplier);
      if (it == shadow_locks_.end() || it->second != req.client) {
        violations_.push_back("unlock of " + supplier.str() +
                              " on behalf of " + req.client.str() +
                              " which does not hold it");
      } else {
        shadow_locks_.erase(it);
      }
    }
  }

  const std::vector<std::string>& violations() const { return violations_; }
  uint64_t approvals_seen() const { return approvals_; }

 private:
  const LockStateView* view_;
  std::map<ProcessorId, ProcessorId> shadow_locks_;
  std::map<ProcessorId, std::deque<uint64_t>> pending_tags_;
  std::vector<std::string> violations_;
  uint64_t approvals_ = 0;
};

}  // namespace scooprr::testsupport
