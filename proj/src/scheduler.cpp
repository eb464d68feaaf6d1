#include "scooprr/scheduler.hpp"

#include <algorithm>

#include "scooprr/fault.hpp"

namespace scooprr {

bool eval_wait_condition(const LockStateView& view, const LockingRequest& req) {
  for (const WaitAtom& atom : req.wait) {
    if (atom.target >= req.wait_targets.size())
      raise(FaultCode::Internal, "wait atom target out of range");
    const ObjectState& obj = view.object_of(req.wait_targets[atom.target]);
    auto it = obj.find(atom.field);
    if (it == obj.end())
      raise(FaultCode::Internal, "wait condition reads unknown field '" +
                                      atom.field + "'");
    const int64_t* n = std::get_if<int64_t>(&it->second);
    if (!n)
      raise(FaultCode::Internal, "wait condition field '" + atom.field +
                                      "' is not an integer");
    const bool holds = atom.equal ? (*n == atom.constant) : (*n != atom.constant);
    if (!holds) return false;
  }
  return true;
}

uint64_t uniform_below(std::mt19937_64& rng, uint64_t n) {
  if (n == 0) raise(FaultCode::Internal, "uniform draw over empty range");
  const uint64_t max = std::numeric_limits<uint64_t>::max();
  const uint64_t limit = max - max % n;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

std::optional<size_t> FreeRunPolicy::choose(
    const std::vector<LockingRequest>&, const std::vector<size_t>& satisfiable) {
  if (satisfiable.empty()) return std::nullopt;
  return satisfiable[uniform_below(rng_, satisfiable.size())];
}

std::optional<size_t> ReplayPolicy::choose(
    const std::vector<LockingRequest>& pending,
    const std::vector<size_t>& satisfiable) {
  refused_ = false;
  for (size_t index : satisfiable) {
    // Check() only advances on Ok, so probing the rest is side-effect free.
    if (gate_.check(pending[index].requester) == Replayer::Check::Ok)
      return index;
  }
  refused_ = !satisfiable.empty();
  return std::nullopt;
}

std::optional<size_t> ForcedOrderPolicy::choose(
    const std::vector<LockingRequest>& pending,
    const std::vector<size_t>& satisfiable) {
  refused_ = false;
  if (pos_ >= order_.size()) {
    refused_ = !satisfiable.empty();
    return std::nullopt;
  }
  for (size_t index : satisfiable) {
    if (pending[index].requester == order_[pos_]) {
      ++pos_;
      return index;
    }
  }
  refused_ = !satisfiable.empty();
  return std::nullopt;
}

void Arbiter::submit(LockingRequest req) {
  if (has_pending(req.requester)) {
    raise(FaultCode::DoubleSynchronization,
          req.requester.str() + " already has an outstanding locking request");
  }
  pending_.push_back(std::move(req));
}

bool Arbiter::satisfiable(const LockingRequest& req) const {
  for (const ProcessorId& t : req.targets) {
    if (view_.locked_by(t).has_value()) return false;
  }
  return eval_wait_condition(view_, req);
}

bool Arbiter::has_pending(const ProcessorId& requester) const {
  return std::any_of(pending_.begin(), pending_.end(),
                     [&](const LockingRequest& r) {
                       return r.requester == requester;
                     });
}

Arbiter::RoundResult Arbiter::schedule_round() {
  std::vector<size_t> satisfiable_now;
  for (size_t i = 0; i < pending_.size(); ++i) {
    if (satisfiable(pending_[i])) satisfiable_now.push_back(i);
  }

  RoundResult result;
  result.any_satisfiable = !satisfiable_now.empty();
  std::optional<size_t> chosen = policy_.choose(pending_, satisfiable_now);
  if (!chosen) {
    result.gate_refused = policy_.refused();
    return result;
  }
  if (*chosen >= pending_.size() || !satisfiable(pending_[*chosen]))
    raise(FaultCode::Internal, "policy chose an unsatisfiable request");
  result.approved = true;
  result.who = pending_[*chosen].requester;
  approve(*chosen);
  return result;
}

void Arbiter::approve(size_t index) {
  LockingRequest req = std::move(pending_[index]);
  pending_.erase(pending_.begin() + static_cast<ptrdiff_t>(index));
  if (approval_hook_) approval_hook_(req);
}

}  // namespace scooprr
