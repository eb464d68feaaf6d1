#include "scooprr/analysis.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "scooprr/fault.hpp"
#include "scooprr/trace.hpp"

namespace scooprr {

bool schedules_equal(const LogicalSchedule& a, const LogicalSchedule& b) {
  return a == b;
}

namespace {

std::string interval_str(const Interval& iv) {
  return std::to_string(iv.l) + "-" + std::to_string(iv.u);
}

}  // namespace

std::string first_schedule_difference(const LogicalSchedule& a,
                                      const LogicalSchedule& b) {
  std::set<ProcessorId> ids;
  for (const auto& [p, ivs] : a.per_processor) ids.insert(p);
  for (const auto& [p, ivs] : b.per_processor) ids.insert(p);
  for (const ProcessorId& p : ids) {
    auto ia = a.per_processor.find(p);
    auto ib = b.per_processor.find(p);
    if (ia == a.per_processor.end())
      return p.str() + ": absent on one side, " + interval_str(ib->second[0]) +
             "... on the other";
    if (ib == b.per_processor.end())
      return p.str() + ": " + interval_str(ia->second[0]) +
             "... on one side, absent on the other";
    const IntervalList& xa = ia->second;
    const IntervalList& xb = ib->second;
    for (size_t i = 0; i < xa.size() && i < xb.size(); ++i) {
      if (!(xa[i] == xb[i]))
        return p.str() + ": interval " + std::to_string(i + 1) + " differs, " +
               interval_str(xa[i]) + " vs " + interval_str(xb[i]);
    }
    if (xa.size() != xb.size())
      return p.str() + ": " + std::to_string(xa.size()) + " vs " +
             std::to_string(xb.size()) + " intervals";
  }
  if (a.total != b.total)
    return "total " + std::to_string(a.total) + " vs " +
           std::to_string(b.total);
  return "";
}

namespace {

// First cycle of the requester→holder relation under a deterministic
// depth-first order (sorted start nodes, sorted neighbors).
std::vector<ProcessorId> find_cycle(
    const std::map<ProcessorId, std::vector<ProcessorId>>& adj) {
  enum class Color { White, Gray, Black };
  std::map<ProcessorId, Color> color;
  std::vector<ProcessorId> path;
  std::vector<ProcessorId> found;

  std::function<bool(const ProcessorId&)> visit = [&](const ProcessorId& node) {
    color[node] = Color::Gray;
    path.push_back(node);
    auto it = adj.find(node);
    if (it != adj.end()) {
      for (const ProcessorId& next : it->second) {
        auto c = color.find(next);
        if (c != color.end() && c->second == Color::Gray) {
          auto start = std::find(path.begin(), path.end(), next);
          found.assign(start, path.end());
          return true;
        }
        if (c == color.end() || c->second == Color::White) {
          if (visit(next)) return true;
        }
      }
    }
    path.pop_back();
    color[node] = Color::Black;
    return false;
  };

  for (const auto& [node, out] : adj) {
    auto c = color.find(node);
    if (c == color.end() || c->second == Color::White) {
      if (visit(node)) return found;
    }
  }
  return {};
}

}  // namespace

DeadlockReport detect_deadlock(const Kernel& kernel) {
  DeadlockReport report;
  const std::vector<LockingRequest>& pending = kernel.arbiter().pending();
  if (pending.empty()) return report;

  // requester → (obstructing target, its holder)
  std::map<ProcessorId, std::vector<std::pair<ProcessorId, ProcessorId>>> held;
  for (const LockingRequest& req : pending) {
    BlockedRequest b;
    b.requester = req.requester;
    b.wait_name = req.wait_name;
    b.wait_holds = eval_wait_condition(kernel, req);
    for (const ProcessorId& t : req.targets) {
      std::optional<ProcessorId> holder = kernel.locked_by(t);
      if (!holder) continue;
      b.wanted.emplace_back(t, *holder);
      held[req.requester].emplace_back(t, *holder);
      report.wait_for.emplace_back(req.requester, *holder);
    }
    report.blocked.push_back(std::move(b));
  }
  std::sort(report.wait_for.begin(), report.wait_for.end());
  report.wait_for.erase(
      std::unique(report.wait_for.begin(), report.wait_for.end()),
      report.wait_for.end());

  std::map<ProcessorId, std::vector<ProcessorId>> adj;
  for (const auto& [requester, obstructions] : held) {
    std::vector<ProcessorId>& out = adj[requester];
    for (const auto& [target, holder] : obstructions) out.push_back(holder);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }

  std::vector<ProcessorId> requesters = find_cycle(adj);
  if (requesters.empty()) return report;

  // Interleave each hop with the smallest target that realizes it.
  for (size_t i = 0; i < requesters.size(); ++i) {
    const ProcessorId& from = requesters[i];
    const ProcessorId& to = requesters[(i + 1) % requesters.size()];
    report.cycle.push_back(from);
    std::optional<ProcessorId> via;
    for (const auto& [target, holder] : held.at(from)) {
      if (holder == to && (!via || target < *via)) via = target;
    }
    if (!via) raise(FaultCode::Internal, "wait cycle edge without a target");
    report.cycle.push_back(*via);
  }
  auto least = std::min_element(report.cycle.begin(), report.cycle.end());
  std::rotate(report.cycle.begin(), least, report.cycle.end());
  return report;
}

FuzzSummary fuzz(const Scenario& scenario, uint64_t seed_from,
                 uint64_t seed_count, uint64_t step_budget) {
  FuzzSummary summary;
  for (uint64_t i = 0; i < seed_count; ++i) {
    const uint64_t seed = seed_from + i;
    try {
      FreeRunPolicy policy(seed);
      Kernel kernel(scenario, policy);
      kernel.set_step_budget(step_budget);
      Recorder recorder;
      kernel.attach_recorder(&recorder);
      RunOutcomeKind outcome = kernel.run_until_quiescent();
      const LogicalSchedule& schedule = recorder.on_terminate();
      const uint64_t fp = schedule_fingerprint(schedule);
      summary.seeds_run += 1;
      if (!summary.outcomes.count(fp)) {
        summary.outcomes.emplace(fp, outcome);
        summary.witness_seeds.emplace(fp, seed);
        summary.schedules.emplace(fp, schedule);
      }
    } catch (const Fault& fault) {
      raise(fault.code(),
            "seed " + std::to_string(seed) + ": " + fault.detail());
    }
  }
  return summary;
}

}  // namespace scooprr
