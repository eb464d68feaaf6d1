#include "scooprr/schedule.hpp"

#include <algorithm>
#include <sstream>

#include "scooprr/fault.hpp"

namespace scooprr {

namespace {

std::string interval_str(const Interval& iv) {
  std::ostringstream out;
  out << '[' << iv.l << ',' << iv.u << ']';
  return out.str();
}

}  // namespace

std::optional<ScheduleDefect> schedule_defect(const LogicalSchedule& s) {
  // Per-list shape first: bounds, order, same-processor separation.
  for (const auto& [p, items] : s.per_processor) {
    if (items.empty())
      return ScheduleDefect{"empty interval list for " + p.str(), p};
    for (size_t i = 0; i < items.size(); ++i) {
      const Interval& iv = items[i];
      if (iv.l < 1 || iv.l > iv.u)
        return ScheduleDefect{"bad interval " + interval_str(iv), p};
      if (i == 0) continue;
      const Interval& prev = items[i - 1];
      if (iv.l < prev.l) {
        return ScheduleDefect{"intervals not in increasing order: " +
                                  interval_str(prev) + " then " + interval_str(iv),
                              p};
      }
      if (iv.l <= prev.u) {
        return ScheduleDefect{"overlapping intervals " + interval_str(prev) +
                                  " and " + interval_str(iv) + " for " + p.str(),
                              p};
      }
      if (iv.l == prev.u + 1) {
        return ScheduleDefect{"adjacent intervals " + interval_str(prev) + " and " +
                                  interval_str(iv) + " for one processor " + p.str(),
                              p};
      }
    }
  }

  // Cross-processor: the union of all intervals must be exactly {1..total},
  // pairwise disjoint.
  struct Owned {
    Interval iv;
    const ProcessorId* p;
  };
  std::vector<Owned> all;
  for (const auto& [p, items] : s.per_processor)
    for (const Interval& iv : items) all.push_back({iv, &p});
  std::sort(all.begin(), all.end(),
            [](const Owned& a, const Owned& b) { return a.iv.l < b.iv.l; });

  uint64_t covered = 0;  // union verified to be exactly {1..covered}
  for (const Owned& o : all) {
    if (o.iv.l <= covered) {
      return ScheduleDefect{"overlapping intervals at " + std::to_string(o.iv.l) +
                                " (" + o.p->str() + ")",
                            *o.p};
    }
    if (o.iv.l != covered + 1) {
      return ScheduleDefect{
          "total does not match interval union: approval " +
              std::to_string(covered + 1) + " is missing",
          *o.p};
    }
    covered = o.iv.u;
  }
  if (covered != s.total) {
    return ScheduleDefect{"total does not match interval union: total " +
                              std::to_string(s.total) + ", union ends at " +
                              std::to_string(covered),
                          std::nullopt};
  }
  return std::nullopt;
}

std::string schedule_validate(const LogicalSchedule& s) {
  auto defect = schedule_defect(s);
  return defect ? defect->message : std::string{};
}

Recorder::Recorder() = default;

void Recorder::on_approved(const ProcessorId& p) {
  if (finished_)
    raise(FaultCode::Internal, "approval after recorder terminated");
  auto it = open_.find(p);
  if (it == open_.end()) {
    // First approval for p: start its run at the current global counter.
    open_.emplace(p, OpenRun{counter_g_, 1});
  } else if (counter_g_ == it->second.base + it->second.count) {
    // p's run is still in step with the global counter: extend it.
    it->second.count += 1;
  } else {
    // Someone else was approved in between: close p's run, start a new one.
    schedule_.per_processor[p].push_back(
        Interval{it->second.base + 1, it->second.base + it->second.count});
    it->second = OpenRun{counter_g_, 1};
  }
  counter_g_ += 1;
}

const LogicalSchedule& Recorder::on_terminate() {
  if (finished_) return schedule_;
  for (auto& [p, run] : open_) {
    schedule_.per_processor[p].push_back(
        Interval{run.base + 1, run.base + run.count});
  }
  open_.clear();
  schedule_.total = counter_g_;
  finished_ = true;
  return schedule_;
}

Replayer::Replayer(LogicalSchedule schedule) : schedule_(std::move(schedule)) {
  if (auto defect = schedule_defect(schedule_))
    raise(FaultCode::MalformedSchedule, defect->message);
}

Replayer::Check Replayer::check(const ProcessorId& p) {
  auto it = schedule_.per_processor.find(p);
  if (it == schedule_.per_processor.end()) return Check::NotOk;
  // Lists are strictly increasing: the only candidate is the first interval
  // whose upper bound has not been passed yet.
  for (const Interval& iv : it->second) {
    if (iv.u < counter_g_) continue;
    if (iv.l <= counter_g_) {
      counter_g_ += 1;
      return Check::Ok;
    }
    return Check::NotOk;
  }
  return Check::NotOk;
}

void Replayer::assert_complete() const {
  if (counter_g_ != schedule_.total + 1) {
    raise(FaultCode::IncompleteReplay,
          "replay stuck at approval " + std::to_string(counter_g_) + " of " +
              std::to_string(schedule_.total));
  }
}

}  // namespace scooprr
