// Python face of the runtime: record/replay/verify/fuzz plus trace
// validation, returning plain dicts and lists so callers need no bindings
// for the C++ types. Faults surface as the scooprr.Fault exception.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "scooprr/analysis.hpp"
#include "scooprr/fault.hpp"
#include "scooprr/runner.hpp"
#include "scooprr/scenarios.hpp"
#include "scooprr/trace.hpp"

namespace py = pybind11;
using namespace scooprr;

namespace {

std::map<std::string, int64_t> overrides_of(const py::object& items) {
  std::map<std::string, int64_t> overrides;
  if (!items.is_none()) overrides.emplace("items", items.cast<int64_t>());
  return overrides;
}

py::object value_py(const Value& v) {
  if (const auto* n = std::get_if<int64_t>(&v)) return py::int_(*n);
  if (const auto* b = std::get_if<bool>(&v)) return py::bool_(*b);
  if (const auto* p = std::get_if<ProcessorId>(&v)) return py::str(p->str());
  const IntList& xs = std::get<IntList>(v);
  py::list out;
  for (int64_t x : xs) out.append(x);
  return out;
}

py::dict schedule_dict(const LogicalSchedule& s) {
  py::dict procs;
  for (const auto& [p, intervals] : s.per_processor) {
    py::list spans;
    for (const Interval& iv : intervals)
      spans.append(py::make_tuple(iv.l, iv.u));
    procs[py::str(p.str())] = spans;
  }
  py::dict d;
  d["total"] = s.total;
  d["processors"] = procs;
  d["fingerprint"] = fingerprint_hex(schedule_fingerprint(s));
  return d;
}

py::dict result_dict(const RunResult& r) {
  py::dict d;
  d["outcome"] = std::string(outcome_name(r.outcome));
  d["schedule"] = schedule_dict(r.schedule);
  d["trace"] = trace_encode(r.schedule);

  py::list cycle;
  for (const ProcessorId& p : r.deadlock.cycle) cycle.append(p.str());
  d["cycle"] = cycle;

  py::list blocked;
  for (const BlockedRequest& b : r.deadlock.blocked) {
    py::dict entry;
    entry["requester"] = b.requester.str();
    py::list wanted;
    for (const auto& [target, holder] : b.wanted)
      wanted.append(py::make_tuple(target.str(), holder.str()));
    entry["wanted"] = wanted;
    entry["wait"] = b.wait_name;
    entry["wait_holds"] = b.wait_holds;
    blocked.append(entry);
  }
  d["blocked"] = blocked;

  py::list approvals;
  for (const ProcessorId& p : r.approvals) approvals.append(p.str());
  d["approvals"] = approvals;

  py::dict objects;
  for (const auto& [p, obj] : r.final_objects) {
    py::dict fields;
    for (const auto& [name, value] : obj)
      fields[py::str(name)] = value_py(value);
    objects[py::str(p.str())] = fields;
  }
  d["objects"] = objects;
  return d;
}

py::dict do_record(const std::string& scenario, uint64_t seed,
                   const py::object& items, uint64_t budget) {
  const Scenario sc = make_scenario(scenario, overrides_of(items));
  return result_dict(run_record(sc, seed, budget));
}

py::dict do_replay(const std::string& scenario, const std::string& trace,
                   const py::object& items, uint64_t budget) {
  const Scenario sc = make_scenario(scenario, overrides_of(items));
  const LogicalSchedule schedule = trace_decode(trace);
  return result_dict(run_replay(sc, schedule, budget));
}

py::dict do_verify(const std::string& scenario, const py::object& seed,
                   const py::object& trace, const py::object& items,
                   uint64_t budget) {
  const Scenario sc = make_scenario(scenario, overrides_of(items));

  std::string difference;
  std::string outcome = "terminated";
  std::string fingerprint;
  try {
    if (!trace.is_none()) {
      const LogicalSchedule reference = trace_decode(trace.cast<std::string>());
      const RunResult replayed = run_replay(sc, reference, budget);
      outcome = outcome_name(replayed.outcome);
      fingerprint = fingerprint_hex(schedule_fingerprint(reference));
      difference = first_schedule_difference(reference, replayed.schedule);
    } else if (!seed.is_none()) {
      const RunResult recorded = run_record(sc, seed.cast<uint64_t>(), budget);
      const RunResult replayed = run_replay(sc, recorded.schedule, budget);
      outcome = outcome_name(recorded.outcome);
      fingerprint = fingerprint_hex(schedule_fingerprint(recorded.schedule));
      difference =
          first_schedule_difference(recorded.schedule, replayed.schedule);
      if (difference.empty() && recorded.outcome != replayed.outcome) {
        difference = std::string("outcome ") + outcome_name(recorded.outcome) +
                     " vs " + outcome_name(replayed.outcome);
      }
    } else {
      raise(FaultCode::Internal, "verify needs a seed or a trace");
    }
  } catch (const Fault& fault) {
    // A diverging or short replay is a verification failure, not an error.
    if (fault.code() != FaultCode::ReplayDivergence &&
        fault.code() != FaultCode::IncompleteReplay)
      throw;
    difference = fault.what();
  }

  py::dict d;
  d["ok"] = difference.empty();
  d["outcome"] = outcome;
  d["fingerprint"] = fingerprint;
  d["difference"] = difference;
  return d;
}

py::dict do_fuzz(const std::string& scenario, uint64_t seed_from,
                 uint64_t seed_count, const py::object& items,
                 uint64_t budget) {
  const Scenario sc = make_scenario(scenario, overrides_of(items));
  const FuzzSummary summary = fuzz(sc, seed_from, seed_count, budget);

  py::list schedules;
  for (const auto& [fp, outcome] : summary.outcomes) {
    py::dict entry;
    entry["fingerprint"] = fingerprint_hex(fp);
    entry["outcome"] = std::string(outcome_name(outcome));
    entry["seed"] = summary.witness_seeds.at(fp);
    entry["trace"] = trace_encode(summary.schedules.at(fp));
    schedules.append(entry);
  }

  py::dict d;
  d["seeds_run"] = summary.seeds_run;
  d["distinct"] = summary.distinct_schedules();
  d["schedules"] = schedules;
  return d;
}

std::string do_validate_trace(const std::string& text) {
  return trace_encode(trace_decode(text));
}

}  // namespace

PYBIND11_MODULE(scooprr, m) {
  m.doc() =
      "Deterministic record/replay for cooperative active-object programs: "
      "free runs record logical processor schedules, replays reproduce them "
      "approval by approval.";

  py::register_exception<Fault>(m, "Fault");

  m.def("list_scenarios", &scenario_names,
        "Names accepted as the `scenario` argument, sorted.");

  m.def("record", &do_record, py::arg("scenario"), py::arg("seed") = 0,
        py::arg("items") = py::none(),
        py::arg("budget") = Kernel::kDefaultBudget,
        "Free run under the seed; returns outcome, schedule, trace text, "
        "deadlock details, and final object states.");

  m.def("replay", &do_replay, py::arg("scenario"), py::arg("trace"),
        py::arg("items") = py::none(),
        py::arg("budget") = Kernel::kDefaultBudget,
        "Replay canonical trace text; raises Fault on divergence.");

  m.def("verify", &do_verify, py::arg("scenario"), py::arg("seed") = py::none(),
        py::arg("trace") = py::none(), py::arg("items") = py::none(),
        py::arg("budget") = Kernel::kDefaultBudget,
        "Record (or decode), replay, and compare; mismatches land in "
        "result['difference'] instead of raising.");

  m.def("fuzz", &do_fuzz, py::arg("scenario"), py::arg("seed_from") = 0,
        py::arg("seed_count") = 100, py::arg("items") = py::none(),
        py::arg("budget") = Kernel::kDefaultBudget,
        "Sweep consecutive seeds; returns one entry per distinct schedule "
        "with its first witness seed.");

  m.def("validate_trace", &do_validate_trace, py::arg("text"),
        "Round-trip trace text through the codec; returns the canonical "
        "form or raises Fault.");
}
