#include "scooprr/cli.hpp"

#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "scooprr/analysis.hpp"
#include "scooprr/fault.hpp"
#include "scooprr/runner.hpp"
#include "scooprr/scenarios.hpp"
#include "scooprr/trace.hpp"

namespace scooprr {

namespace {

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const Fault& fault) {
    std::cerr << "fault: " << fault.what() << "\n";
    return fault.code() == FaultCode::ReplayDivergence ? kExitDiverged
                                                       : kExitFault;
  } catch (const std::exception& e) {
    std::cerr << "fault: " << e.what() << "\n";
    return kExitFault;
  }
}

std::map<std::string, int64_t> overrides_of(const std::optional<int64_t>& items) {
  std::map<std::string, int64_t> overrides;
  if (items) overrides.emplace("items", *items);
  return overrides;
}

int outcome_exit(RunOutcomeKind outcome) {
  return outcome == RunOutcomeKind::Terminated ? kExitTerminated
                                               : kExitDeadlocked;
}

std::string intervals_str(const IntervalList& intervals) {
  std::string out;
  for (const Interval& iv : intervals) {
    if (!out.empty()) out += " ";
    out += std::to_string(iv.l) + "-" + std::to_string(iv.u);
  }
  return out;
}

std::string cycle_arrows(const std::vector<ProcessorId>& cycle) {
  std::string out;
  for (const ProcessorId& p : cycle) out += p.str() + " -> ";
  out += cycle.front().str();
  return out;
}

void print_run_machine(std::ostream& os, const std::string& scenario,
                       const std::string& mode, const std::string& source_key,
                       const std::string& source_value, const RunResult& r,
                       const std::string& trace_out) {
  os << "scenario " << scenario << "\n";
  os << "mode " << mode << "\n";
  if (!source_key.empty()) os << source_key << " " << source_value << "\n";
  os << "outcome " << outcome_name(r.outcome) << "\n";
  os << "fingerprint " << fingerprint_hex(schedule_fingerprint(r.schedule))
     << "\n";
  os << "total " << r.schedule.total << "\n";
  for (const auto& [p, intervals] : r.schedule.per_processor)
    os << "proc " << p.str() << " " << intervals_str(intervals) << "\n";
  for (const BlockedRequest& b : r.deadlock.blocked) {
    os << "blocked " << b.requester.str() << " wants ";
    if (b.wanted.empty()) {
      os << "-";
    } else {
      for (size_t i = 0; i < b.wanted.size(); ++i)
        os << (i ? "," : "") << b.wanted[i].first.str();
    }
    os << " wait-holds " << (b.wait_holds ? "yes" : "no") << " wait "
       << b.wait_name << "\n";
  }
  for (const auto& [requester, holder] : r.deadlock.wait_for)
    os << "wait-for " << requester.str() << " " << holder.str() << "\n";
  if (!r.deadlock.cycle.empty()) {
    os << "cycle";
    for (const ProcessorId& p : r.deadlock.cycle) os << " " << p.str();
    os << "\n";
  }
  if (!trace_out.empty()) os << "trace-out " << trace_out << "\n";
}

void print_run_text(std::ostream& os, const std::string& scenario,
                    const std::string& mode_phrase, const RunResult& r,
                    const std::string& trace_out) {
  os << scenario << ": " << mode_phrase << "\n";
  os << "outcome: " << outcome_name(r.outcome) << " after " << r.schedule.total
     << " approvals\n";
  os << "fingerprint: " << fingerprint_hex(schedule_fingerprint(r.schedule))
     << "\n";
  os << "schedule:\n";
  size_t width = 0;
  for (const auto& [p, intervals] : r.schedule.per_processor)
    width = std::max(width, p.str().size());
  for (const auto& [p, intervals] : r.schedule.per_processor) {
    std::string id = p.str();
    os << "  " << id << std::string(width - id.size() + 2, ' ')
       << intervals_str(intervals) << "\n";
  }
  if (!r.deadlock.blocked.empty()) {
    os << "deadlock:\n";
    for (const BlockedRequest& b : r.deadlock.blocked) {
      os << "  " << b.requester.str();
      if (b.wanted.empty()) {
        os << " waits: condition " << b.wait_name << " not satisfied\n";
        continue;
      }
      os << " wants";
      for (size_t i = 0; i < b.wanted.size(); ++i) {
        os << (i ? "," : "") << " " << b.wanted[i].first.str() << " (held by "
           << b.wanted[i].second.str() << ")";
      }
      os << "; wait " << b.wait_name << (b.wait_holds ? " holds" : " fails")
         << "\n";
    }
    if (!r.deadlock.cycle.empty())
      os << "  cycle: " << cycle_arrows(r.deadlock.cycle) << "\n";
  }
  if (!trace_out.empty()) os << "trace written: " << trace_out << "\n";
}

void print_run_report(const RunConfig& config, const std::string& mode,
                      const std::string& source_key,
                      const std::string& source_value, const RunResult& r) {
  if (config.report == RunConfig::Report::Machine) {
    print_run_machine(std::cout, config.scenario, mode, source_key,
                      source_value, r, config.trace_out);
  } else {
    const std::string phrase = mode == "replay"
                                   ? "replay of " + source_value
                                   : "free run with seed " + source_value;
    print_run_text(std::cout, config.scenario, phrase, r, config.trace_out);
  }
}

}  // namespace

int cmd_record(const RunConfig& config) {
  return guarded([&] {
    Scenario scenario = make_scenario(config.scenario, overrides_of(config.items));
    RunResult r =
        run_record(scenario, config.seed.value_or(0), config.step_budget);
    if (!config.trace_out.empty()) trace_write_file(config.trace_out, r.schedule);
    print_run_report(config, "free-run", "seed",
                     std::to_string(config.seed.value_or(0)), r);
    return outcome_exit(r.outcome);
  });
}

int cmd_replay(const RunConfig& config) {
  return guarded([&] {
    Scenario scenario = make_scenario(config.scenario, overrides_of(config.items));
    LogicalSchedule schedule = trace_read_file(config.trace_in);
    RunResult r = run_replay(scenario, schedule, config.step_budget);
    if (!config.trace_out.empty()) trace_write_file(config.trace_out, r.schedule);
    print_run_report(config, "replay", "trace-in", config.trace_in, r);
    return outcome_exit(r.outcome);
  });
}

int cmd_run(const RunConfig& config) {
  return guarded([&] {
    Scenario scenario = make_scenario(config.scenario, overrides_of(config.items));
    if (!config.trace_in.empty()) {
      RunResult r = run_replay(scenario, trace_read_file(config.trace_in),
                               config.step_budget);
      print_run_report(config, "replay", "trace-in", config.trace_in, r);
      return outcome_exit(r.outcome);
    }
    if (!config.seed) {
      std::cerr << "fault: run needs --seed (free run) or --in (replay)\n";
      return static_cast<int>(kExitFault);
    }
    RunResult r = run_record(scenario, *config.seed, config.step_budget);
    print_run_report(config, "free-run", "seed", std::to_string(*config.seed), r);
    return outcome_exit(r.outcome);
  });
}

int cmd_verify(const RunConfig& config) {
  return guarded([&] {
    Scenario scenario = make_scenario(config.scenario, overrides_of(config.items));
    const bool from_trace = !config.trace_in.empty();
    if (!from_trace && !config.seed) {
      std::cerr << "fault: verify needs --seed or --in\n";
      return static_cast<int>(kExitFault);
    }

    std::string difference;
    RunOutcomeKind outcome = RunOutcomeKind::Terminated;
    LogicalSchedule reference;
    try {
      if (from_trace) {
        reference = trace_read_file(config.trace_in);
        RunResult replayed = run_replay(scenario, reference, config.step_budget);
        outcome = replayed.outcome;
        difference = first_schedule_difference(reference, replayed.schedule);
      } else {
        RunResult recorded =
            run_record(scenario, *config.seed, config.step_budget);
        reference = recorded.schedule;
        RunResult replayed =
            run_replay(scenario, recorded.schedule, config.step_budget);
        outcome = recorded.outcome;
        difference =
            first_schedule_difference(recorded.schedule, replayed.schedule);
        if (difference.empty() && recorded.outcome != replayed.outcome) {
          difference = std::string("outcome ") + outcome_name(recorded.outcome) +
                       " vs " + outcome_name(replayed.outcome);
        }
      }
    } catch (const Fault& fault) {
      // A gate starving the program (or left unconsumed) is a verification
      // failure, not a plain fault.
      if (fault.code() != FaultCode::ReplayDivergence &&
          fault.code() != FaultCode::IncompleteReplay)
        throw;
      difference = fault.what();
    }

    const std::string source_key = from_trace ? "trace-in" : "seed";
    const std::string source_value =
        from_trace ? config.trace_in : std::to_string(*config.seed);
    if (config.report == RunConfig::Report::Machine) {
      std::cout << "scenario " << config.scenario << "\n";
      std::cout << source_key << " " << source_value << "\n";
      if (difference.empty()) {
        std::cout << "verify ok\n";
        std::cout << "outcome " << outcome_name(outcome) << "\n";
        std::cout << "fingerprint "
                  << fingerprint_hex(schedule_fingerprint(reference)) << "\n";
      } else {
        std::cout << "verify mismatch\n";
        std::cout << "difference " << difference << "\n";
      }
    } else {
      std::cout << "verify " << config.scenario << " " << source_key << " "
                << source_value << ": ";
      if (difference.empty()) {
        std::cout << "ok (" << outcome_name(outcome) << ", fingerprint "
                  << fingerprint_hex(schedule_fingerprint(reference)) << ")\n";
      } else {
        std::cout << "MISMATCH\n  " << difference << "\n";
      }
    }
    return difference.empty() ? kExitTerminated
                              : static_cast<int>(kExitMismatch);
  });
}

int cmd_fuzz(const FuzzConfig& config) {
  return guarded([&] {
    Scenario scenario = make_scenario(config.scenario, overrides_of(config.items));
    FuzzSummary summary =
        fuzz(scenario, config.seed_from, config.seed_count, config.step_budget);

    std::map<uint64_t, std::string> witness_paths;
    if (!config.out_dir.empty()) {
      std::filesystem::create_directories(config.out_dir);
      for (const auto& [fp, schedule] : summary.schedules) {
        std::string path = config.out_dir + "/" + fingerprint_hex(fp) + ".trace";
        trace_write_file(path, schedule);
        witness_paths.emplace(fp, std::move(path));
      }
    }

    if (config.report == RunConfig::Report::Machine) {
      std::cout << "scenario " << config.scenario << "\n";
      std::cout << "seed-from " << config.seed_from << "\n";
      std::cout << "seed-count " << config.seed_count << "\n";
      std::cout << "seeds-run " << summary.seeds_run << "\n";
      std::cout << "distinct " << summary.distinct_schedules() << "\n";
      for (const auto& [fp, outcome] : summary.outcomes) {
        std::cout << "schedule " << fingerprint_hex(fp) << " "
                  << outcome_name(outcome) << " seed "
                  << summary.witness_seeds.at(fp);
        auto it = witness_paths.find(fp);
        if (it != witness_paths.end()) std::cout << " trace " << it->second;
        std::cout << "\n";
      }
    } else {
      std::cout << "fuzz " << config.scenario << ": seeds [" << config.seed_from
                << ", " << config.seed_from + config.seed_count << ") -> "
                << summary.seeds_run << " runs, "
                << summary.distinct_schedules() << " distinct schedules\n";
      for (const auto& [fp, outcome] : summary.outcomes) {
        std::cout << "  " << fingerprint_hex(fp) << "  " << outcome_name(outcome)
                  << "  first seed " << summary.witness_seeds.at(fp);
        auto it = witness_paths.find(fp);
        if (it != witness_paths.end()) std::cout << "  -> " << it->second;
        std::cout << "\n";
      }
    }
    return static_cast<int>(kExitTerminated);
  });
}

namespace {

void add_report_option(CLI::App* cmd, std::string& report) {
  cmd->add_option("--report", report, "report style: text or machine")
      ->check(CLI::IsMember({"text", "machine"}));
}

RunConfig::Report report_of(const std::string& name) {
  return name == "machine" ? RunConfig::Report::Machine
                           : RunConfig::Report::Text;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"record/replay runtime for logical processor schedules"};
  app.require_subcommand(1);

  RunConfig run_cfg, record_cfg, replay_cfg, verify_cfg;
  FuzzConfig fuzz_cfg;
  std::string run_report = "text", record_report = "text",
              replay_report = "text", verify_report = "text",
              fuzz_report = "text";

  CLI::App* run = app.add_subcommand("run", "execute a scenario");
  run->add_option("--scenario", run_cfg.scenario, "scenario name")->required();
  run->add_option("--seed", run_cfg.seed, "free-run seed");
  run->add_option("--in", run_cfg.trace_in, "replay this trace");
  run->add_option("--items", run_cfg.items, "producer-consumer item count");
  run->add_option("--budget", run_cfg.step_budget, "kernel step budget");
  add_report_option(run, run_report);

  CLI::App* record = app.add_subcommand("record", "free run, write the trace");
  record->add_option("--scenario", record_cfg.scenario, "scenario name")
      ->required();
  record->add_option("--seed", record_cfg.seed, "free-run seed (default 0)");
  record->add_option("--out", record_cfg.trace_out, "trace file to write");
  record->add_option("--items", record_cfg.items, "producer-consumer item count");
  record->add_option("--budget", record_cfg.step_budget, "kernel step budget");
  add_report_option(record, record_report);

  CLI::App* replay = app.add_subcommand("replay", "re-run a recorded trace");
  replay->add_option("--scenario", replay_cfg.scenario, "scenario name")
      ->required();
  replay->add_option("--in", replay_cfg.trace_in, "trace file to replay")
      ->required();
  replay->add_option("--out", replay_cfg.trace_out,
                     "write the re-recorded trace here");
  replay->add_option("--items", replay_cfg.items, "producer-consumer item count");
  replay->add_option("--budget", replay_cfg.step_budget, "kernel step budget");
  add_report_option(replay, replay_report);

  CLI::App* verify = app.add_subcommand(
      "verify", "record, replay, and compare the schedules");
  verify->add_option("--scenario", verify_cfg.scenario, "scenario name")
      ->required();
  verify->add_option("--seed", verify_cfg.seed, "record with this seed first");
  verify->add_option("--in", verify_cfg.trace_in,
                     "verify this trace instead of recording");
  verify->add_option("--items", verify_cfg.items, "producer-consumer item count");
  verify->add_option("--budget", verify_cfg.step_budget, "kernel step budget");
  add_report_option(verify, verify_report);

  CLI::App* fuzz_cmd =
      app.add_subcommand("fuzz", "sweep seeds, summarize distinct schedules");
  fuzz_cmd->add_option("--scenario", fuzz_cfg.scenario, "scenario name")
      ->required();
  fuzz_cmd->add_option("--seed-from", fuzz_cfg.seed_from, "first seed");
  fuzz_cmd->add_option("--seed-count", fuzz_cfg.seed_count, "number of seeds");
  fuzz_cmd->add_option("--out-dir", fuzz_cfg.out_dir,
                       "write one witness trace per distinct schedule");
  fuzz_cmd->add_option("--items", fuzz_cfg.items, "producer-consumer item count");
  fuzz_cmd->add_option("--budget", fuzz_cfg.step_budget, "kernel step budget");
  add_report_option(fuzz_cmd, fuzz_report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitFault;
  }

  if (run->parsed()) {
    run_cfg.report = report_of(run_report);
    return cmd_run(run_cfg);
  }
  if (record->parsed()) {
    record_cfg.report = report_of(record_report);
    return cmd_record(record_cfg);
  }
  if (replay->parsed()) {
    replay_cfg.report = report_of(replay_report);
    return cmd_replay(replay_cfg);
  }
  if (verify->parsed()) {
    verify_cfg.report = report_of(verify_report);
    return cmd_verify(verify_cfg);
  }
  fuzz_cfg.report = report_of(fuzz_report);
  return cmd_fuzz(fuzz_cfg);
}

}  // namespace scooprr
