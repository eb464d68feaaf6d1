#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "scooprr/cli.hpp"
#include "scooprr/trace.hpp"
#include "support/golden.hpp"

using namespace scooprr;
namespace fs = std::filesystem;

namespace {

// The command implementations talk to std::cout/std::cerr; swap the buffers
// for the duration of a call.
struct Capture {
  std::ostringstream out, err;
  std::streambuf* old_out;
  std::streambuf* old_err;
  Capture()
      : old_out(std::cout.rdbuf(out.rdbuf())),
        old_err(std::cerr.rdbuf(err.rdbuf())) {}
  ~Capture() {
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
  }
};

bool has(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "scooprr-cli-tests";
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& content) {
  const fs::path path = temp_dir() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path.string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(std::vector<std::string> args, std::string* out = nullptr,
            std::string* err = nullptr) {
  args.insert(args.begin(), "scoop-rr");
  std::vector<char*> argv;
  argv.reserve(args.size());
  for (std::string& a : args) argv.push_back(a.data());
  Capture cap;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data());
  if (out) *out = cap.out.str();
  if (err) *err = cap.err.str();
  return code;
}

}  // namespace

TEST_CASE("record reproduces the golden trace from the golden seed") {
  const std::string out_path = (temp_dir() / "record-golden.trace").string();
  RunConfig cfg;
  cfg.scenario = "market";
  cfg.seed = testsupport::kGoldenMarketSeed;
  cfg.trace_out = out_path;
  cfg.report = RunConfig::Report::Machine;

  Capture cap;
  const int code = cmd_record(cfg);
  CHECK(code == kExitDeadlocked);
  const std::string out = cap.out.str();
  CHECK(has(out, "scenario market"));
  CHECK(has(out, "mode free-run"));
  CHECK(has(out, "outcome deadlocked"));
  CHECK(has(out, std::string("fingerprint ") +
                     testsupport::kGoldenMarketFingerprint));
  CHECK(has(out, "total 9"));
  CHECK(has(out, "cycle root.1 root.4 root.2 root.3"));
  CHECK(has(out, "trace-out " + out_path));
  CHECK(read_file(out_path) == testsupport::golden_market_trace());
}

TEST_CASE("record text report spells out the deadlock") {
  RunConfig cfg;
  cfg.scenario = "market";
  cfg.seed = testsupport::kGoldenMarketSeed;

  Capture cap;
  CHECK(cmd_record(cfg) == kExitDeadlocked);
  const std::string out = cap.out.str();
  CHECK(has(out, "outcome: deadlocked after 9 approvals"));
  CHECK(has(out, "root.4 (held by root.2)"));
  CHECK(has(out, "cycle: root.1 -> root.4 -> root.2 -> root.3 -> root.1"));
}

TEST_CASE("replay of the golden trace deadlocks identically") {
  const std::string in_path =
      write_file("golden-replay.trace", testsupport::golden_market_trace());
  const std::string out_path = (temp_dir() / "golden-rerecord.trace").string();

  RunConfig cfg;
  cfg.scenario = "market";
  cfg.mode = RunConfig::Mode::Replay;
  cfg.trace_in = in_path;
  cfg.trace_out = out_path;
  cfg.report = RunConfig::Report::Machine;

  Capture cap;
  CHECK(cmd_replay(cfg) == kExitDeadlocked);
  const std::string out = cap.out.str();
  CHECK(has(out, "mode replay"));
  CHECK(has(out, "trace-in " + in_path));
  CHECK(has(out, "outcome deadlocked"));
  CHECK(has(out, "wait-for root.1 root.2"));
  CHECK(has(out, "wait-for root.2 root.1"));
  CHECK(has(out, "cycle root.1 root.4 root.2 root.3"));
  CHECK(read_file(out_path) == testsupport::golden_market_trace());
}

TEST_CASE("run picks free-run or replay from its flags") {
  const std::string golden =
      write_file("run-golden.trace", testsupport::golden_market_trace());

  RunConfig free_cfg;
  free_cfg.scenario = "producer-consumer";
  free_cfg.seed = 7;
  free_cfg.items = 2;
  {
    Capture cap;
    CHECK(cmd_run(free_cfg) == kExitTerminated);
  }

  RunConfig replay_cfg;
  replay_cfg.scenario = "market";
  replay_cfg.trace_in = golden;
  {
    Capture cap;
    CHECK(cmd_run(replay_cfg) == kExitDeadlocked);
  }

  RunConfig neither;
  neither.scenario = "market";
  {
    Capture cap;
    CHECK(cmd_run(neither) == kExitFault);
    CHECK(has(cap.err.str(), "run needs"));
  }
}

TEST_CASE("replaying a trace from another scenario diverges") {
  RunConfig rec;
  rec.scenario = "producer-consumer";
  rec.seed = 3;
  rec.items = 2;
  rec.trace_out = (temp_dir() / "pc.trace").string();
  {
    Capture cap;
    CHECK(cmd_record(rec) == kExitTerminated);
  }

  RunConfig rep;
  rep.scenario = "market";
  rep.trace_in = rec.trace_out;
  Capture cap;
  CHECK(cmd_replay(rep) == kExitDiverged);
  CHECK(has(cap.err.str(), "replay divergence"));
}

TEST_CASE("verify approves records of every scenario") {
  for (const auto& [scenario, seed] :
       std::vector<std::pair<std::string, uint64_t>>{
           {"market", testsupport::kGoldenMarketSeed},
           {"market", 4},
           {"fig1", 9},
           {"producer-consumer", 5}}) {
    CAPTURE(scenario);
    CAPTURE(seed);
    RunConfig cfg;
    cfg.scenario = scenario;
    cfg.seed = seed;
    cfg.report = RunConfig::Report::Machine;
    Capture cap;
    CHECK(cmd_verify(cfg) == kExitTerminated);
    CHECK(has(cap.out.str(), "verify ok"));
  }
}

TEST_CASE("verify accepts the golden trace as input") {
  RunConfig cfg;
  cfg.scenario = "market";
  cfg.trace_in =
      write_file("verify-golden.trace", testsupport::golden_market_trace());
  Capture cap;
  CHECK(cmd_verify(cfg) == kExitTerminated);
  CHECK(has(cap.out.str(), "ok"));
}

TEST_CASE("verify flags a swapped but well-formed trace as a mismatch") {
  // Valid partition, wrong program: the investors' interval lists traded
  // places.
  const std::string swapped =
      "SCOOP-RR 1\n"
      "total 9\n"
      "proc root 1-1\n"
      "proc root.1 4-4 8-8\n"
      "proc root.2 2-2 6-6\n"
      "proc root.3 3-3 7-7\n"
      "proc root.4 5-5 9-9\n";
  RunConfig cfg;
  cfg.scenario = "market";
  cfg.trace_in = write_file("swapped.trace", swapped);
  cfg.report = RunConfig::Report::Machine;
  Capture cap;
  CHECK(cmd_verify(cfg) == kExitMismatch);
  CHECK(has(cap.out.str(), "verify mismatch"));
  CHECK(has(cap.out.str(), "difference "));
}

TEST_CASE("verify needs a seed or a trace") {
  RunConfig cfg;
  cfg.scenario = "market";
  Capture cap;
  CHECK(cmd_verify(cfg) == kExitFault);
  CHECK(has(cap.err.str(), "verify needs"));
}

TEST_CASE("malformed traces exit 1 and cite a line") {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"bad-magic.trace", "BOGUS 1\ntotal 1\nproc root 1-1\n"},
      {"bad-total.trace", "SCOOP-RR 1\ntotal 8\nproc root 1-1\n"},
      {"overlap.trace",
       "SCOOP-RR 1\ntotal 3\nproc root 1-2\nproc root.1 2-3\n"},
      {"adjacent.trace", "SCOOP-RR 1\ntotal 2\nproc root 1-1 2-2\n"},
      {"unsorted.trace",
       "SCOOP-RR 1\ntotal 2\nproc root.2 1-1\nproc root.1 2-2\n"},
      {"syntax.trace", "SCOOP-RR 1\ntotal 1\nproc root one-one\n"},
  };
  for (const auto& [name, text] : cases) {
    CAPTURE(name);
    RunConfig cfg;
    cfg.scenario = "market";
    cfg.trace_in = write_file(name, text);
    Capture cap;
    CHECK(cmd_replay(cfg) == kExitFault);
    CHECK(has(cap.err.str(), "malformed trace"));
    CHECK(has(cap.err.str(), "(line "));
  }
}

TEST_CASE("unknown scenarios exit 1") {
  RunConfig cfg;
  cfg.scenario = "nonsense";
  cfg.seed = 0;
  Capture cap;
  CHECK(cmd_record(cfg) == kExitFault);
  CHECK(has(cap.err.str(), "unknown scenario"));
}

TEST_CASE("budget exhaustion exits 1") {
  RunConfig cfg;
  cfg.scenario = "market";
  cfg.seed = 0;
  cfg.step_budget = 5;
  Capture cap;
  CHECK(cmd_record(cfg) == kExitFault);
  CHECK(has(cap.err.str(), "budget exhausted"));
}

TEST_CASE("fuzz summarizes distinct schedules and writes witnesses") {
  const fs::path out_dir = temp_dir() / "fig1-witnesses";
  fs::remove_all(out_dir);

  FuzzConfig cfg;
  cfg.scenario = "fig1";
  cfg.seed_from = 0;
  cfg.seed_count = 60;
  cfg.out_dir = out_dir.string();
  cfg.report = RunConfig::Report::Machine;

  Capture cap;
  CHECK(cmd_fuzz(cfg) == kExitTerminated);
  const std::string out = cap.out.str();
  CHECK(has(out, "seed-from 0"));
  CHECK(has(out, "seed-count 60"));
  CHECK(has(out, "seeds-run 60"));
  CHECK(has(out, "distinct 2"));
  CHECK(has(out, "schedule 9b25eda4b8cfaf91 terminated"));
  CHECK(has(out, "schedule c59845bc41b2cca1 terminated"));

  for (const std::string fp : {"9b25eda4b8cfaf91", "c59845bc41b2cca1"}) {
    const fs::path witness = out_dir / (fp + ".trace");
    REQUIRE(fs::exists(witness));
    const LogicalSchedule s = trace_read_file(witness.string());
    CHECK(fingerprint_hex(schedule_fingerprint(s)) == fp);
  }
}

TEST_CASE("cli_main wires the subcommands to their exit codes") {
  const std::string golden =
      write_file("cli-golden.trace", testsupport::golden_market_trace());
  const std::string out_path = (temp_dir() / "cli-out.trace").string();

  std::string out, err;
  CHECK(run_cli({"record", "--scenario", "producer-consumer", "--items", "2",
                 "--seed", "3", "--out", out_path, "--report", "machine"},
                &out, &err) == kExitTerminated);
  CHECK(has(out, "outcome terminated"));

  CHECK(run_cli({"replay", "--scenario", "market", "--in", golden}, &out,
                &err) == kExitDeadlocked);
  CHECK(has(out, "deadlock"));

  CHECK(run_cli({"verify", "--scenario", "market", "--seed",
                 std::to_string(testsupport::kGoldenMarketSeed)},
                &out, &err) == kExitTerminated);

  CHECK(run_cli({"fuzz", "--scenario", "fig1", "--seed-count", "10"}, &out,
                &err) == kExitTerminated);
  CHECK(has(out, "distinct"));
}

TEST_CASE("cli_main maps parse errors to exit 1 and help to exit 0") {
  std::string out, err;
  CHECK(run_cli({"replay", "--scenario", "market"}, &out, &err) == kExitFault);
  CHECK(run_cli({"bogus-subcommand"}, &out, &err) == kExitFault);
  CHECK(run_cli({}, &out, &err) == kExitFault);
  CHECK(run_cli({"--help"}, &out, &err) == kExitTerminated);
  CHECK(has(out, "record"));
  CHECK(run_cli({"record", "--scenario", "market", "--report", "sideways"},
                &out, &err) == kExitFault);
}
