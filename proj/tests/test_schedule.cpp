#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "scooprr/fault.hpp"
#include "scooprr/schedule.hpp"
#include "support/oracle.hpp"

using namespace scooprr;
using testsupport::ApprovalSequenceGen;
using testsupport::maximal_run_schedule;

namespace {

ProcessorId pid(std::initializer_list<uint32_t> path) {
  return ProcessorId(std::vector<uint32_t>(path));
}

LogicalSchedule record_all(const std::vector<ProcessorId>& approvals) {
  Recorder rec;
  for (const auto& p : approvals) rec.on_approved(p);
  return rec.on_terminate();
}

// The market example's approval order: application, both investors and both
// markets interleaving as in the recorded deadlock run.
std::vector<ProcessorId> market_approvals() {
  const ProcessorId app = ProcessorId::root();
  const ProcessorId inv1 = pid({1}), inv2 = pid({2});
  const ProcessorId zurich = pid({3}), newyork = pid({4});
  return {app, inv1, zurich, inv2, newyork, inv1, zurich, inv2, newyork};
}

}  // namespace

TEST_CASE("recorder emits the market example schedule exactly") {
  LogicalSchedule s = record_all(market_approvals());
  CHECK(s.total == 9);
  REQUIRE(s.per_processor.size() == 5);
  CHECK(s.per_processor.at(ProcessorId::root()) == IntervalList{{1, 1}});
  CHECK(s.per_processor.at(pid({1})) == IntervalList{{2, 2}, {6, 6}});
  CHECK(s.per_processor.at(pid({2})) == IntervalList{{4, 4}, {8, 8}});
  CHECK(s.per_processor.at(pid({3})) == IntervalList{{3, 3}, {7, 7}});
  CHECK(s.per_processor.at(pid({4})) == IntervalList{{5, 5}, {9, 9}});
  CHECK(schedule_validate(s).empty());
}

TEST_CASE("uninterrupted run collapses to one interval") {
  const ProcessorId p = pid({1});
  LogicalSchedule s = record_all({p, p, p});
  CHECK(s.total == 3);
  CHECK(s.per_processor.at(p) == IntervalList{{1, 3}});
}

TEST_CASE("empty recording yields the empty schedule") {
  Recorder rec;
  LogicalSchedule s = rec.on_terminate();
  CHECK(s.total == 0);
  CHECK(s.per_processor.empty());
}

TEST_CASE("terminate is idempotent") {
  Recorder rec;
  rec.on_approved(pid({1}));
  const LogicalSchedule& first = rec.on_terminate();
  const LogicalSchedule& second = rec.on_terminate();
  CHECK(first == second);
  CHECK(&first == &second);
  CHECK_THROWS_AS(rec.on_approved(pid({1})), Fault);
}

TEST_CASE("processors that never got an approval are absent") {
  LogicalSchedule s = record_all({pid({2})});
  CHECK(s.per_processor.count(pid({1})) == 0);
  CHECK(s.per_processor.size() == 1);
}

TEST_CASE("recorder equals the maximal-run oracle on random sequences") {
  ApprovalSequenceGen gen(0x5eed5eed);
  for (int round = 0; round < 2000; ++round) {
    auto seq = gen.next(10, 200);
    LogicalSchedule got = record_all(seq);
    LogicalSchedule want = maximal_run_schedule(seq);
    REQUIRE(got == want);
    REQUIRE(schedule_validate(got).empty());
  }
}

TEST_CASE("schedule validation flags each defect class") {
  auto one_proc = [](IntervalList items, uint64_t total) {
    LogicalSchedule s;
    s.per_processor.emplace(pid({1}), std::move(items));
    s.total = total;
    return s;
  };

  CHECK(schedule_validate(one_proc({{1, 2}}, 2)).empty());
  CHECK(schedule_validate(one_proc({{2, 1}}, 2)).find("bad interval") !=
        std::string::npos);
  CHECK(schedule_validate(one_proc({{0, 1}}, 1)).find("bad interval") !=
        std::string::npos);
  CHECK(schedule_validate(one_proc({{4, 5}, {1, 2}}, 5))
            .find("not in increasing order") != std::string::npos);
  CHECK(schedule_validate(one_proc({{1, 3}, {2, 5}}, 5)).find("overlapping") !=
        std::string::npos);
  CHECK(schedule_validate(one_proc({{1, 2}, {3, 4}}, 4)).find("adjacent") !=
        std::string::npos);
  CHECK(schedule_validate(one_proc({{1, 2}}, 3)).find("total does not match") !=
        std::string::npos);
  CHECK(schedule_validate(one_proc({{2, 3}}, 3)).find("total does not match") !=
        std::string::npos);

  LogicalSchedule overlap;
  overlap.per_processor.emplace(pid({1}), IntervalList{{1, 2}});
  overlap.per_processor.emplace(pid({2}), IntervalList{{2, 3}});
  overlap.total = 3;
  CHECK(schedule_validate(overlap).find("overlapping") != std::string::npos);
}

TEST_CASE("replay gate walks the market schedule") {
  Replayer rep(record_all(market_approvals()));
  const ProcessorId app = ProcessorId::root();
  const ProcessorId inv1 = pid({1}), inv2 = pid({2});

  CHECK(rep.check(inv2) == Replayer::Check::NotOk);  // counter 1 is app's
  CHECK(rep.check(app) == Replayer::Check::Ok);
  CHECK(rep.counter() == 2);
  CHECK(rep.check(inv2) == Replayer::Check::NotOk);  // "the second investor must wait"
  CHECK(rep.check(inv1) == Replayer::Check::Ok);
  CHECK(rep.check(pid({3})) == Replayer::Check::Ok);
  CHECK(rep.counter() == 4);

  // Finish the walk in recorded order; the gate must accept every step.
  for (const ProcessorId& p :
       {inv2, pid({4}), inv1, pid({3}), inv2, pid({4})}) {
    REQUIRE(rep.check(p) == Replayer::Check::Ok);
  }
  CHECK(rep.counter() == 10);
  CHECK_NOTHROW(rep.assert_complete());
}

TEST_CASE("replay gate accepts exactly the recorded order on random sequences") {
  ApprovalSequenceGen gen(0xadd5eed);
  for (int round = 0; round < 300; ++round) {
    auto seq = gen.next(8, 120);
    Replayer rep(record_all(seq));
    for (size_t i = 0; i < seq.size(); ++i) {
      // Anything but the recorded processor is rejected and changes nothing.
      ProcessorId other = pid({999});
      REQUIRE(rep.check(other) == Replayer::Check::NotOk);
      REQUIRE(rep.check(seq[i]) == Replayer::Check::Ok);
    }
    CHECK_NOTHROW(rep.assert_complete());
  }
}

TEST_CASE("unknown processor checks NotOk without faulting") {
  Replayer rep(record_all({pid({1})}));
  CHECK(rep.check(pid({7, 7})) == Replayer::Check::NotOk);
  CHECK(rep.counter() == 1);
}

TEST_CASE("empty schedule replays as always-NotOk and complete") {
  Replayer rep(LogicalSchedule{});
  CHECK(rep.check(ProcessorId::root()) == Replayer::Check::NotOk);
  CHECK_NOTHROW(rep.assert_complete());
}

TEST_CASE("malformed schedules are rejected at replay init") {
  LogicalSchedule bad;
  bad.per_processor.emplace(pid({1}), IntervalList{{1, 2}});
  bad.per_processor.emplace(pid({2}), IntervalList{{2, 3}});
  bad.total = 3;
  try {
    Replayer rep(bad);
    FAIL("expected malformed-schedule fault");
  } catch (const Fault& f) {
    CHECK(f.code() == FaultCode::MalformedSchedule);
  }
}

TEST_CASE("incomplete replay faults with the stuck counter") {
  Replayer rep(record_all({pid({1}), pid({2})}));
  CHECK(rep.check(pid({1})) == Replayer::Check::Ok);
  try {
    rep.assert_complete();
    FAIL("expected incomplete-replay fault");
  } catch (const Fault& f) {
    CHECK(f.code() == FaultCode::IncompleteReplay);
    CHECK(std::string(f.what()).find("2") != std::string::npos);
  }
}
