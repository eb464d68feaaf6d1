#pragma once

// The frozen market-deadlock reference run shared by several test binaries:
// the canonical trace text, the schedule it decodes to, a free-run seed known
// to reproduce it, and the forced approval order that reproduces it without a
// seed search.

#include <cstdint>
#include <string>
#include <vector>

#include "scooprr/schedule.hpp"
#include "scooprr/value.hpp"

namespace scooprr::testsupport {

inline constexpr uint64_t kGoldenMarketSeed = 167;
inline constexpr const char* kGoldenMarketFingerprint = "edbdaf0b5ac4bee9";

inline const char* golden_market_trace() {
  return
      "SCOOP-RR 1\n"
      "total 9\n"
      "proc root 1-1\n"
      "proc root.1 2-2 6-6\n"
      "proc root.2 4-4 8-8\n"
      "proc root.3 3-3 7-7\n"
      "proc root.4 5-5 9-9\n";
}

inline LogicalSchedule golden_market_schedule() {
  const ProcessorId root = ProcessorId::root();
  LogicalSchedule s;
  s.total = 9;
  s.per_processor[root] = {{1, 1}};
  s.per_processor[root.child(1)] = {{2, 2}, {6, 6}};
  s.per_processor[root.child(2)] = {{4, 4}, {8, 8}};
  s.per_processor[root.child(3)] = {{3, 3}, {7, 7}};
  s.per_processor[root.child(4)] = {{5, 5}, {9, 9}};
  return s;
}

// Approval order realizing the golden schedule: application, then the two
// buy rounds alternating first investor / its market / second investor / its
// market.
inline std::vector<ProcessorId> golden_market_order() {
  const ProcessorId root = ProcessorId::root();
  return {root,           root.child(1), root.child(3),
          root.child(2), root.child(4), root.child(1),
          root.child(3), root.child(2), root.child(4)};
}

// The wait cycle every deadlocked market run ends in, smallest id first.
inline std::vector<ProcessorId> golden_market_cycle() {
  const ProcessorId root = ProcessorId::root();
  return {root.child(1), root.child(4), root.child(2), root.child(3)};
}

}  // namespace scooprr::testsupport
