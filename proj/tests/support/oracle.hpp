#pragma once

// Test-support oracles, kept deliberately independent of the production
// recorder: the reference decomposition is built by brute force from the
// definition (number the approvals 1..N, emit one interval per maximal run of
// equal processors) rather than by counter bookkeeping.

#include <cstdint>
#include <random>
#include <vector>

#include "scooprr/schedule.hpp"
#include "scooprr/value.hpp"

namespace scooprr::testsupport {

inline LogicalSchedule maximal_run_schedule(
    const std::vector<ProcessorId>& approvals) {
  LogicalSchedule out;
  out.total = approvals.size();
  size_t i = 0;
  while (i < approvals.size()) {
    size_t j = i;
    while (j + 1 < approvals.size() && approvals[j + 1] == approvals[i]) ++j;
    out.per_processor[approvals[i]].push_back(
        Interval{static_cast<uint64_t>(i + 1), static_cast<uint64_t>(j + 1)});
    i = j + 1;
  }
  return out;
}

// Deterministic random approval sequences: up to `max_procs` processors with
// mixed path depths, sequence length in [0, max_len].
class ApprovalSequenceGen {
 public:
  explicit ApprovalSequenceGen(uint64_t seed) : rng_(seed) {}

  std::vector<ProcessorId> next(size_t max_procs, size_t max_len) {
    const size_t n_procs = 1 + draw(max_procs);
    std::vector<ProcessorId> procs;
    procs.push_back(ProcessorId::root());
    for (size_t i = 1; i < n_procs; ++i) {
      // A few nested ids to keep the ordering code honest.
      if (i % 3 == 2 && i > 1) {
        procs.push_back(procs[i / 2].child(static_cast<uint32_t>(i)));
      } else {
        procs.push_back(ProcessorId::root().child(static_cast<uint32_t>(i)));
      }
    }
    const size_t len = draw(max_len + 1);
    std::vector<ProcessorId> seq;
    seq.reserve(len);
    for (size_t i = 0; i < len; ++i) seq.push_back(procs[draw(n_procs)]);
    return seq;
  }

  uint64_t draw(uint64_t below) {
    if (below == 0) return 0;
    const uint64_t max = std::numeric_limits<uint64_t>::max();
    const uint64_t limit = max - max % below;
    uint64_t x;
    do {
      x = rng_();
    } while (x >= limit);
    return x % below;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace scooprr::testsupport
