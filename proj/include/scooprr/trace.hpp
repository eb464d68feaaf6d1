#pragma once

#include <cstdint>
#include <string>

#include "scooprr/schedule.hpp"

namespace scooprr {

// Canonical trace text (bit-exact, ASCII, LF-terminated lines):
//   SCOOP-RR 1
//   total <N>
//   proc <id> <l1>-<u1> <l2>-<u2> ...
// with one proc line per processor in lexicographic ProcessorId order and
// intervals in increasing order. The same text is the schedule-hash input.
std::string trace_encode(const LogicalSchedule& s);

// Strict inverse of trace_encode. Faults MalformedTrace with a line number on
// any deviation: bad magic, syntax, duplicate or out-of-order processors,
// unsorted/overlapping/adjacent intervals, or a total that does not match the
// interval union.
LogicalSchedule trace_decode(const std::string& text);

// File wrappers; IO failures fault MalformedTrace (read) / Internal (write).
LogicalSchedule trace_read_file(const std::string& path);
void trace_write_file(const std::string& path, const LogicalSchedule& s);

// FNV-1a 64 over the canonical trace text. Deliberately not std::hash: the
// fingerprint appears in tool output and must be stable everywhere.
uint64_t schedule_fingerprint(const LogicalSchedule& s);
std::string fingerprint_hex(uint64_t fp);

}  // namespace scooprr
