#include "scooprr/trace.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "scooprr/fault.hpp"

namespace scooprr {

namespace {

[[noreturn]] void reject(const std::string& detail, size_t line) {
  raise(FaultCode::MalformedTrace, detail + " (line " + std::to_string(line) + ")");
}

// Canonical non-negative integer: digits only, no leading zero except "0".
std::optional<uint64_t> parse_number(const std::string& tok) {
  if (tok.empty() || tok.size() > 18) return std::nullopt;
  if (tok.size() > 1 && tok[0] == '0') return std::nullopt;
  uint64_t n = 0;
  for (char c : tok) {
    if (c < '0' || c > '9') return std::nullopt;
    n = n * 10 + static_cast<uint64_t>(c - '0');
  }
  return n;
}

std::vector<std::string> split_fields(const std::string& line) {
  // Fields are separated by exactly one space; empty fields (leading,
  // trailing or doubled spaces) come back as empty strings so the caller can
  // reject them.
  std::vector<std::string> fields;
  size_t pos = 0;
  while (true) {
    size_t sp = line.find(' ', pos);
    if (sp == std::string::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, sp - pos));
    pos = sp + 1;
  }
}

}  // namespace

std::string trace_encode(const LogicalSchedule& s) {
  std::ostringstream out;
  out << "SCOOP-RR 1\n";
  out << "total " << s.total << '\n';
  for (const auto& [p, items] : s.per_processor) {
    out << "proc " << p.str();
    for (const Interval& iv : items) out << ' ' << iv.l << '-' << iv.u;
    out << '\n';
  }
  return out.str();
}

LogicalSchedule trace_decode(const std::string& text) {
  if (text.empty()) reject("cannot parse: empty trace", 1);
  if (text.back() != '\n') {
    size_t lines = 1;
    for (char c : text)
      if (c == '\n') ++lines;
    reject("cannot parse: missing final newline", lines);
  }

  std::vector<std::string> lines;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }

  if (lines[0] != "SCOOP-RR 1") reject("bad magic", 1);
  if (lines.size() < 2) reject("cannot parse: missing total line", 2);

  LogicalSchedule schedule;
  {
    auto fields = split_fields(lines[1]);
    if (fields.size() != 2 || fields[0] != "total") {
      reject("cannot parse: expected 'total <N>'", 2);
    }
    auto n = parse_number(fields[1]);
    if (!n) reject("cannot parse: bad total '" + fields[1] + "'", 2);
    schedule.total = *n;
  }

  std::map<ProcessorId, size_t> proc_lines;
  for (size_t i = 2; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    if (lines[i].find('\r') != std::string::npos) {
      reject("cannot parse: carriage return", line_no);
    }
    auto fields = split_fields(lines[i]);
    if (fields.size() < 3 || fields[0] != "proc") {
      reject("cannot parse: expected 'proc <id> <l>-<u> ...'", line_no);
    }
    auto id = ProcessorId::parse(fields[1]);
    if (!id) reject("cannot parse: bad processor id '" + fields[1] + "'", line_no);
    if (!proc_lines.empty() && !(proc_lines.rbegin()->first < *id)) {
      if (proc_lines.count(*id)) {
        reject("duplicate processor " + id->str(), line_no);
      }
      reject("processor lines not in lexicographic order", line_no);
    }

    IntervalList items;
    for (size_t f = 2; f < fields.size(); ++f) {
      size_t dash = fields[f].find('-');
      if (dash == std::string::npos) {
        reject("cannot parse: bad interval '" + fields[f] + "'", line_no);
      }
      auto l = parse_number(fields[f].substr(0, dash));
      auto u = parse_number(fields[f].substr(dash + 1));
      if (!l || !u) {
        reject("cannot parse: bad interval '" + fields[f] + "'", line_no);
      }
      items.push_back(Interval{*l, *u});
    }
    schedule.per_processor.emplace(*id, std::move(items));
    proc_lines.emplace(*id, line_no);
  }

  if (auto defect = schedule_defect(schedule)) {
    size_t line = 2;  // total line: the default blame for union mismatches
    if (defect->proc) {
      auto it = proc_lines.find(*defect->proc);
      if (it != proc_lines.end()) line = it->second;
    }
    reject(defect->message, line);
  }
  return schedule;
}

LogicalSchedule trace_read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(FaultCode::MalformedTrace, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return trace_decode(buf.str());
}

void trace_write_file(const std::string& path, const LogicalSchedule& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(FaultCode::Internal, "cannot write '" + path + "'");
  out << trace_encode(s);
  out.flush();
  if (!out) raise(FaultCode::Internal, "write failed for '" + path + "'");
}

uint64_t schedule_fingerprint(const LogicalSchedule& s) {
  const std::string text = trace_encode(s);
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string fingerprint_hex(uint64_t fp) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[fp & 0xF];
    fp >>= 4;
  }
  return out;
}

}  // namespace scooprr
