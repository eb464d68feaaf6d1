#pragma once

#include <stdexcept>
#include <string>

namespace scooprr {

// Every failure the runtime can signal. The names double as the stable
// machine-readable prefix of the exception message.
enum class FaultCode {
  UnknownProcessor,
  UncontrolledSeparateCall,
  NoSuchFeature,
  LostResult,
  BudgetExhausted,
  DoubleSynchronization,
  ReplayDivergence,
  MalformedSchedule,
  IncompleteReplay,
  MalformedTrace,
  UnknownScenario,
  Internal,
};

inline const char* fault_code_name(FaultCode code) {
  switch (code) {
    case FaultCode::UnknownProcessor: return "unknown processor";
    case FaultCode::UncontrolledSeparateCall: return "uncontrolled separate call";
    case FaultCode::NoSuchFeature: return "no such feature";
    case FaultCode::LostResult: return "lost result";
    case FaultCode::BudgetExhausted: return "budget exhausted";
    case FaultCode::DoubleSynchronization: return "double synchronization";
    case FaultCode::ReplayDivergence: return "replay divergence";
    case FaultCode::MalformedSchedule: return "malformed schedule";
    case FaultCode::IncompleteReplay: return "incomplete replay";
    case FaultCode::MalformedTrace: return "malformed trace";
    case FaultCode::UnknownScenario: return "unknown scenario";
    case FaultCode::Internal: return "internal error";
  }
  return "internal error";
}

class Fault : public std::runtime_error {
 public:
  Fault(FaultCode code, const std::string& detail)
      : std::runtime_error(std::string(fault_code_name(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  FaultCode code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  FaultCode code_;
  std::string detail_;
};

[[noreturn]] inline void raise(FaultCode code, const std::string& detail) {
  throw Fault(code, detail);
}

}  // namespace scooprr
