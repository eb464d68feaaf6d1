#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "scooprr/value.hpp"

namespace scooprr {

// Argument expression, evaluated in the executing frame: a literal, a frame
// local, or a field of the executing processor's own object.
struct ArgExpr {
  enum class Kind { Literal, Local, Field };
  Kind kind = Kind::Literal;
  Value literal = int64_t{0};
  std::string name;
};

inline ArgExpr arg_lit(Value v) {
  return ArgExpr{ArgExpr::Kind::Literal, std::move(v), {}};
}
inline ArgExpr arg_lit(int64_t v) { return arg_lit(Value{v}); }
inline ArgExpr arg_local(std::string name) {
  return ArgExpr{ArgExpr::Kind::Local, int64_t{0}, std::move(name)};
}
inline ArgExpr arg_field(std::string name) {
  return ArgExpr{ArgExpr::Kind::Field, int64_t{0}, std::move(name)};
}

// One conjunct of a wait condition: compare an integer field of the request's
// i-th target object against a constant. An empty conjunction is `true`.
struct WaitAtom {
  size_t target = 0;
  std::string field;
  bool equal = true;  // false: field != constant
  int64_t constant = 0;
};
using WaitCond = std::vector<WaitAtom>;

// Human-readable predicate name, e.g. "targets[0].count != 0".
std::string wait_cond_name(const WaitCond& wait);

// Local-state updates small enough to stay plain data. Ops apply in order
// against working copies of the frame and object, and the step commits them
// atomically: when an op reads an unfilled future the step has no effect and
// is retried once the future fills.
struct OpSetLocal {  // local := value + delta
  std::string local;
  ArgExpr value;
  int64_t delta = 0;
};
struct OpSetField {  // field := value + delta
  std::string field;
  ArgExpr value;
  int64_t delta = 0;
};
struct OpListAppend {  // field := field ++ [value]
  std::string field;
  ArgExpr value;
};
struct OpListSet {  // field[index] := value
  std::string field;
  ArgExpr index;
  ArgExpr value;
};
struct OpListPopFront {  // into := field[0]; field := field[1..]
  std::string field;
  std::string into;
};
using ComputeOp =
    std::variant<OpSetLocal, OpSetField, OpListAppend, OpListSet, OpListPopFront>;

struct Step;
using Body = std::vector<Step>;

// Pure local computation; never a critical event.
struct ComputeStep {
  std::vector<ComputeOp> ops;
};

// Separate command: enqueued to the target's handler (which the caller must
// hold the lock on), executed asynchronously.
struct CallStep {
  ArgExpr target;
  std::string feature;
  std::vector<ArgExpr> args;
};

// Separate query: like CallStep but binds a future for the result to a local;
// reading the local blocks until the supplier fills it (wait by necessity).
struct QueryStep {
  ArgExpr target;
  std::string feature;
  std::vector<ArgExpr> args;
  std::string into;
};

// Creates a fresh object on a fresh processor and binds its handle.
struct CreateStep {
  std::string cls;
  std::string into;
  std::vector<std::pair<std::string, ArgExpr>> field_init;
};

// Runs a feature of the executing processor's own object on the call stack.
// When the callee declares controlled formals (or a wait condition), the call
// performs a synchronization step first; otherwise it runs right away and is
// never a critical event.
struct NonSeparateCallStep {
  std::string feature;
  std::vector<ArgExpr> args;
};

// Inline block over separate targets: one synchronization step locking the
// targets' handlers under the wait condition, then the body, then unlock
// requests. Models a feature whose separate formals are the targets.
struct SeparateBlockStep {
  std::vector<ArgExpr> targets;
  WaitCond wait;  // atoms index into `targets`
  Body body;
};

// Two-way branch on a boolean local (typically a queried result).
struct BranchStep {
  std::string condition_local;
  Body then_body;
  Body else_body;
};

struct Step {
  std::variant<ComputeStep, CallStep, QueryStep, CreateStep, NonSeparateCallStep,
               SeparateBlockStep, BranchStep>
      v;
};

// How a query feature produces its result, evaluated when the body is done.
struct ResultSpec {
  enum class Kind {
    Local,       // result := local `name`
    ListElemEq,  // result := (field `name`[index] == constant)
  };
  Kind kind = Kind::Local;
  std::string name;
  ArgExpr index;
  int64_t constant = 0;
};

// A feature: formals bound positionally, a subset of them controlled (their
// handlers are locked for the duration of the body), a wait condition over
// the controlled targets, and the body. Steps execute strictly in order on
// the hosting processor. A present `result` makes the feature a query.
struct Routine {
  std::string name;
  std::vector<std::string> params;
  std::vector<size_t> controlled;  // indices into params
  WaitCond wait;                   // atoms index into `controlled` order
  Body body;
  std::optional<ResultSpec> result;
};

struct ClassDef {
  std::string name;
  ObjectState fields;  // initial field template
  std::map<std::string, Routine> routines;
};

// A closed program: classes, the root class/routine the bootstrap processor
// runs, and named integer parameters the construction was specialized with.
struct Scenario {
  std::string name;
  std::map<std::string, ClassDef> classes;
  std::string root_class;
  std::string root_routine;
  std::map<std::string, int64_t> parameters;
};

// "" when the scenario is closed (root resolves, every referenced feature and
// class exists, branch bodies are sane); otherwise the first problem found.
std::string scenario_validate(const Scenario& sc);

}  // namespace scooprr
