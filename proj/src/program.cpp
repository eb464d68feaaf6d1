#include "scooprr/program.hpp"

#include <sstream>

namespace scooprr {

std::string wait_cond_name(const WaitCond& wait) {
  if (wait.empty()) return "true";
  std::ostringstream out;
  for (size_t i = 0; i < wait.size(); ++i) {
    if (i) out << " and ";
    const WaitAtom& a = wait[i];
    out << "targets[" << a.target << "]." << a.field
        << (a.equal ? " == " : " != ") << a.constant;
  }
  return out.str();
}

namespace {

class Validator {
 public:
  explicit Validator(const Scenario& sc) : sc_(sc) {}

  std::string run() {
    auto root_cls = sc_.classes.find(sc_.root_class);
    if (root_cls == sc_.classes.end())
      return "root class '" + sc_.root_class + "' not defined";
    const auto& routines = root_cls->second.routines;
    auto root_routine = routines.find(sc_.root_routine);
    if (root_routine == routines.end())
      return "root routine '" + sc_.root_routine + "' not defined";
    if (!root_routine->second.params.empty())
      return "root routine must take no arguments";

    for (const auto& [cls_name, cls] : sc_.classes) {
      for (const auto& [name, routine] : cls.routines) {
        where_ = cls_name + "." + name;
        if (name != routine.name) return where_ + ": routine table key mismatch";
        for (size_t idx : routine.controlled) {
          if (idx >= routine.params.size())
            return where_ + ": controlled index out of range";
        }
        for (const WaitAtom& atom : routine.wait) {
          if (atom.target >= routine.controlled.size())
            return where_ + ": wait atom target out of range";
        }
        std::string err = check_body(routine.body);
        if (!err.empty()) return err;
      }
    }
    return "";
  }

 private:
  std::string check_body(const Body& body) {
    for (const Step& step : body) {
      std::string err = std::visit([this](const auto& s) { return check(s); },
                                   step.v);
      if (!err.empty()) return err;
    }
    return "";
  }

  std::string check(const ComputeStep&) { return ""; }

  std::string check(const CallStep& s) { return feature_exists(s.feature); }

  std::string check(const QueryStep& s) {
    if (s.into.empty()) return where_ + ": query must bind its result";
    return feature_exists(s.feature);
  }

  std::string check(const CreateStep& s) {
    if (!sc_.classes.count(s.cls))
      return where_ + ": created class '" + s.cls + "' not defined";
    if (s.into.empty()) return where_ + ": create must bind the new handle";
    return "";
  }

  std::string check(const NonSeparateCallStep& s) {
    return feature_exists(s.feature);
  }

  std::string check(const SeparateBlockStep& s) {
    for (const WaitAtom& atom : s.wait) {
      if (atom.target >= s.targets.size())
        return where_ + ": wait atom target out of range";
    }
    return check_body(s.body);
  }

  std::string check(const BranchStep& s) {
    if (s.condition_local.empty()) return where_ + ": branch needs a condition";
    std::string err = check_body(s.then_body);
    return err.empty() ? check_body(s.else_body) : err;
  }

  std::string feature_exists(const std::string& feature) {
    // Targets are dynamic, so resolution is checked against the whole class
    // table: the feature must exist somewhere.
    for (const auto& [cls_name, cls] : sc_.classes) {
      if (cls.routines.count(feature)) return "";
    }
    return where_ + ": feature '" + feature + "' not defined by any class";
  }

  const Scenario& sc_;
  std::string where_;
};

}  // namespace

std::string scenario_validate(const Scenario& sc) {
  return Validator(sc).run();
}

}  // namespace scooprr
