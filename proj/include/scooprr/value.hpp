#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace scooprr {

// Identity of a handler. The root processor has the empty path and prints as
// "root"; the k-th processor created by P (counting from 1) has P's path
// extended by k and prints as "root...k". Creation events happen inside
// sequentially executed bodies, so ids are identical across all executions
// realizing the same logical schedule.
class ProcessorId {
 public:
  ProcessorId() = default;
  explicit ProcessorId(std::vector<uint32_t> path) : path_(std::move(path)) {}

  static ProcessorId root() { return ProcessorId{}; }

  ProcessorId child(uint32_t ordinal) const {
    std::vector<uint32_t> p = path_;
    p.push_back(ordinal);
    return ProcessorId(std::move(p));
  }

  const std::vector<uint32_t>& path() const { return path_; }

  std::string str() const;

  // Inverse of str(); rejects anything str() would not produce.
  static std::optional<ProcessorId> parse(const std::string& text);

  auto operator<=>(const ProcessorId&) const = default;

 private:
  std::vector<uint32_t> path_;
};

using IntList = std::vector<int64_t>;

// The value universe: integers, booleans, handler references, integer lists.
using Value = std::variant<int64_t, bool, ProcessorId, IntList>;

std::string value_str(const Value& v);

// Named fields of the single object a processor handles. Mutated only by its
// own handler during feature application.
using ObjectState = std::map<std::string, Value>;

// Future for the result of a separate query: created empty at enqueue time,
// filled exactly once when the supplier applies the query.
struct Slot {
  std::optional<Value> value;
  ProcessorId supplier;
};
using SlotRef = std::shared_ptr<Slot>;

// Thrown when a step reads a future that is not yet filled; the processor
// parks until the slot fills, then retries the step (wait by necessity).
struct NeedFuture {
  SlotRef slot;
};

}  // namespace scooprr
