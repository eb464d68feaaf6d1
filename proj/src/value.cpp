#include "scooprr/value.hpp"

#include <sstream>

namespace scooprr {

std::string ProcessorId::str() const {
  std::string out = "root";
  for (uint32_t part : path_) {
    out += '.';
    out += std::to_string(part);
  }
  return out;
}

namespace {

// Strict non-negative integer in canonical form: digits only, no leading zero
// except "0" itself.
std::optional<uint32_t> parse_ordinal(const std::string& part) {
  if (part.empty() || part.size() > 9) return std::nullopt;
  if (part.size() > 1 && part[0] == '0') return std::nullopt;
  uint64_t n = 0;
  for (char c : part) {
    if (c < '0' || c > '9') return std::nullopt;
    n = n * 10 + static_cast<uint64_t>(c - '0');
  }
  return static_cast<uint32_t>(n);
}

}  // namespace

std::optional<ProcessorId> ProcessorId::parse(const std::string& text) {
  if (text == "root") return ProcessorId{};
  if (text.rfind("root.", 0) != 0) return std::nullopt;
  std::vector<uint32_t> path;
  size_t pos = 5;
  while (true) {
    size_t dot = text.find('.', pos);
    std::string part =
        dot == std::string::npos ? text.substr(pos) : text.substr(pos, dot - pos);
    auto ord = parse_ordinal(part);
    if (!ord) return std::nullopt;
    path.push_back(*ord);
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return ProcessorId(std::move(path));
}

std::string value_str(const Value& v) {
  std::ostringstream out;
  if (const auto* i = std::get_if<int64_t>(&v)) {
    out << *i;
  } else if (const auto* b = std::get_if<bool>(&v)) {
    out << (*b ? "true" : "false");
  } else if (const auto* p = std::get_if<ProcessorId>(&v)) {
    out << p->str();
  } else {
    const auto& xs = std::get<IntList>(v);
    out << '[';
    for (size_t i = 0; i < xs.size(); ++i) {
      if (i) out << ", ";
      out << xs[i];
    }
    out << ']';
  }
  return out.str();
}

}  // namespace scooprr
