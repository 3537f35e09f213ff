#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>

namespace adf {

// Virtual time in integer ticks.
using Tick = std::int64_t;

struct ObjectId {
  std::uint64_t value = 0;

  constexpr bool valid() const noexcept { return value != 0; }
  friend constexpr auto operator<=>(ObjectId, ObjectId) = default;
};

enum class Kind { Domain, PlainObject, Sensor, Actuator, Agent };

std::string_view to_string(Kind kind) noexcept;
Kind kind_from_string(std::string_view text);

// Tokens name local members, logics, event types, hosts and components:
// [A-Za-z0-9_-]{1,64}.
bool is_token(std::string_view text) noexcept;

// Payloads, logic params and policy directives are token -> scalar maps.
using ScalarMap = std::map<std::string, double>;

// Shortest round-trip decimal rendering; the canonical form for every
// scalar written to configs and reports.
std::string format_scalar(double value);
double parse_scalar(std::string_view text);

}  // namespace adf

template <>
struct std::hash<adf::ObjectId> {
  std::size_t operator()(adf::ObjectId id) const noexcept { return std::hash<std::uint64_t>{}(id.value); }
};
