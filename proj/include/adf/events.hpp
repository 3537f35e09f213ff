#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "adf/config_graph.hpp"
#include "adf/registry.hpp"
#include "adf/types.hpp"

namespace adf {

struct AdaptationEvent {
  std::uint64_t event_id = 0;
  ObjectId source;
  std::string event_type;
  ScalarMap payload;
  Tick timestamp = 0;
  std::vector<ObjectId> provenance;  // domains the event was escalated from
};

struct AdaptationCommand {
  ObjectId from_domain;
  ObjectId to_domain;
  std::string verb;
  ScalarMap args;
};

enum class StopStatus { Ok, Skipped, Failed };

std::string_view to_string(StopStatus status) noexcept;

struct StopOutcome {
  StopStatus status = StopStatus::Ok;
  std::string reason;  // set for Failed and Skipped

  friend bool operator==(const StopOutcome&, const StopOutcome&) = default;
};

// Itinerary paths are relative to the issuing domain.
struct MobileAgent {
  ObjectId agent_id;
  std::vector<PathName> itinerary;
  std::string action;
  std::vector<StopOutcome> report;
};

struct AgentReport {
  ObjectId agent_id;
  ObjectId from_domain;
  std::vector<StopOutcome> stops;
  Tick finished = 0;
};

enum class ActionKind { GraphEdit, Command, AgentLaunch };

std::string_view to_string(ActionKind kind) noexcept;

// Exactly one variant is ever populated.
struct ActuatorAction {
  std::variant<ReconfigTxn, AdaptationCommand, MobileAgent> payload;

  ActionKind kind() const noexcept { return static_cast<ActionKind>(payload.index()); }
};

std::string render_payload(const ScalarMap& payload);  // "k:v,k:v" or "-"
ScalarMap parse_payload(std::string_view text);

// Stable single-token description; identical actions describe identically.
std::string describe(const ActuatorAction& action);

}  // namespace adf
