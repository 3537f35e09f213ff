#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "adf/engine.hpp"
#include "adf/events.hpp"

namespace adf {

class System;

struct SensorInfo {
  Tick heartbeat = 0;
  Tick registered = 0;
  std::optional<Tick> last_emit;
};

// Sensor registration, event emission and parent-to-child commands.
class SensorBus {
 public:
  explicit SensorBus(System& system) : system_(system) {}

  // Any registered managed object may act as a sensor.
  void register_sensor(ObjectId sensor, Tick heartbeat);
  void unregister_sensor(ObjectId sensor);
  bool registered(ObjectId sensor) const { return sensors_.contains(sensor); }
  const SensorInfo* info(ObjectId sensor) const;
  const std::map<ObjectId, SensorInfo>& sensors() const noexcept { return sensors_; }

  // Returns the number of domains the event reached.
  std::size_t emit(ObjectId sensor, const std::string& event_type, ScalarMap payload, Tick now);

  // Throws Error{NotAChild} unless to_domain is a domain below from_domain.
  CommandResult send_command(const AdaptationCommand& command);

 private:
  System& system_;
  std::map<ObjectId, SensorInfo> sensors_;
};

// Executes a registered action on the object at one itinerary stop.
using AgentAction = std::function<StopOutcome(System&, ObjectId target)>;

// Mobile adaptation agents. Each hop costs the configured latency; stops
// that no longer resolve are skipped and the agent carries on.
class AgentDispatcher {
 public:
  using Done = std::function<void(const AgentReport&)>;

  explicit AgentDispatcher(System& system) : system_(system) {}

  void register_action(const std::string& name, AgentAction action);
  bool has_action(const std::string& name) const { return actions_.contains(name); }

  // Starts the agent on the simulator clock. A zero agent_id spawns a fresh
  // Agent-kind object bound into from_domain for the duration of the trip.
  ObjectId launch(ObjectId from_domain, MobileAgent agent, Done done = {});
  // launch() and drive the clock until the report is complete.
  AgentReport launch_agent(ObjectId from_domain, MobileAgent agent);

  std::size_t in_flight() const noexcept { return in_flight_; }

 private:
  void hop(ObjectId from_domain, std::shared_ptr<MobileAgent> agent, std::size_t index, bool spawned, Done done);

  System& system_;
  std::map<std::string, AgentAction> actions_;
  std::size_t in_flight_ = 0;
};

}  // namespace adf
