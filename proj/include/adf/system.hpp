#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "adf/clock.hpp"
#include "adf/config_manager.hpp"
#include "adf/engine.hpp"
#include "adf/registry.hpp"
#include "adf/sensing.hpp"
#include "adf/trace.hpp"

namespace adf {

// A simulated host. The resource level drains linearly at leak per tick
// while the host is up.
struct Host {
  HostId id;
  bool up = true;
  double capacity = 0.0;
  double level = 0.0;  // at `updated`
  double leak = 0.0;
  Tick updated = 0;

  double level_at(Tick t) const;

  friend bool operator==(const Host&, const Host&) = default;
};

struct SystemOptions {
  ConfigManagerOptions config;
  Tick agent_hop_latency = 1;
  double component_load = 1.0;
  double critical_level = 0.0;
  bool exhaustion_kills = true;
};

// Counters reported at the end of a run.
struct Metrics {
  std::uint64_t events_emitted = 0;
  std::uint64_t decisions = 0;
  std::uint64_t adaptations_executed = 0;
  std::uint64_t exhaustions_reached = 0;
  std::uint64_t agents_completed = 0;
  std::uint64_t app_transactions = 0;
  std::uint64_t app_deferred = 0;
};

// The composition root: registry, clock, configuration manager, engine,
// sensors, agents, and the simulated hosts they act upon.
class System {
 public:
  explicit System(SystemOptions options = {});
  System(const System&) = delete;
  System& operator=(const System&) = delete;

  const SystemOptions& options() const noexcept { return options_; }
  Registry& registry() noexcept { return registry_; }
  const Registry& registry() const noexcept { return registry_; }
  SimClock& clock() noexcept { return clock_; }
  const SimClock& clock() const noexcept { return clock_; }
  Trace& trace() noexcept { return trace_; }
  const Trace& trace() const noexcept { return trace_; }
  ConfigManager& config() noexcept { return config_; }
  const ConfigManager& config() const noexcept { return config_; }
  Engine& engine() noexcept { return engine_; }
  const Engine& engine() const noexcept { return engine_; }
  SensorBus& sensors() noexcept { return sensors_; }
  const SensorBus& sensors() const noexcept { return sensors_; }
  AgentDispatcher& agents() noexcept { return agents_; }
  Metrics& metrics() noexcept { return metrics_; }
  const Metrics& metrics() const noexcept { return metrics_; }

  // --- hosts and links
  void add_host(Host host);
  const std::map<HostId, Host>& hosts() const noexcept { return hosts_; }
  const Host& host(const HostId& id) const;
  void set_link(const HostId& a, const HostId& b, double quality);
  double link_quality(const HostId& a, const HostId& b) const;
  const std::map<std::pair<HostId, HostId>, double>& links() const noexcept { return links_; }

  void kill_host(const HostId& id);
  void revive_host(const HostId& id);
  void set_leak(const HostId& id, double rate);
  void reset_resource(const HostId& id);
  // Current level minus the load of resident live components.
  double free_resource(const HostId& id) const;

  // --- managed-object bindings to world entities
  void bind_host(ObjectId object, const HostId& host);
  void bind_component(ObjectId object, const ComponentId& component);
  void bind_link(ObjectId object, const HostId& a, const HostId& b);
  std::optional<HostId> host_of(ObjectId object) const;
  std::optional<ComponentId> component_of(ObjectId object) const;
  std::optional<std::pair<HostId, HostId>> link_of(ObjectId object) const;
  std::optional<ObjectId> object_of_component(const ComponentId& component) const;
  std::optional<ObjectId> object_of_host(const HostId& host) const;
  const std::map<ObjectId, HostId>& host_bindings() const noexcept { return host_objects_; }
  const std::map<ObjectId, ComponentId>& component_bindings() const noexcept { return component_objects_; }
  const std::map<ObjectId, std::pair<HostId, HostId>>& link_bindings() const noexcept { return link_objects_; }

  // --- events and actuation
  AdaptationEvent make_event(ObjectId source, std::string event_type, ScalarMap payload);
  void trace_event(const AdaptationEvent& event, std::string_view route, std::size_t routed);
  // Runs one actuator action now, on behalf of domain.
  void perform(ObjectId domain, const ActuatorAction& action, const std::string& logic, const Strategy& strategy,
               const std::vector<ObjectId>& targets);

 private:
  void schedule_exhaustion(const HostId& id);

  SystemOptions options_;
  Registry registry_;
  SimClock clock_;
  Trace trace_;
  ConfigManager config_;
  Engine engine_;
  SensorBus sensors_;
  AgentDispatcher agents_;
  Metrics metrics_;
  std::uint64_t next_event_id_ = 1;

  std::map<HostId, Host> hosts_;
  std::map<HostId, std::uint64_t> exhaustion_generation_;
  std::map<std::pair<HostId, HostId>, double> links_;
  std::map<ObjectId, HostId> host_objects_;
  std::map<ObjectId, ComponentId> component_objects_;
  std::map<ObjectId, std::pair<HostId, HostId>> link_objects_;
  std::map<ComponentId, ObjectId> objects_by_component_;
  std::map<HostId, ObjectId> objects_by_host_;
};

}  // namespace adf
