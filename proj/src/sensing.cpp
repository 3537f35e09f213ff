#include "adf/sensing.hpp"

#include <algorithm>
#include <memory>

#include "adf/error.hpp"
#include "adf/system.hpp"

namespace adf {

void SensorBus::register_sensor(ObjectId sensor, Tick heartbeat) {
  if (!system_.registry().contains(sensor)) {
    throw Error(Errc::UnknownId, "#" + std::to_string(sensor.value) + " is not registered");
  }
  if (heartbeat < 0) throw Error(Errc::Forbidden, "heartbeat must be non-negative");
  auto& info = sensors_[sensor];
  info.heartbeat = heartbeat;
  info.registered = system_.clock().now();
}

void SensorBus::unregister_sensor(ObjectId sensor) { sensors_.erase(sensor); }

const SensorInfo* SensorBus::info(ObjectId sensor) const {
  auto it = sensors_.find(sensor);
  return it == sensors_.end() ? nullptr : &it->second;
}

std::size_t SensorBus::emit(ObjectId sensor, const std::string& event_type, ScalarMap payload, Tick now) {
  auto it = sensors_.find(sensor);
  if (it == sensors_.end()) {
    throw Error(Errc::UnknownSensor, "#" + std::to_string(sensor.value) + " is not a registered sensor");
  }
  if (!is_token(event_type)) throw Error(Errc::InvalidName, "bad event type '" + event_type + "'");
  if (it->second.last_emit && now < *it->second.last_emit) {
    throw Error(Errc::TimeRegression, "sensor #" + std::to_string(sensor.value) + " emitted at " + std::to_string(now) +
                                          " after " + std::to_string(*it->second.last_emit));
  }
  it->second.last_emit = now;
  AdaptationEvent event = system_.make_event(sensor, event_type, std::move(payload));
  event.timestamp = now;
  auto targets = system_.engine().routing_targets(sensor);
  system_.trace_event(event, "sensor", targets.size());
  system_.metrics().events_emitted++;
  return system_.engine().dispatch_event(event).size();
}

CommandResult SensorBus::send_command(const AdaptationCommand& command) {
  const auto& reg = system_.registry();
  if (!reg.contains(command.from_domain) || !reg.contains(command.to_domain)) {
    throw Error(Errc::UnknownId, "command endpoints must be registered");
  }
  if (!is_token(command.verb)) throw Error(Errc::InvalidName, "bad command verb '" + command.verb + "'");
  bool child = reg.kind(command.from_domain) == Kind::Domain && reg.kind(command.to_domain) == Kind::Domain &&
               command.to_domain != command.from_domain;
  if (child) {
    auto above = reg.ancestors(command.to_domain);
    child = std::binary_search(above.begin(), above.end(), command.from_domain);
  }
  if (!child) {
    throw Error(Errc::NotAChild, "#" + std::to_string(command.to_domain.value) + " is not below #" +
                                     std::to_string(command.from_domain.value));
  }
  auto result = system_.engine().handle_command(command);
  system_.trace()
      .add(system_.clock().now(), "command")
      .set("from", command.from_domain)
      .set("to", command.to_domain)
      .set("verb", command.verb)
      .set("args", render_payload(command.args))
      .set("handled", result.handled);
  return result;
}

// ---------------------------------------------------------------------------

void AgentDispatcher::register_action(const std::string& name, AgentAction action) {
  if (!is_token(name)) throw Error(Errc::InvalidName, "bad action name '" + name + "'");
  actions_[name] = std::move(action);
}

ObjectId AgentDispatcher::launch(ObjectId from_domain, MobileAgent agent, Done done) {
  if (!actions_.contains(agent.action)) throw Error(Errc::UnknownAction, "no agent action '" + agent.action + "'");
  if (agent.itinerary.empty()) throw Error(Errc::EmptyItinerary, "agent itinerary is empty");
  auto& reg = system_.registry();
  if (reg.kind(from_domain) != Kind::Domain) {
    throw Error(Errc::NotADomain, "#" + std::to_string(from_domain.value) + " is not a domain");
  }
  bool spawned = false;
  if (!agent.agent_id.valid()) {
    agent.agent_id = reg.register_object(Kind::Agent);
    reg.include(from_domain, agent.agent_id, "agent-" + std::to_string(agent.agent_id.value));
    spawned = true;
  } else if (!reg.contains(agent.agent_id)) {
    throw Error(Errc::UnknownId, "#" + std::to_string(agent.agent_id.value) + " is not registered");
  }
  if (!system_.sensors().registered(agent.agent_id)) system_.sensors().register_sensor(agent.agent_id, 0);
  agent.report.clear();

  std::vector<std::string> stops;
  for (const auto& p : agent.itinerary) stops.push_back(p.relative_str());
  system_.trace()
      .add(system_.clock().now(), "agent-launch")
      .set("agent", agent.agent_id)
      .set("domain", from_domain)
      .set("action", agent.action)
      .set("itinerary", join(stops, '+'));

  ObjectId id = agent.agent_id;
  auto shared = std::make_shared<MobileAgent>(std::move(agent));
  ++in_flight_;
  system_.clock().after(system_.options().agent_hop_latency, "agent " + std::to_string(id.value),
                        [this, from_domain, shared, spawned, done = std::move(done)] {
                          hop(from_domain, shared, 0, spawned, done);
                        });
  return id;
}

void AgentDispatcher::hop(ObjectId from_domain, std::shared_ptr<MobileAgent> agent, std::size_t index, bool spawned,
                          Done done) {
  auto& reg = system_.registry();
  const PathName& stop = agent->itinerary[index];
  StopOutcome outcome;
  std::optional<ObjectId> target;
  if (reg.contains(from_domain)) target = reg.try_resolve_relative(from_domain, stop);
  if (!target) {
    outcome = {StopStatus::Skipped, "unresolvable"};
  } else {
    try {
      outcome = actions_.at(agent->action)(system_, *target);
    } catch (const Error& e) {
      outcome = {StopStatus::Failed, std::string(to_string(e.code()))};
    }
  }
  agent->report.push_back(outcome);
  system_.trace()
      .add(system_.clock().now(), "agent-stop")
      .set("agent", agent->agent_id)
      .set("index", static_cast<std::uint64_t>(index))
      .set("stop", stop.relative_str())
      .set("target", target.value_or(ObjectId{}))
      .set("status", to_string(outcome.status))
      .set("reason", outcome.reason);

  if (index + 1 < agent->itinerary.size()) {
    system_.clock().after(system_.options().agent_hop_latency, "agent " + std::to_string(agent->agent_id.value),
                          [this, from_domain, agent, index, spawned, done] {
                            hop(from_domain, agent, index + 1, spawned, done);
                          });
    return;
  }

  AgentReport report{agent->agent_id, from_domain, agent->report, system_.clock().now()};
  ScalarMap summary{{"ok", 0.0}, {"skipped", 0.0}, {"failed", 0.0}};
  for (const auto& s : report.stops) summary[std::string(to_string(s.status))] += 1.0;
  system_.trace()
      .add(system_.clock().now(), "agent-done")
      .set("agent", agent->agent_id)
      .set("domain", from_domain)
      .set("stops", static_cast<std::uint64_t>(report.stops.size()));
  --in_flight_;
  system_.metrics().agents_completed++;
  system_.sensors().emit(agent->agent_id, "agent_report", summary, system_.clock().now());
  if (spawned) {
    for (ObjectId parent : reg.parents(agent->agent_id)) {
      std::vector<std::string> names;
      for (const auto& [name, member] : reg.members(parent)) {
        if (member == agent->agent_id) names.push_back(name);
      }
      for (const auto& name : names) reg.exclude(parent, name);
    }
    system_.sensors().unregister_sensor(agent->agent_id);
    reg.retire(agent->agent_id);
  }
  if (done) done(report);
}

AgentReport AgentDispatcher::launch_agent(ObjectId from_domain, MobileAgent agent) {
  auto result = std::make_shared<std::optional<AgentReport>>();
  launch(from_domain, std::move(agent), [result](const AgentReport& r) { *result = r; });
  while (!*result && system_.clock().step()) {
  }
  if (!*result) throw Error(Errc::Aborted, "agent did not complete");
  return **result;
}

}  // namespace adf
