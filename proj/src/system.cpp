#include "adf/system.hpp"

#include <algorithm>
#include <cmath>

#include "adf/error.hpp"
#include "adf/logics.hpp"

namespace adf {

double Host::level_at(Tick t) const {
  if (!up || leak == 0.0 || t <= updated) return level;
  return std::max(0.0, level - leak * static_cast<double>(t - updated));
}

System::System(SystemOptions options)
    : options_(options),
      config_(clock_, trace_, options.config),
      engine_(*this),
      sensors_(*this),
      agents_(*this) {
  register_builtin_logics(engine_.catalog());
  register_builtin_actions(agents_);
  config_.on_finished([this](const TxnResult& r) {
    if (r.status != TxnStatus::Aborted || !r.owner.valid()) return;
    ObjectId owner = r.owner;
    ScalarMap payload{{"txn", static_cast<double>(r.id)}};
    clock_.at(clock_.now(), "notify abort", [this, owner, payload] {
      if (!registry_.contains(owner)) return;
      AdaptationEvent e = make_event(owner, "reconfig_aborted", payload);
      trace_event(e, "direct", 1);
      engine_.deliver(owner, e);
    });
  });
}

void System::add_host(Host host) {
  if (!is_token(host.id)) throw Error(Errc::InvalidName, "bad host id '" + host.id + "'");
  host.updated = clock_.now();
  HostId id = host.id;
  bool up = host.up;
  hosts_[id] = std::move(host);
  ConfigGraph g = config_.graph();
  g.hosts[id] = up;
  config_.reset(std::move(g));
  schedule_exhaustion(id);
}

const Host& System::host(const HostId& id) const {
  auto it = hosts_.find(id);
  if (it == hosts_.end()) throw Error(Errc::UnknownHost, "unknown host '" + id + "'");
  return it->second;
}

namespace {
std::pair<HostId, HostId> link_key(const HostId& a, const HostId& b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }
}  // namespace

void System::set_link(const HostId& a, const HostId& b, double quality) {
  host(a);
  host(b);
  if (a == b) throw Error(Errc::Forbidden, "a link joins two distinct hosts");
  links_[link_key(a, b)] = std::clamp(quality, 0.0, 1.0);
}

double System::link_quality(const HostId& a, const HostId& b) const {
  auto it = links_.find(link_key(a, b));
  if (it == links_.end()) throw Error(Errc::NotFound, "no link between '" + a + "' and '" + b + "'");
  return it->second;
}

void System::kill_host(const HostId& id) {
  host(id);
  Host& h = hosts_[id];
  if (!h.up) return;
  h.level = h.level_at(clock_.now());
  h.updated = clock_.now();
  h.up = false;
  ++exhaustion_generation_[id];
  config_.set_host_status(id, false);
}

void System::revive_host(const HostId& id) {
  host(id);
  Host& h = hosts_[id];
  if (h.up) return;
  h.up = true;
  h.level = h.capacity;
  h.updated = clock_.now();
  config_.set_host_status(id, true);
  schedule_exhaustion(id);
}

void System::set_leak(const HostId& id, double rate) {
  host(id);
  if (rate < 0.0) throw Error(Errc::Forbidden, "leak rate must be non-negative");
  Host& h = hosts_[id];
  h.level = h.level_at(clock_.now());
  h.updated = clock_.now();
  h.leak = rate;
  schedule_exhaustion(id);
}

void System::reset_resource(const HostId& id) {
  host(id);
  Host& h = hosts_[id];
  h.level = h.capacity;
  h.updated = clock_.now();
  trace_.add(clock_.now(), "rejuvenated").set("host", id).set("level", h.level);
  schedule_exhaustion(id);
}

void System::schedule_exhaustion(const HostId& id) {
  std::uint64_t generation = ++exhaustion_generation_[id];
  const Host& h = hosts_.at(id);
  if (!h.up || h.leak <= 0.0) return;
  double headroom = h.level - options_.critical_level;
  Tick at = h.updated + std::max<Tick>(0, static_cast<Tick>(std::ceil(headroom / h.leak)));
  clock_.at(at, "exhaust " + id, [this, id, generation] {
    if (exhaustion_generation_[id] != generation || !hosts_.at(id).up) return;
    metrics_.exhaustions_reached++;
    trace_.add(clock_.now(), "exhausted").set("host", id).set("level", hosts_.at(id).level_at(clock_.now()));
    if (options_.exhaustion_kills) kill_host(id);
  });
}

double System::free_resource(const HostId& id) const {
  const Host& h = host(id);
  std::size_t resident = 0;
  for (const auto& [cid, c] : config_.graph().components) {
    if (c.host == id && c.state != ComponentState::Down) ++resident;
  }
  return h.level_at(clock_.now()) - options_.component_load * static_cast<double>(resident);
}

// ---------------------------------------------------------------------------

void System::bind_host(ObjectId object, const HostId& host) {
  this->host(host);
  if (!registry_.contains(object)) throw Error(Errc::UnknownId, "#" + std::to_string(object.value) + " is not registered");
  host_objects_[object] = host;
  objects_by_host_[host] = object;
}

void System::bind_component(ObjectId object, const ComponentId& component) {
  if (!registry_.contains(object)) throw Error(Errc::UnknownId, "#" + std::to_string(object.value) + " is not registered");
  if (!is_token(component)) throw Error(Errc::InvalidName, "bad component id '" + component + "'");
  component_objects_[object] = component;
  objects_by_component_[component] = object;
}

void System::bind_link(ObjectId object, const HostId& a, const HostId& b) {
  link_quality(a, b);
  if (!registry_.contains(object)) throw Error(Errc::UnknownId, "#" + std::to_string(object.value) + " is not registered");
  link_objects_[object] = link_key(a, b);
}

std::optional<HostId> System::host_of(ObjectId object) const {
  auto it = host_objects_.find(object);
  if (it == host_objects_.end()) return std::nullopt;
  return it->second;
}

std::optional<ComponentId> System::component_of(ObjectId object) const {
  auto it = component_objects_.find(object);
  if (it == component_objects_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::pair<HostId, HostId>> System::link_of(ObjectId object) const {
  auto it = link_objects_.find(object);
  if (it == link_objects_.end()) return std::nullopt;
  return it->second;
}

std::optional<ObjectId> System::object_of_component(const ComponentId& component) const {
  auto it = objects_by_component_.find(component);
  if (it == objects_by_component_.end()) return std::nullopt;
  return it->second;
}

std::optional<ObjectId> System::object_of_host(const HostId& host) const {
  auto it = objects_by_host_.find(host);
  if (it == objects_by_host_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------

AdaptationEvent System::make_event(ObjectId source, std::string event_type, ScalarMap payload) {
  AdaptationEvent e;
  e.event_id = next_event_id_++;
  e.source = source;
  e.event_type = std::move(event_type);
  e.payload = std::move(payload);
  e.timestamp = clock_.now();
  return e;
}

void System::trace_event(const AdaptationEvent& event, std::string_view route, std::size_t routed) {
  trace_.add(event.timestamp, "event")
      .set("id", event.event_id)
      .set("source", event.source)
      .set("type", event.event_type)
      .set("payload", render_payload(event.payload))
      .set("route", route)
      .set("routed", static_cast<std::uint64_t>(routed));
}

void System::perform(ObjectId domain, const ActuatorAction& action, const std::string& logic, const Strategy& strategy,
                     const std::vector<ObjectId>& targets) {
  trace_.add(clock_.now(), "action")
      .set("domain", domain)
      .set("logic", logic)
      .set("kind", to_string(action.kind()))
      .set("strategy", to_string(strategy.kind))
      .set("period", strategy.period)
      .set("targets", join(targets))
      .set("what", describe(action));
  metrics_.adaptations_executed++;
  try {
    if (const auto* txn = std::get_if<ReconfigTxn>(&action.payload)) {
      config_.submit(*txn, domain, logic);
    } else if (const auto* cmd = std::get_if<AdaptationCommand>(&action.payload)) {
      sensors_.send_command(*cmd);
    } else if (const auto* agent = std::get_if<MobileAgent>(&action.payload)) {
      agents_.launch(domain, *agent);
    }
  } catch (const Error& e) {
    trace_.add(clock_.now(), "action-failed").set("domain", domain).set("error", to_string(e.code()));
    if (action.kind() == ActionKind::GraphEdit) {
      // Let the owner re-plan against the graph as it stands a tick later.
      clock_.after(1, "notify reject", [this, domain] {
        if (!registry_.contains(domain)) return;
        AdaptationEvent ev = make_event(domain, "reconfig_aborted", {});
        trace_event(ev, "direct", 1);
        engine_.deliver(domain, ev);
      });
    }
  }
}

}  // namespace adf
