#include "adf/sim.hpp"

#include <cstdio>
#include <functional>

#include "adf/error.hpp"

namespace adf {

Simulator::Simulator(const ConfigDocument& doc, std::uint64_t seed)
    : system_(instantiate(doc)), params_(scenario_params(doc.scenario)), seed_(seed), rng_(seed) {
  initial_graph_ = system_->config().graph();
  SimClock& clock = system_->clock();

  for (const auto& f : doc.faults) inject(f);
  for (const auto& m : doc.membership) {
    clock.at(m.at, "membership " + m.name, [this, m] { apply_membership(m); });
  }
  for (const auto& t : doc.transactions) {
    clock.at(t.at, "script txn", [this, t] {
      try {
        system_->config().submit(t.txn, t.owner, "script");
      } catch (const Error&) {
        // Rejections are already on the trace.
      }
    });
  }
  schedule_samplers();
  if (params_.traffic_interval > 0) {
    schedule_traffic(static_cast<Tick>(rng_() % static_cast<std::uint64_t>(params_.traffic_interval)));
  }
  if (params_.audit_period > 0) schedule_audit(params_.audit_period);
}

void Simulator::inject(const FaultEntry& fault) {
  system_->host(fault.host);
  if (fault.type == FaultEntry::Type::Link) system_->link_quality(fault.host, fault.other);
  SimClock& clock = system_->clock();
  clock.at(std::max(fault.at, clock.now()), "fault " + fault.host, [this, fault] { apply_fault(fault); });
}

void Simulator::apply_fault(const FaultEntry& f) {
  auto& e = system_->trace().add(system_->clock().now(), "fault");
  switch (f.type) {
    case FaultEntry::Type::Kill:
      e.set("type", "kill").set("host", f.host);
      system_->kill_host(f.host);
      break;
    case FaultEntry::Type::Revive:
      e.set("type", "revive").set("host", f.host);
      system_->revive_host(f.host);
      break;
    case FaultEntry::Type::Leak:
      e.set("type", "leak").set("host", f.host).set("value", f.value);
      system_->set_leak(f.host, f.value);
      break;
    case FaultEntry::Type::Link:
      e.set("type", "link").set("host", f.host).set("other", f.other).set("value", f.value);
      system_->set_link(f.host, f.other, f.value);
      break;
  }
}

void Simulator::apply_membership(const MembershipEntry& m) {
  Registry& reg = system_->registry();
  auto& e = system_->trace()
                .add(system_->clock().now(), "membership")
                .set("op", m.include ? "include" : "exclude")
                .set("domain", m.domain_path)
                .set("name", m.name)
                .set("id", m.id);
  try {
    ObjectId domain = reg.resolve(PathName::parse(m.domain_path));
    if (m.include) {
      reg.include(domain, m.id, m.name);
    } else {
      reg.exclude(domain, m.name);
    }
    e.set("result", "ok");
  } catch (const Error& err) {
    e.set("result", to_string(err.code()));
  }
}

std::function<void()>* Simulator::loop() {
  loops_.push_back(std::make_unique<std::function<void()>>());
  return loops_.back().get();
}

void Simulator::schedule_samplers() {
  System& sys = *system_;
  auto phase = [this](Tick period) { return static_cast<Tick>(rng_() % static_cast<std::uint64_t>(period)); };

  for (const auto& [object, host] : sys.host_bindings()) {
    if (!sys.sensors().registered(object)) continue;
    // Liveness: reports transitions only.
    auto last_up = std::make_shared<bool>(sys.host(host).up);
    auto* liveness = loop();
    *liveness = [this, object, host, last_up, liveness] {
      System& s = *system_;
      bool up = s.host(host).up;
      if (up != *last_up && s.registry().contains(object)) {
        *last_up = up;
        s.sensors().emit(object, up ? "host_revived" : "host_failed", {}, s.clock().now());
      }
      s.clock().after(params_.liveness_period, "liveness " + host, *liveness);
    };
    sys.clock().at(phase(params_.liveness_period), "liveness " + host, *liveness);

    auto* sampler = loop();
    *sampler = [this, object, host, sampler] {
      System& s = *system_;
      const Host& h = s.host(host);
      if (h.up && s.registry().contains(object)) {
        s.sensors().emit(object, "resource_sample", {{"level", h.level_at(s.clock().now())}, {"capacity", h.capacity}},
                         s.clock().now());
      }
      s.clock().after(params_.sample_period, "sample " + host, *sampler);
    };
    sys.clock().at(phase(params_.sample_period), "sample " + host, *sampler);
  }

  for (const auto& [object, link] : sys.link_bindings()) {
    if (!sys.sensors().registered(object)) continue;
    auto* sampler = loop();
    auto key = link;
    *sampler = [this, object, key, sampler] {
      System& s = *system_;
      if (s.registry().contains(object)) {
        s.sensors().emit(object, "link_quality", {{"quality", s.link_quality(key.first, key.second)}}, s.clock().now());
      }
      s.clock().after(params_.link_period, "link " + key.first + "-" + key.second, *sampler);
    };
    sys.clock().at(phase(params_.link_period), "link " + key.first + "-" + key.second, *sampler);
  }
}

void Simulator::schedule_traffic(Tick at) {
  system_->clock().at(at, "traffic", [this] {
    System& s = *system_;
    const auto& comps = s.config().graph().components;
    if (!comps.empty()) {
      auto pick = static_cast<std::size_t>(rng_() % comps.size());
      auto it = std::next(comps.begin(), static_cast<std::ptrdiff_t>(pick));
      std::uint64_t app = next_app_++;
      s.metrics().app_transactions++;
      s.trace().add(s.clock().now(), "app-start").set("app", app).set("start", it->first);
      hop(app, it->first, "", params_.traffic_hops, 0);
    }
    schedule_traffic(s.clock().now() + params_.traffic_interval);
  });
}

void Simulator::hop(std::uint64_t app, ComponentId to, std::string from, Tick hops_left, Tick waited) {
  System& s = *system_;
  ConfigManager& cm = s.config();
  if (!cm.graph().components.contains(to)) {
    s.trace().add(s.clock().now(), "app-lost").set("app", app).set("reason", "removed");
    return;
  }
  if (!cm.may_enter(to)) {
    if (waited >= params_.liveness_bound) {
      s.trace().add(s.clock().now(), "app-lost").set("app", app).set("reason", "timeout");
      return;
    }
    if (waited == 0) {
      s.metrics().app_deferred++;
      s.trace().add(s.clock().now(), "app-deferred").set("app", app).set("to", to);
    }
    s.clock().after(1, "app " + std::to_string(app), [this, app, to, from, hops_left, waited] {
      hop(app, to, from, hops_left, waited + 1);
    });
    return;
  }
  cm.enter(to);
  s.trace().add(s.clock().now(), "hop").set("app", app).set("from", from).set("to", to);
  s.clock().after(1, "app " + std::to_string(app), [this, app, to, hops_left] {
    System& s = *system_;
    s.config().leave(to);
    s.trace().add(s.clock().now(), "leave").set("app", app).set("component", to);
    std::vector<ComponentId> outs;
    if (hops_left > 0 && s.config().graph().components.contains(to)) outs = s.config().graph().out_neighbors(to);
    if (outs.empty()) {
      s.trace().add(s.clock().now(), "app-end").set("app", app);
      return;
    }
    ComponentId next = outs[static_cast<std::size_t>(rng_() % outs.size())];
    hop(app, next, to, hops_left - 1, 0);
  });
}

void Simulator::schedule_audit(Tick at) {
  system_->clock().at(at, "audit", [this] {
    System& s = *system_;
    const Registry& reg = s.registry();
    for (ObjectId d : reg.objects()) {
      if (reg.kind(d) != Kind::Domain || (d != reg.root() && reg.paths_of(d).empty())) continue;
      for (const auto& f : s.engine().audit_tick(d, s.clock().now())) {
        s.trace()
            .add(s.clock().now(), "finding")
            .set("kind", to_string(f.kind))
            .set("domain", f.domain)
            .set("subject", f.subject)
            .set("detail", f.detail);
      }
    }
    schedule_audit(s.clock().now() + params_.audit_period);
  });
}

SystemState Simulator::snapshot() const {
  SystemState st;
  st.now = system_->clock().now();
  for (const auto& [id, h] : system_->hosts()) {
    Host copy = h;
    copy.level = h.level_at(st.now);
    copy.updated = st.now;
    st.hosts[id] = copy;
  }
  st.graph = system_->config().graph();
  st.tree = render_tree(*system_);
  st.pending = system_->clock().pending_labels();
  return st;
}

RunReport Simulator::run(Tick until) {
  if (ran_) throw Error(Errc::Forbidden, "a simulator runs once");
  ran_ = true;
  System& s = *system_;
  s.trace()
      .add(s.clock().now(), "start")
      .set("name", params_.name)
      .set("seed", seed_)
      .set("until", until);
  s.clock().run_until(until);
  s.trace().add(s.clock().now(), "end");

  RunReport r;
  r.meta["name"] = params_.name;
  r.meta["seed"] = std::to_string(seed_);
  r.meta["until"] = std::to_string(until);
  r.meta["liveness_bound"] = std::to_string(params_.liveness_bound);
  r.initial_graph = initial_graph_;
  r.trace = s.trace().entries();
  r.final_graph = s.config().graph();

  GraphTracker tracker(initial_graph_);
  for (const auto& e : r.trace) tracker.apply(e);
  std::uint64_t committed = 0;
  std::uint64_t aborted = 0;
  for (const auto& [id, res] : s.config().results()) {
    if (res.status == TxnStatus::Committed) ++committed;
    if (res.status == TxnStatus::Aborted) ++aborted;
  }
  const Metrics& m = s.metrics();
  auto& out = r.metrics;
  out["adaptations_executed"] = static_cast<double>(m.adaptations_executed);
  out["agents_completed"] = static_cast<double>(m.agents_completed);
  out["app_deferred"] = static_cast<double>(m.app_deferred);
  out["app_transactions"] = static_cast<double>(m.app_transactions);
  out["decisions"] = static_cast<double>(m.decisions);
  out["downtime_ticks"] = tracker.downtime();
  out["events_emitted"] = static_cast<double>(m.events_emitted);
  out["exhaustions_reached"] = static_cast<double>(m.exhaustions_reached);
  out["quiescence_violations"] = static_cast<double>(s.config().quiescence_violations());
  out["txns_aborted"] = static_cast<double>(aborted);
  out["txns_committed"] = static_cast<double>(committed);
  return r;
}

// ---------------------------------------------------------------------------

std::vector<std::string> render_tree(const System& system) {
  std::vector<std::string> out;
  const Registry& reg = system.registry();
  if (!reg.initialized()) return out;
  auto describe_domain = [&](ObjectId d) {
    std::string s = "(domain #" + std::to_string(d.value);
    if (const auto* logic = system.engine().logic(d)) {
      s += ", logic " + logic->name + " " + std::string(to_string(logic->strategy.kind));
    }
    return s + ")";
  };
  std::function<void(ObjectId, int)> walk = [&](ObjectId d, int depth) {
    for (const auto& [name, id] : reg.members(d)) {
      std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
      if (reg.kind(id) == Kind::Domain) {
        out.push_back(indent + name + "/  " + describe_domain(id));
        walk(id, depth + 1);
      } else {
        out.push_back(indent + name + "  (" + std::string(to_string(reg.kind(id))) + " #" + std::to_string(id.value) + ")");
      }
    }
  };
  out.push_back("/  " + describe_domain(reg.root()));
  walk(reg.root(), 1);
  return out;
}

ConfigDocument scale_document(std::size_t objects, std::size_t hosts) {
  if (objects < hosts + 3) throw Error(Errc::Forbidden, "too few objects for the host count");
  ConfigDocument doc;
  const std::size_t components = objects - 2 - hosts;
  auto name = [](const char* prefix, std::size_t i, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
    return std::string(buf);
  };
  doc.root = ObjectId{1};
  ObjectId healing{2};
  doc.objects[doc.root] = Kind::Domain;
  doc.objects[healing] = Kind::Domain;
  doc.domains[doc.root].members["self-healing"] = healing;
  doc.domains[doc.root].logic = AdaptationLogic{"supervisor", Strategy::reactive(), {}};
  doc.domains[healing].logic = AdaptationLogic{"healing", Strategy::reactive(), {}};

  std::uint64_t next = 3;
  std::vector<HostId> host_ids;
  for (std::size_t i = 1; i <= hosts; ++i) {
    HostId h = name("h", i, 2);
    host_ids.push_back(h);
    ObjectId obj{next++};
    doc.objects[obj] = Kind::PlainObject;
    doc.domains[healing].members[h] = obj;
    doc.sensors[obj] = 50;
    doc.host_bindings[obj] = h;
    Host host;
    host.id = h;
    host.capacity = 1000;
    host.level = 1000;
    doc.hosts[h] = host;
    doc.graph.hosts[h] = true;
  }
  std::vector<ComponentId> comp_ids;
  for (std::size_t i = 0; i < components; ++i) {
    ComponentId c = name("c", i + 1, 4);
    comp_ids.push_back(c);
    ObjectId obj{next++};
    doc.objects[obj] = Kind::PlainObject;
    doc.domains[healing].members[c] = obj;
    doc.component_bindings[obj] = c;
    static const char* kinds[] = {"frontend", "service", "cache", "store"};
    doc.graph.components[c] = Component{kinds[i % 4], host_ids[i % hosts], ComponentState::Active};
  }
  for (std::size_t i = 0; i + 1 < components; ++i) {
    if (i % 4 != 3) doc.graph.connections.insert(Connection{comp_ids[i], "out", comp_ids[i + 1], "in"});
  }
  for (std::size_t k = 0; k < std::min<std::size_t>(5, hosts - 1); ++k) {
    doc.faults.push_back(FaultEntry{static_cast<Tick>(100 + 200 * k), FaultEntry::Type::Kill, host_ids[k], {}, 0.0});
  }
  doc.scenario["name"] = "scale";
  doc.scenario["audit_period"] = "500";
  return doc;
}

}  // namespace adf
