#pragma once

// Randomly populated systems for persistence round trips: a domain DAG with
// shared members, hosts, components, links, sensors, logics and policies.

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "adf/error.hpp"
#include "adf/system.hpp"

namespace adf::testkit {

inline std::unique_ptr<System> random_system(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  auto real = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

  auto sys = std::make_unique<System>();
  Registry& reg = sys->registry();
  std::vector<ObjectId> domains{reg.create_root()};
  const std::size_t n_domains = 1 + pick(7);
  for (std::size_t i = 0; i < n_domains; ++i) {
    ObjectId d = reg.register_object(Kind::Domain);
    reg.include(domains[pick(domains.size())], d, "d" + std::to_string(i));
    domains.push_back(d);
  }
  // Extra domain-to-domain edges give objects several paths.
  for (std::size_t i = 0; i < n_domains; ++i) {
    try {
      reg.include(domains[pick(domains.size())], domains[1 + pick(domains.size() - 1)], "x" + std::to_string(i));
    } catch (const Error&) {
    }
  }

  const std::size_t n_hosts = 1 + pick(4);
  std::vector<HostId> hosts;
  for (std::size_t i = 0; i < n_hosts; ++i) {
    Host h;
    h.id = "h" + std::to_string(i);
    h.capacity = std::round(real(10, 5000));
    h.level = h.capacity * real(0.1, 1.0);
    h.leak = pick(2) ? real(0.0, 2.0) : 0.0;
    h.up = pick(5) != 0;
    sys->add_host(h);
    hosts.push_back(h.id);
    ObjectId obj = reg.register_object(Kind::PlainObject);
    reg.include(domains[pick(domains.size())], obj, h.id);
    sys->bind_host(obj, h.id);
    if (pick(2)) sys->sensors().register_sensor(obj, static_cast<Tick>(pick(50)));
  }
  if (hosts.size() >= 2) {
    sys->set_link(hosts[0], hosts[1], real(0, 1));
    ObjectId obj = reg.register_object(Kind::PlainObject);
    reg.include(domains[pick(domains.size())], obj, "link");
    sys->bind_link(obj, hosts[0], hosts[1]);
  }

  ConfigGraph g = sys->config().graph();
  const std::size_t n_components = pick(8);
  static const char* kinds[] = {"frontend", "service", "cache", "store"};
  for (std::size_t i = 0; i < n_components; ++i) {
    ComponentId c = "c" + std::to_string(i);
    g.components[c] = {kinds[pick(4)], hosts[pick(hosts.size())], ComponentState::Active};
    ObjectId obj = reg.register_object(Kind::PlainObject);
    const std::size_t homes = 1 + pick(2);
    for (std::size_t k = 0; k < homes; ++k) {
      try {
        reg.include(domains[pick(domains.size())], obj, c);
      } catch (const Error&) {
      }
    }
    sys->bind_component(obj, c);
    if (i > 0 && pick(2)) g.connections.insert({"c" + std::to_string(i - 1), "out", c, "in"});
  }
  sys->config().reset(g);

  const std::size_t n_sensors = pick(4);
  for (std::size_t i = 0; i < n_sensors; ++i) {
    ObjectId s = reg.register_object(Kind::Sensor);
    reg.include(domains[pick(domains.size())], s, "s" + std::to_string(i));
    sys->sensors().register_sensor(s, static_cast<Tick>(pick(100)));
  }

  for (ObjectId d : domains) {
    switch (pick(5)) {
      case 0: sys->engine().load_logic(d, {"healing", Strategy::reactive(), {}}); break;
      case 1:
        sys->engine().load_logic(d, {"rejuvenation", Strategy::proactive(1 + static_cast<Tick>(pick(500)), real(0, 10), static_cast<Tick>(pick(200))), {}});
        break;
      case 2:
        sys->engine().load_logic(d, {"optimization", Strategy::retroactive(1 + static_cast<Tick>(pick(1000))), {{"threshold", real(0, 1)}}});
        break;
      case 3:
        sys->engine().load_logic(d, {"supervisor", Strategy::reactive(), {{"max_retries", 1.0 + static_cast<double>(pick(5))}}});
        break;
      default: break;
    }
    if (pick(3) == 0) {
      Policy p;
      p.set("cooldown", static_cast<double>(pick(100)));
      if (pick(2)) p.set("max_actions_per_window", static_cast<double>(pick(10)));
      if (pick(2)) p.set("window", real(1, 100));
      p.enabled = pick(4) != 0;
      sys->engine().set_policy(d, p);
    }
  }
  return sys;
}

}  // namespace adf::testkit
