#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "adf/error.hpp"
#include "adf/system.hpp"

using namespace adf;

namespace {

// Proposes one "noop" agent visit to every in-scope source it analyzes and
// records how many inputs each analysis saw.
class Visitor : public LogicBehavior {
 public:
  explicit Visitor(std::vector<std::size_t>* seen) : seen_(seen) {}

  // Agents report back through the domain that launched them; reacting to
  // those reports would launch agents forever.
  std::vector<AdaptationEvent> monitor(LogicContext&, std::span<const AdaptationEvent> events) override {
    std::vector<AdaptationEvent> out;
    for (const auto& e : events) {
      if (e.event_type != "agent_report") out.push_back(e);
    }
    return out;
  }

  std::optional<Decision> analyze(LogicContext& ctx, std::span<const AdaptationEvent> inputs) override {
    if (seen_ != nullptr) seen_->push_back(inputs.size());
    Decision d;
    std::set<ObjectId> sources;
    for (const auto& e : inputs) sources.insert(e.source);
    for (ObjectId s : sources) {
      MobileAgent a;
      a.action = "noop";
      auto p = ctx.path_of(s);
      a.itinerary.push_back(p ? *p : PathName({"nowhere"}));
      d.proposed_actions.push_back({a});
    }
    return d;
  }
  void execute(LogicContext& ctx, const Scenario& s, const Decision& d) override { ctx.schedule(s, d); }


 private:
  std::vector<std::size_t>* seen_;
};

struct World {
  System sys;
  ObjectId root;
  std::vector<std::size_t> seen;

  World() {
    root = sys.registry().create_root();
    sys.engine().catalog().add("visitor", [this] { return std::make_unique<Visitor>(&seen); });
  }
  ObjectId domain(ObjectId parent, const std::string& name) {
    ObjectId d = sys.registry().register_object(Kind::Domain);
    sys.registry().include(parent, d, name);
    return d;
  }
  ObjectId sensor(ObjectId parent, const std::string& name) {
    ObjectId s = sys.registry().register_object(Kind::Sensor);
    sys.registry().include(parent, s, name);
    sys.sensors().register_sensor(s, 0);
    return s;
  }
  std::size_t count(const std::string& kind, const std::string& key = "", const std::string& value = "") const {
    std::size_t n = 0;
    for (const auto& e : sys.trace().entries()) {
      if (e.kind != kind) continue;
      if (!key.empty() && (e.get(key) == nullptr || *e.get(key) != value)) continue;
      ++n;
    }
    return n;
  }
  void tick_to(Tick t) { sys.clock().run_until(t); }
};

}  // namespace

TEST(Policy, DirectivesAreAFixedVocabulary) {
  Policy p;
  p.set("cooldown", 5);
  EXPECT_EQ(p.get("cooldown"), 5.0);
  p.set("enabled", 0);
  EXPECT_FALSE(p.enabled);
  EXPECT_FALSE(p.get("enabled"));
  EXPECT_THROW(p.set("speed", 1), Error);
  EXPECT_FALSE(p.get("window"));
}

TEST(Engine, LoadLogicValidatesStrategyAndName) {
  World w;
  ObjectId d = w.domain(w.root, "d");
  EXPECT_THROW(w.sys.engine().load_logic(d, {"nope", Strategy::reactive(), {}}), Error);
  EXPECT_THROW(w.sys.engine().load_logic(d, {"visitor", Strategy::proactive(0, 0, 10), {}}), Error);
  EXPECT_THROW(w.sys.engine().load_logic(d, {"visitor", Strategy::retroactive(0), {}}), Error);
  ObjectId s = w.sensor(d, "s");
  EXPECT_THROW(w.sys.engine().load_logic(s, {"visitor", Strategy::reactive(), {}}), Error);
  w.sys.engine().load_logic(d, {"visitor", Strategy::reactive(), {}});
  ASSERT_NE(w.sys.engine().logic(d), nullptr);
  w.sys.engine().unload_logic(d);
  EXPECT_EQ(w.sys.engine().logic(d), nullptr);
  EXPECT_THROW(w.sys.engine().unload_logic(d), Error);
}

TEST(Routing, ReachesEveryRootReachableAncestor) {
  World w;
  ObjectId healing = w.domain(w.root, "healing");
  ObjectId other = w.domain(w.root, "other");
  ObjectId s = w.sensor(healing, "s");
  EXPECT_EQ(w.sys.engine().routing_targets(s), (std::vector<ObjectId>{w.root, healing}));
  EXPECT_EQ(w.sys.sensors().emit(s, "tick", {}, 0), 2u);
  // Membership changes are picked up.
  w.sys.registry().include(other, s, "s");
  EXPECT_EQ(w.sys.engine().routing_targets(s), (std::vector<ObjectId>{w.root, healing, other}));
  ObjectId detached = w.sys.registry().register_object(Kind::Domain);
  w.sys.registry().include(detached, s, "s");
  EXPECT_EQ(w.sys.engine().routing_targets(s).size(), 3u);
  EXPECT_EQ(w.sys.engine().inbox(healing).size(), 1u);
}

TEST(Routing, UnregisteredAndRegressingSensorsAreRejected) {
  World w;
  ObjectId s = w.sensor(w.root, "s");
  ObjectId plain = w.sys.registry().register_object(Kind::PlainObject);
  try {
    w.sys.sensors().emit(plain, "x", {}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownSensor);
  }
  w.sys.sensors().emit(s, "x", {}, 10);
  try {
    w.sys.sensors().emit(s, "x", {}, 9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::TimeRegression);
  }
  EXPECT_THROW(w.sys.sensors().emit(s, "bad type", {}, 11), Error);
}

// Routing agrees with a scan over every domain's indirect enumeration on
// random hierarchies.
TEST(RoutingProperty, MatchesEnumerationScan) {
  for (std::uint32_t seed = 1; seed <= 30; ++seed) {
    std::mt19937 rng(seed);
    World w;
    std::vector<ObjectId> domains{w.root};
    std::vector<ObjectId> sensors;
    for (int i = 0; i < 12; ++i) {
      ObjectId d = w.sys.registry().register_object(Kind::Domain);
      domains.push_back(d);
    }
    for (int i = 0; i < 8; ++i) {
      ObjectId s = w.sys.registry().register_object(Kind::Sensor);
      w.sys.sensors().register_sensor(s, 0);
      sensors.push_back(s);
    }
    for (int step = 0; step < 40; ++step) {
      ObjectId d = domains[rng() % domains.size()];
      ObjectId m = rng() % 2 ? sensors[rng() % sensors.size()] : domains[1 + rng() % (domains.size() - 1)];
      try {
        w.sys.registry().include(d, m, "m" + std::to_string(step));
      } catch (const Error&) {
      }
      for (ObjectId s : sensors) {
        std::vector<ObjectId> want;
        for (ObjectId dom : domains) {
          if (dom != w.root && w.sys.registry().paths_of(dom).empty()) continue;
          if (w.sys.registry().paths_of(s).empty()) continue;
          for (const auto& e : w.sys.registry().enumerate(dom, EnumerateMode::Indirect)) {
            if (e.id == s) {
              want.push_back(dom);
              break;
            }
          }
        }
        EXPECT_EQ(w.sys.engine().routing_targets(s), want) << "seed " << seed;
      }
    }
  }
}

TEST(Pipeline, ReactiveDecisionRunsAction) {
  World w;
  ObjectId d = w.domain(w.root, "d");
  ObjectId s = w.sensor(d, "s");
  w.sys.engine().load_logic(d, {"visitor", Strategy::reactive(), {}});
  w.sys.sensors().emit(s, "tick", {}, 0);
  ASSERT_EQ(w.sys.engine().decisions().size(), 1u);
  EXPECT_EQ(w.sys.engine().decisions()[0].targets, (std::vector<ObjectId>{s}));
  w.tick_to(10);
  EXPECT_EQ(w.count("action"), 1u);
  EXPECT_EQ(w.count("agent-done"), 1u);
  EXPECT_EQ(w.sys.metrics().agents_completed, 1u);
}

TEST(Pipeline, RunPipelineReportsConsistencyAndPolicy) {
  World w;
  ObjectId d = w.domain(w.root, "d");
  ObjectId s = w.sensor(d, "s");
  ObjectId outside = w.sensor(w.root, "outside");
  w.sys.engine().load_logic(d, {"visitor", Strategy::reactive(), {}});

  AdaptationEvent foreign = w.sys.make_event(outside, "tick", {});
  std::vector<AdaptationEvent> in{foreign};
  try {
    w.sys.engine().run_pipeline(d, in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ConsistencyRejected);
  }

  Policy off;
  off.enabled = false;
  w.sys.engine().set_policy(d, off);
  std::vector<AdaptationEvent> mine{w.sys.make_event(s, "tick", {})};
  try {
    w.sys.engine().run_pipeline(d, mine);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::PolicySuppressed);
  }
  ObjectId bare = w.domain(w.root, "bare");
  try {
    w.sys.engine().run_pipeline(bare, mine);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NoLogicLoaded);
  }
}

TEST(Pipeline, ProactiveWindowKeepsRecentEvents) {
  World w;
  ObjectId d = w.domain(w.root, "d");
  ObjectId s = w.sensor(d, "s");
  w.sys.engine().load_logic(d, {"visitor", Strategy::proactive(25, 0, 0), {}});
  for (Tick t = 0; t <= 100; t += 10) {
    w.tick_to(t);
    w.sys.sensors().emit(s, "tick", {}, t);
  }
  // Window (now - 25, now] holds three samples at 10-tick spacing.
  EXPECT_EQ(w.seen.front(), 1u);
  EXPECT_EQ(w.seen.back(), 3u);
}

TEST(Pipeline, RetroactiveRunsOnlyAtPeriodBoundaries) {
  World w;
  ObjectId d = w.domain(w.root, "d");
  ObjectId s = w.sensor(d, "s");
  w.sys.engine().load_logic(d, {"visitor", Strategy::retroactive(50), {}});
  for (Tick t = 3; t < 160; t += 7) {
    w.tick_to(t);
    w.sys.sensors().emit(s, "tick", {}, t);
  }
  w.tick_to(200);
  // Each boundary sees what accumulated since the previous one; the sample
  // at 150 arrives after that boundary has run.
  EXPECT_EQ(w.seen, (std::vector<std::size_t>{7, 7, 7, 2}));
  for (const auto& e : w.sys.trace().entries()) {
    if (e.kind == "action") EXPECT_EQ(e.time % 50, 0) << e.render();
  }
}

// With identical decisions every tick over a horizon T and cooldown C the
// number executed never exceeds ceil(T / C).
TEST(PolicyProperty, CooldownBoundsRepeatedActions) {
  for (Tick cooldown : {1, 3, 7, 10, 25}) {
    World w;
    ObjectId d = w.domain(w.root, "d");
    ObjectId s = w.sensor(d, "s");
    w.sys.engine().load_logic(d, {"visitor", Strategy::reactive(), {}});
    Policy p;
    p.set("cooldown", static_cast<double>(cooldown));
    w.sys.engine().set_policy(d, p);
    const Tick horizon = 100;
    for (Tick t = 0; t < horizon; ++t) {
      w.tick_to(t);
      w.sys.sensors().emit(s, "tick", {}, t);
    }
    std::size_t executed = w.count("decision", "status", "scheduled");
    EXPECT_LE(executed, static_cast<std::size_t>((horizon + cooldown - 1) / cooldown)) << cooldown;
    EXPECT_GE(executed, static_cast<std::size_t>(horizon / cooldown)) << cooldown;
  }
}

// Tightening max_actions_per_window never lets more actions through.
TEST(PolicyProperty, ActionCapIsMonotone) {
  std::size_t previous = std::numeric_limits<std::size_t>::max();
  for (int cap = 12; cap >= 0; --cap) {
    World w;
    ObjectId d = w.domain(w.root, "d");
    ObjectId s = w.sensor(d, "s");
    w.sys.engine().load_logic(d, {"visitor", Strategy::reactive(), {}});
    Policy p;
    p.set("max_actions_per_window", cap);
    p.set("window", 20);
    w.sys.engine().set_policy(d, p);
    for (Tick t = 0; t < 100; t += 2) {
      w.tick_to(t);
      w.sys.sensors().emit(s, "tick", {}, t);
    }
    w.tick_to(120);
    std::size_t actions = w.count("action");
    EXPECT_LE(actions, previous) << "cap " << cap;
    // Every window of 20 ticks holds at most cap actions.
    std::vector<Tick> times;
    for (const auto& e : w.sys.trace().entries()) {
      if (e.kind == "action") times.push_back(e.time);
    }
    for (Tick t0 = 0; t0 < 120; ++t0) {
      auto n = std::count_if(times.begin(), times.end(), [&](Tick t) { return t > t0 - 20 && t <= t0; });
      EXPECT_LE(n, cap) << "cap " << cap << " at " << t0;
    }
    previous = actions;
  }
  EXPECT_EQ(previous, 0u);
}

TEST(Commands, OnlyFlowDownTheHierarchy) {
  World w;
  ObjectId a = w.domain(w.root, "a");
  ObjectId b = w.domain(a, "b");
  w.sys.engine().load_logic(b, {"visitor", Strategy::reactive(), {}});
  EXPECT_TRUE(w.sys.sensors().send_command({w.root, b, "ping", {}}).handled);
  EXPECT_FALSE(w.sys.sensors().send_command({w.root, a, "ping", {}}).handled);
  try {
    w.sys.sensors().send_command({b, a, "ping", {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotAChild);
  }
  EXPECT_THROW(w.sys.sensors().send_command({a, a, "ping", {}}), Error);
  w.sys.sensors().send_command({a, b, "set_policy", {{"cooldown", 9}}});
  EXPECT_EQ(w.sys.engine().policy(b).source, PolicySource::ParentDomain);
  EXPECT_EQ(w.sys.engine().policy(b).get("cooldown"), 9.0);
}

// Brute force over every ordered pair of domains: a command is accepted
// exactly when the sender reaches the receiver through membership.
TEST(CommandsProperty, AcceptedExactlyForDescendants) {
  for (std::uint32_t seed = 1; seed <= 20; ++seed) {
    std::mt19937 rng(seed);
    World w;
    std::vector<ObjectId> domains{w.root};
    std::map<ObjectId, std::set<ObjectId>> children;
    for (int i = 0; i < 10; ++i) domains.push_back(w.sys.registry().register_object(Kind::Domain));
    for (int step = 0; step < 25; ++step) {
      ObjectId p = domains[rng() % domains.size()];
      ObjectId c = domains[1 + rng() % (domains.size() - 1)];
      try {
        w.sys.registry().include(p, c, "d" + std::to_string(step));
        children[p].insert(c);
      } catch (const Error&) {
      }
    }
    std::function<bool(ObjectId, ObjectId)> below = [&](ObjectId from, ObjectId to) {
      for (ObjectId c : children[from]) {
        if (c == to || below(c, to)) return true;
      }
      return false;
    };
    for (ObjectId from : domains) {
      for (ObjectId to : domains) {
        bool ok = true;
        try {
          w.sys.sensors().send_command({from, to, "ping", {}});
        } catch (const Error& e) {
          ok = false;
          EXPECT_EQ(e.code(), Errc::NotAChild);
        }
        EXPECT_EQ(ok, below(from, to)) << "seed " << seed << " " << from.value << "->" << to.value;
      }
    }
  }
}

TEST(Audit, ReportsStaleSensorsAndOrphans) {
  World w;
  ObjectId d = w.domain(w.root, "d");
  ObjectId s = w.sys.registry().register_object(Kind::Sensor);
  w.sys.registry().include(d, s, "s");
  w.sys.sensors().register_sensor(s, 10);
  ObjectId loose = w.sys.registry().register_object(Kind::PlainObject);
  (void)loose;
  auto findings = w.sys.engine().audit_tick(d, 5);
  EXPECT_TRUE(findings.empty());
  findings = w.sys.engine().audit_tick(d, 11);
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0].kind, FindingKind::SensorStale);
  EXPECT_EQ(findings[0].subject, s);
  auto at_root = w.sys.engine().audit_tick(w.root, 11);
  bool orphan = std::any_of(at_root.begin(), at_root.end(),
                            [&](const AuditFinding& f) { return f.kind == FindingKind::OrphanedObject && f.subject == loose; });
  EXPECT_TRUE(orphan);
  AdaptationEvent e = finding_event(w.sys, findings[0]);
  EXPECT_EQ(e.event_type, "audit_SensorStale");
  EXPECT_EQ(e.source, s);
}

TEST(Escalation, CarriesProvenanceToParents) {
  World w;
  ObjectId d = w.domain(w.root, "d");
  ObjectId s = w.sensor(d, "s");
  AdaptationEvent e = w.sys.make_event(s, "help", {});
  auto delivered = w.sys.engine().propagate_to_parent(d, e);
  ASSERT_EQ(delivered.size(), 1u);
  EXPECT_EQ(delivered[0].first, w.root);
  EXPECT_EQ(w.count("propagate"), 1u);
  try {
    w.sys.engine().propagate_to_parent(w.root, e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::NoParent);
  }
}
