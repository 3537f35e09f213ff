#include "adf/logics.hpp"

#include <algorithm>
#include <set>

#include "adf/analyzers.hpp"
#include "adf/error.hpp"
#include "adf/system.hpp"

namespace adf {

std::map<ComponentId, HostId> plan_placement(const std::vector<ComponentId>& stranded,
                                             std::map<HostId, double> free_by_host, double load) {
  std::map<ComponentId, HostId> plan;
  if (free_by_host.empty()) return plan;
  std::vector<ComponentId> order = stranded;
  std::sort(order.begin(), order.end());
  for (const auto& c : order) {
    auto best = free_by_host.begin();
    for (auto it = free_by_host.begin(); it != free_by_host.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    plan[c] = best->first;
    best->second -= load;
  }
  return plan;
}

namespace {

struct ScopedWorld {
  std::vector<std::pair<ObjectId, HostId>> hosts;
  std::vector<std::pair<ObjectId, ComponentId>> components;
};

ScopedWorld scoped_world(LogicContext& ctx) {
  ScopedWorld w;
  std::set<ObjectId> seen;
  for (const auto& entry : ctx.scope()) {
    if (!seen.insert(entry.id).second) continue;
    if (auto h = ctx.system().host_of(entry.id)) w.hosts.emplace_back(entry.id, *h);
    if (auto c = ctx.system().component_of(entry.id)) w.components.emplace_back(entry.id, *c);
  }
  return w;
}

AdaptationEvent synthetic(LogicContext& ctx, const std::string& type, ScalarMap payload) {
  AdaptationEvent e = ctx.system().make_event(ctx.domain(), type, std::move(payload));
  ctx.system().trace_event(e, "synthetic", 0);
  return e;
}

// ---------------------------------------------------------------------------
// Reactive: moves components stranded on failed hosts to surviving ones.

class Healing : public LogicBehavior {
 public:
  std::vector<AdaptationEvent> monitor(LogicContext&, std::span<const AdaptationEvent> events) override {
    std::vector<AdaptationEvent> kept;
    for (const auto& e : events) {
      if (e.event_type == "host_failed" || e.event_type == "reconfig_aborted" || e.event_type == "host_revived") {
        kept.push_back(e);
      }
    }
    return kept;
  }

  std::optional<Decision> analyze(LogicContext& ctx, std::span<const AdaptationEvent>) override { return plan(ctx); }

  void execute(LogicContext& ctx, const Scenario& scenario, const Decision& decision) override {
    ctx.schedule(scenario, decision);
  }

  std::optional<Decision> on_command(LogicContext& ctx, const AdaptationCommand& command) override {
    if (command.verb != "retry") return std::nullopt;
    return plan(ctx);
  }

 private:
  std::optional<Decision> plan(LogicContext& ctx) {
    System& sys = ctx.system();
    const auto& graph = sys.config().graph();
    ScopedWorld w = scoped_world(ctx);

    std::vector<ComponentId> stranded;
    for (const auto& [obj, c] : w.components) {
      auto it = graph.components.find(c);
      if (it == graph.components.end()) continue;
      if (it->second.state == ComponentState::Down && !sys.config().busy(c)) stranded.push_back(c);
    }
    if (stranded.empty()) return std::nullopt;

    std::map<HostId, double> candidates;
    for (const auto& [obj, h] : w.hosts) {
      if (sys.host(h).up) candidates[h] = sys.free_resource(h);
    }
    if (candidates.empty()) {
      ctx.escalate(synthetic(ctx, "placement_failed", {{"stranded", static_cast<double>(stranded.size())}}));
      return std::nullopt;
    }

    ReconfigTxn txn;
    for (const auto& [c, h] : plan_placement(stranded, candidates, sys.options().component_load)) {
      txn.edits.push_back(edit::MoveComponent{c, h});
    }
    Decision d;
    d.proposed_actions.push_back({std::move(txn)});
    d.details["stranded"] = static_cast<double>(stranded.size());
    return d;
  }
};

// ---------------------------------------------------------------------------
// Proactive: forecasts resource exhaustion per host and rejuvenates ahead of it.

class Rejuvenation : public LogicBehavior {
 public:
  std::vector<AdaptationEvent> monitor(LogicContext& ctx, std::span<const AdaptationEvent> events) override {
    std::vector<AdaptationEvent> kept;
    for (const auto& e : events) {
      if (e.event_type == "resource_sample" && e.payload.contains("level") && ctx.system().host_of(e.source)) {
        kept.push_back(e);
      }
    }
    return kept;
  }

  std::optional<Decision> analyze(LogicContext& ctx, std::span<const AdaptationEvent> inputs) override {
    System& sys = ctx.system();
    std::map<ObjectId, std::vector<Sample>> series;
    for (const auto& e : inputs) {
      if (ctx.in_scope(e.source)) series[e.source].emplace_back(e.timestamp, e.payload.at("level"));
    }
    const double critical = ctx.logic().strategy.critical;
    const double margin = ctx.policy().get("forecast_margin").value_or(static_cast<double>(ctx.logic().strategy.margin));
    for (const auto& [source, samples] : series) {
      std::set<Tick> times;
      for (const auto& s : samples) times.insert(s.first);
      if (times.size() < 2) continue;
      auto crossing = forecast_exhaustion(samples, critical);
      if (!crossing || *crossing - static_cast<double>(ctx.now()) > margin) continue;
      HostId host = *sys.host_of(source);
      if (!sys.host(host).up) continue;

      Decision d;
      ReconfigTxn txn;
      for (const auto& [obj, c] : scoped_world(ctx).components) {
        auto it = sys.config().graph().components.find(c);
        if (it == sys.config().graph().components.end() || it->second.host != host) continue;
        if (it->second.state == ComponentState::Down || sys.config().busy(c)) continue;
        txn.edits.push_back(edit::ReplaceComponent{c, it->second.kind});
      }
      if (!txn.edits.empty()) d.proposed_actions.push_back({std::move(txn)});
      MobileAgent agent;
      agent.action = "rejuvenate";
      agent.itinerary.push_back(*ctx.path_of(source));
      d.proposed_actions.push_back({std::move(agent)});
      d.details["forecast"] = *crossing;
      d.details["host"] = static_cast<double>(source.value);
      d.details["level"] = samples.back().second;
      d.details["samples"] = static_cast<double>(samples.size());
      ctx.forget(source);
      return d;
    }
    return std::nullopt;
  }

  void execute(LogicContext& ctx, const Scenario& scenario, const Decision& decision) override {
    ctx.schedule(scenario, decision);
  }
};

// ---------------------------------------------------------------------------
// Retroactive: at each period boundary, co-locates consumers with producers
// across links whose average quality fell below the threshold.

class Optimization : public LogicBehavior {
 public:
  std::vector<AdaptationEvent> monitor(LogicContext& ctx, std::span<const AdaptationEvent> events) override {
    std::vector<AdaptationEvent> kept;
    for (const auto& e : events) {
      if (e.event_type == "link_quality" && e.payload.contains("quality") && ctx.system().link_of(e.source)) {
        kept.push_back(e);
      }
    }
    return kept;
  }

  std::optional<Decision> analyze(LogicContext& ctx, std::span<const AdaptationEvent> inputs) override {
    System& sys = ctx.system();
    const double threshold = ctx.param("threshold", 0.5);
    std::map<ObjectId, std::pair<double, int>> sums;
    for (const auto& e : inputs) {
      if (!ctx.in_scope(e.source)) continue;
      auto& [sum, n] = sums[e.source];
      sum += e.payload.at("quality");
      ++n;
    }
    std::set<ComponentId> owned;
    for (const auto& [obj, c] : scoped_world(ctx).components) owned.insert(c);
    const auto& graph = sys.config().graph();

    std::map<ComponentId, HostId> moves;
    double worst = 1.0;
    for (const auto& [source, acc] : sums) {
      double avg = acc.first / acc.second;
      if (!threshold_crossed(avg, threshold, true)) continue;
      worst = std::min(worst, avg);
      auto [a, b] = *sys.link_of(source);
      for (const auto& conn : graph.connections) {
        const auto& from = graph.components.at(conn.from);
        const auto& to = graph.components.at(conn.to);
        bool across = (from.host == a && to.host == b) || (from.host == b && to.host == a);
        if (!across || !owned.contains(conn.to) || moves.contains(conn.to)) continue;
        if (to.state != ComponentState::Active || sys.config().busy(conn.to) || !sys.host(from.host).up) continue;
        moves[conn.to] = from.host;
      }
    }
    if (moves.empty()) return std::nullopt;
    ReconfigTxn txn;
    for (const auto& [c, h] : moves) txn.edits.push_back(edit::MoveComponent{c, h});
    Decision d;
    d.proposed_actions.push_back({std::move(txn)});
    d.details["quality"] = worst;
    return d;
  }

  void execute(LogicContext& ctx, const Scenario& scenario, const Decision& decision) override {
    ctx.schedule(scenario, decision);
  }
};

// ---------------------------------------------------------------------------
// Reactive, at the top of the tree: answers escalations from child domains
// with a delayed "retry" command, up to a bounded number of times.

class Supervisor : public LogicBehavior {
 public:
  std::vector<AdaptationEvent> monitor(LogicContext&, std::span<const AdaptationEvent> events) override {
    std::vector<AdaptationEvent> kept;
    for (const auto& e : events) {
      if (!e.provenance.empty()) kept.push_back(e);
    }
    return kept;
  }

  std::optional<Decision> analyze(LogicContext& ctx, std::span<const AdaptationEvent> inputs) override {
    if (!counter_) counter_.emplace(static_cast<Tick>(ctx.param("failure_window", 1000)));
    const auto max_retries = static_cast<std::size_t>(ctx.param("max_retries", 3));
    Decision d;
    std::set<ObjectId> children;
    for (const auto& e : inputs) {
      ObjectId child = e.provenance.back();
      if (!children.insert(child).second) continue;
      if (counter_->record(child, ctx.now()) > max_retries) continue;
      d.proposed_actions.push_back({AdaptationCommand{ctx.domain(), child, "retry", {}}});
    }
    if (d.proposed_actions.empty()) return std::nullopt;
    return d;
  }

  Scenario regulate(LogicContext& ctx, const Decision& decision) override {
    Scenario s = LogicBehavior::regulate(ctx, decision);
    const auto delay = static_cast<Tick>(ctx.param("retry_delay", 50));
    for (auto& step : s.steps) step.offset = delay;
    return s;
  }

  void execute(LogicContext& ctx, const Scenario& scenario, const Decision& decision) override {
    ctx.schedule(scenario, decision);
  }

 private:
  std::optional<FailureCounter> counter_;
};

}  // namespace

void register_builtin_logics(LogicCatalog& catalog) {
  catalog.add("healing", [] { return std::make_unique<Healing>(); });
  catalog.add("rejuvenation", [] { return std::make_unique<Rejuvenation>(); });
  catalog.add("optimization", [] { return std::make_unique<Optimization>(); });
  catalog.add("supervisor", [] { return std::make_unique<Supervisor>(); });
}

void register_builtin_actions(AgentDispatcher& agents) {
  agents.register_action("noop", [](System&, ObjectId) { return StopOutcome{}; });
  agents.register_action("probe", [](System& sys, ObjectId target) {
    auto host = sys.host_of(target);
    if (host && !sys.host(*host).up) return StopOutcome{StopStatus::Failed, "host-down"};
    return StopOutcome{};
  });
  agents.register_action("rejuvenate", [](System& sys, ObjectId target) {
    auto host = sys.host_of(target);
    if (!host) return StopOutcome{StopStatus::Failed, "not-a-host"};
    if (!sys.host(*host).up) return StopOutcome{StopStatus::Failed, "host-down"};
    sys.reset_resource(*host);
    return StopOutcome{};
  });
}

}  // namespace adf
