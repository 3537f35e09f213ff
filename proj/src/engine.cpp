#include "adf/engine.hpp"

#include <algorithm>
#include <set>

#include "adf/error.hpp"
#include "adf/system.hpp"

namespace adf {

std::string_view to_string(StrategyKind kind) noexcept {
  switch (kind) {
    case StrategyKind::Reactive: return "reactive";
    case StrategyKind::Proactive: return "proactive";
    case StrategyKind::Retroactive: return "retroactive";
  }
  return "reactive";
}

StrategyKind strategy_kind_from_string(std::string_view text) {
  if (text == "reactive") return StrategyKind::Reactive;
  if (text == "proactive") return StrategyKind::Proactive;
  if (text == "retroactive") return StrategyKind::Retroactive;
  throw Error(Errc::ParseError, "unknown strategy '" + std::string(text) + "'");
}

std::string_view to_string(PolicySource source) noexcept {
  return source == PolicySource::HumanManager ? "human" : "parent";
}

std::string_view to_string(FindingKind kind) noexcept {
  switch (kind) {
    case FindingKind::SensorStale: return "SensorStale";
    case FindingKind::DanglingReference: return "DanglingReference";
    case FindingKind::OrphanedObject: return "OrphanedObject";
    case FindingKind::UnresolvableMember: return "UnresolvableMember";
  }
  return "Unknown";
}

std::string_view to_string(PipelineStatus status) noexcept {
  switch (status) {
    case PipelineStatus::NoLogic: return "no-logic";
    case PipelineStatus::Accumulated: return "accumulated";
    case PipelineStatus::NoDecision: return "no-decision";
    case PipelineStatus::Scheduled: return "scheduled";
    case PipelineStatus::ConsistencyRejected: return "consistency-rejected";
    case PipelineStatus::PolicySuppressed: return "policy-suppressed";
    case PipelineStatus::CooldownSuppressed: return "cooldown-suppressed";
  }
  return "no-decision";
}

bool Policy::known_directive(std::string_view key) noexcept {
  return key == "max_actions_per_window" || key == "window" || key == "cooldown" || key == "forecast_margin" ||
         key == "enabled";
}

void Policy::set(const std::string& key, double value) {
  if (!known_directive(key)) throw Error(Errc::UnknownDirective, "unknown policy directive '" + key + "'");
  if (key == "enabled") {
    enabled = value != 0.0;
  } else {
    directives[key] = value;
  }
}

std::optional<double> Policy::get(const std::string& key) const {
  auto it = directives.find(key);
  if (it == directives.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------

std::vector<AdaptationEvent> LogicBehavior::monitor(LogicContext&, std::span<const AdaptationEvent> events) {
  return {events.begin(), events.end()};
}

std::vector<AuditFinding> LogicBehavior::audit(LogicContext&) { return {}; }

Scenario LogicBehavior::regulate(LogicContext& ctx, const Decision& decision) {
  Scenario s;
  for (const auto& a : decision.proposed_actions) s.steps.push_back({0, a});
  s.cooldown = static_cast<Tick>(ctx.policy().get("cooldown").value_or(ctx.param("cooldown", 0.0)));
  return s;
}

std::optional<Decision> LogicBehavior::on_command(LogicContext&, const AdaptationCommand&) { return std::nullopt; }

void LogicCatalog::add(const std::string& name, Factory factory) {
  if (!is_token(name)) throw Error(Errc::InvalidName, "bad logic name '" + name + "'");
  factories_[name] = std::move(factory);
}

std::unique_ptr<LogicBehavior> LogicCatalog::create(const std::string& name) const {
  auto it = factories_.find(name);
  if (it == factories_.end()) throw Error(Errc::UnknownLogic, "no logic registered as '" + name + "'");
  return it->second();
}

std::vector<std::string> LogicCatalog::names() const {
  std::vector<std::string> out;
  for (const auto& [name, f] : factories_) out.push_back(name);
  return out;
}

// ---------------------------------------------------------------------------

LogicContext::LogicContext(Engine& engine, System& system, ObjectId domain)
    : engine_(engine), system_(system), domain_(domain) {}

Tick LogicContext::now() const { return system_.clock().now(); }

const AdaptationLogic& LogicContext::logic() const { return engine_.state(domain_).binding->logic; }

const Policy& LogicContext::policy() const { return engine_.policy(domain_); }

double LogicContext::param(const std::string& key, double fallback) const {
  const auto& params = logic().params;
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

const std::vector<MemberEntry>& LogicContext::scope() const { return engine_.scope_of(domain_); }

bool LogicContext::in_scope(ObjectId id) const {
  engine_.scope_of(domain_);
  return engine_.state(domain_).scope_index.contains(id);
}

std::optional<PathName> LogicContext::path_of(ObjectId id) const {
  engine_.scope_of(domain_);
  const auto& index = engine_.state(domain_).scope_index;
  auto it = index.find(id);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

void LogicContext::escalate(const AdaptationEvent& event) {
  Engine& engine = engine_;
  System& system = system_;
  ObjectId domain = domain_;
  system_.clock().at(system_.clock().now(), "escalate", [&engine, &system, domain, event] {
    try {
      engine.propagate_to_parent(domain, event);
    } catch (const Error& e) {
      system.trace().add(system.clock().now(), "escalate-failed").set("domain", domain).set("error", to_string(e.code()));
    }
  });
}

void LogicContext::forget(ObjectId source) {
  auto& binding = engine_.state(domain_).binding;
  if (!binding) return;
  std::erase_if(binding->window, [&](const AdaptationEvent& e) { return e.source == source; });
}

void LogicContext::schedule(const Scenario& scenario, const Decision& decision) {
  auto& st = engine_.state(domain_);
  const auto& logic = st.binding->logic;
  System& system = system_;
  ObjectId domain = domain_;
  for (const auto& step : scenario.steps) {
    Tick at = now() + step.offset;
    st.action_times.push_back(at);
    system_.clock().at(at, "action " + std::string(to_string(step.action.kind())),
                       [&system, domain, action = step.action, name = logic.name, strategy = logic.strategy,
                        targets = decision.targets] { system.perform(domain, action, name, strategy, targets); });
  }
}

// ---------------------------------------------------------------------------

Engine::Engine(System& system) : system_(system) {}

Engine::DomainState& Engine::state(ObjectId domain) { return domains_[domain]; }

const Engine::DomainState* Engine::find_state(ObjectId domain) const {
  auto it = domains_.find(domain);
  return it == domains_.end() ? nullptr : &it->second;
}

const std::vector<MemberEntry>& Engine::scope_of(ObjectId domain) {
  auto& st = state(domain);
  const auto& reg = system_.registry();
  if (st.scope_version != reg.version()) {
    st.scope = reg.enumerate(domain, EnumerateMode::Indirect);
    st.scope_index.clear();
    for (const auto& entry : st.scope) st.scope_index.emplace(entry.id, entry.relative);
    st.scope_version = reg.version();
  }
  return st.scope;
}

void Engine::load_logic(ObjectId domain, AdaptationLogic logic) {
  if (system_.registry().kind(domain) != Kind::Domain) {
    throw Error(Errc::NotADomain, "#" + std::to_string(domain.value) + " is not a domain");
  }
  if (!is_token(logic.name)) throw Error(Errc::InvalidName, "bad logic name '" + logic.name + "'");
  const auto& s = logic.strategy;
  if (s.kind == StrategyKind::Proactive && (s.window <= 0 || s.margin < 0)) {
    throw Error(Errc::Forbidden, "proactive strategy needs a positive window and non-negative margin");
  }
  if (s.kind == StrategyKind::Retroactive && s.period <= 0) {
    throw Error(Errc::Forbidden, "retroactive strategy needs a positive period");
  }
  for (const auto& [key, value] : logic.params) {
    if (!is_token(key)) throw Error(Errc::InvalidName, "bad parameter name '" + key + "'");
  }
  auto behavior = catalog_.create(logic.name);
  auto& st = state(domain);
  st.binding.emplace(Binding{std::move(logic), std::move(behavior), {}, {}, {}, ++generations_});
  if (st.binding->logic.strategy.kind == StrategyKind::Retroactive) schedule_boundary(domain, st.binding->generation);
}

void Engine::unload_logic(ObjectId domain) {
  auto* st = find_state(domain);
  if (st == nullptr || !st->binding) {
    throw Error(Errc::NoLogicLoaded, "no logic loaded on #" + std::to_string(domain.value));
  }
  state(domain).binding.reset();
}

const AdaptationLogic* Engine::logic(ObjectId domain) const {
  auto* st = find_state(domain);
  return st != nullptr && st->binding ? &st->binding->logic : nullptr;
}

std::vector<ObjectId> Engine::domains_with_logic() const {
  std::vector<ObjectId> out;
  for (const auto& [id, st] : domains_) {
    if (st.binding && system_.registry().contains(id)) out.push_back(id);
  }
  return out;
}

const Policy& Engine::policy(ObjectId domain) const {
  static const Policy default_policy;
  auto* st = find_state(domain);
  return st != nullptr && st->policy ? *st->policy : default_policy;
}

void Engine::set_policy(ObjectId domain, Policy policy) {
  if (system_.registry().kind(domain) != Kind::Domain) {
    throw Error(Errc::NotADomain, "#" + std::to_string(domain.value) + " is not a domain");
  }
  for (const auto& [key, value] : policy.directives) {
    if (!Policy::known_directive(key) || key == "enabled") {
      throw Error(Errc::UnknownDirective, "unknown policy directive '" + key + "'");
    }
  }
  state(domain).policy = std::move(policy);
}

void Engine::schedule_boundary(ObjectId domain, std::uint64_t generation) {
  Tick period = state(domain).binding->logic.strategy.period;
  Tick now = system_.clock().now();
  Tick next = (now / period + 1) * period;
  system_.clock().at(next, "boundary #" + std::to_string(domain.value), [this, domain, generation] {
    auto* st = find_state(domain);
    if (st == nullptr || !st->binding || st->binding->generation != generation) return;
    if (!system_.registry().contains(domain)) return;
    period_boundary(domain);
    schedule_boundary(domain, generation);
  });
}

std::vector<ObjectId> Engine::routing_targets(ObjectId source) const {
  const auto& reg = system_.registry();
  if (routing_.version != reg.version()) {
    routing_.targets.clear();
    routing_.version = reg.version();
  }
  auto it = routing_.targets.find(source);
  if (it != routing_.targets.end()) return it->second;
  std::vector<ObjectId> out;
  if (reg.initialized() && !reg.paths_of(source).empty()) {
    for (ObjectId d : reg.ancestors(source)) {
      if (!reg.paths_of(d).empty()) out.push_back(d);
    }
  }
  routing_.targets.emplace(source, out);
  return out;
}

DeliveryList Engine::dispatch_event(const AdaptationEvent& event) {
  if (!system_.sensors().registered(event.source)) {
    throw Error(Errc::UnknownSensor, "#" + std::to_string(event.source.value) + " is not a registered sensor");
  }
  DeliveryList out;
  for (ObjectId d : routing_targets(event.source)) out.emplace_back(d, deliver(d, event));
  return out;
}

std::optional<Decision> Engine::deliver(ObjectId domain, const AdaptationEvent& event) {
  auto& st = state(domain);
  st.inbox.push_back(event.event_id);
  if (!st.binding) return std::nullopt;
  std::vector<AdaptationEvent> one{event};
  return run_stages(domain, std::move(one), false).decision;
}

DeliveryList Engine::propagate_to_parent(ObjectId domain, AdaptationEvent event) {
  auto parents = system_.registry().parents(domain);
  if (parents.empty()) throw Error(Errc::NoParent, "#" + std::to_string(domain.value) + " has no parent domain");
  event.provenance.push_back(domain);
  system_.trace()
      .add(system_.clock().now(), "propagate")
      .set("domain", domain)
      .set("event", event.event_id)
      .set("parents", join(parents))
      .set("hops", static_cast<std::uint64_t>(event.provenance.size()));
  DeliveryList out;
  for (ObjectId p : parents) out.emplace_back(p, deliver(p, event));
  return out;
}

PipelineOutcome Engine::evaluate(ObjectId domain, std::span<const AdaptationEvent> inputs) {
  return run_stages(domain, {inputs.begin(), inputs.end()}, false);
}

std::optional<Scenario> Engine::run_pipeline(ObjectId domain, std::span<const AdaptationEvent> inputs) {
  auto* st = find_state(domain);
  if (st == nullptr || !st->binding) throw Error(Errc::NoLogicLoaded, "no logic loaded on #" + std::to_string(domain.value));
  PipelineOutcome out = evaluate(domain, inputs);
  if (out.status == PipelineStatus::ConsistencyRejected) throw Error(Errc::ConsistencyRejected, "decision failed its consistency check");
  if (out.status == PipelineStatus::PolicySuppressed) throw Error(Errc::PolicySuppressed, "execution suppressed by policy");
  return out.scenario;
}

PipelineOutcome Engine::period_boundary(ObjectId domain) { return run_stages(domain, {}, true); }

PipelineOutcome Engine::run_stages(ObjectId domain, std::vector<AdaptationEvent> inputs, bool boundary) {
  auto& st = state(domain);
  if (!st.binding) return {PipelineStatus::NoLogic, {}, {}};
  LogicContext ctx(*this, system_, domain);
  auto& b = *st.binding;
  const Strategy strategy = b.logic.strategy;

  if (strategy.kind == StrategyKind::Retroactive && !boundary) {
    auto kept = b.behavior->monitor(ctx, inputs);
    b.batch.insert(b.batch.end(), kept.begin(), kept.end());
    return {PipelineStatus::Accumulated, {}, {}};
  }

  std::vector<AdaptationEvent> analysis;
  if (strategy.kind == StrategyKind::Retroactive) {
    analysis.swap(b.batch);
  } else {
    auto kept = b.behavior->monitor(ctx, inputs);
    if (strategy.kind == StrategyKind::Proactive) {
      b.window.insert(b.window.end(), kept.begin(), kept.end());
      Tick horizon = ctx.now() - strategy.window;
      std::erase_if(b.window, [&](const AdaptationEvent& e) { return e.timestamp <= horizon; });
      if (kept.empty()) return {PipelineStatus::NoDecision, {}, {}};
      analysis = b.window;
    } else {
      analysis = std::move(kept);
    }
  }
  if (analysis.empty()) return {PipelineStatus::NoDecision, {}, {}};

  auto decision = b.behavior->analyze(ctx, analysis);
  if (!decision) return {PipelineStatus::NoDecision, {}, {}};
  if (decision->cause.empty()) {
    for (const auto& e : analysis) decision->cause.push_back(e.event_id);
  }
  return finish(ctx, std::move(*decision));
}

PipelineOutcome Engine::finish(LogicContext& ctx, Decision decision) {
  ObjectId domain = ctx.domain();
  auto& st = state(domain);
  auto& b = *st.binding;
  const Policy& policy = this->policy(domain);
  decision.domain = domain;
  decision.consistency_ok = check_consistency(domain, decision);

  PipelineOutcome out;
  out.status = PipelineStatus::Scheduled;
  if (!decision.consistency_ok) {
    out.status = PipelineStatus::ConsistencyRejected;
  } else if (!policy.enabled) {
    out.status = PipelineStatus::PolicySuppressed;
  } else if (auto max = policy.get("max_actions_per_window")) {
    Tick window = static_cast<Tick>(policy.get("window").value_or(0.0));
    Tick now = ctx.now();
    auto recent = std::count_if(st.action_times.begin(), st.action_times.end(),
                                [&](Tick t) { return window <= 0 || t > now - window; });
    if (static_cast<double>(recent + decision.proposed_actions.size()) > *max) out.status = PipelineStatus::PolicySuppressed;
  }

  if (out.status == PipelineStatus::Scheduled) {
    Scenario scenario = b.behavior->regulate(ctx, decision);
    bool ordered = std::is_sorted(scenario.steps.begin(), scenario.steps.end(),
                                  [](const ScenarioStep& a, const ScenarioStep& c) { return a.offset < c.offset; });
    if (!ordered || scenario.cooldown < 0 ||
        std::any_of(scenario.steps.begin(), scenario.steps.end(), [](const ScenarioStep& s) { return s.offset < 0; })) {
      throw Error(Errc::Forbidden, "regulate produced an ill-formed scenario");
    }
    std::string signature;
    for (const auto& a : decision.proposed_actions) signature += describe(a) + "|";
    auto last = b.last_executed.find(signature);
    if (last != b.last_executed.end() && ctx.now() - last->second < scenario.cooldown) {
      out.status = PipelineStatus::CooldownSuppressed;
    } else {
      b.last_executed[signature] = ctx.now();
      b.behavior->execute(ctx, scenario, decision);
      out.scenario = std::move(scenario);
    }
  }

  system_.metrics().decisions++;
  trace_decision(decision, b.logic.name, out.status);
  if (out.scenario) {
    system_.trace()
        .add(ctx.now(), "scenario")
        .set("domain", domain)
        .set("steps", static_cast<std::uint64_t>(out.scenario->steps.size()))
        .set("cooldown", out.scenario->cooldown);
  }
  decisions_.push_back(decision);
  out.decision = std::move(decision);
  return out;
}

bool Engine::check_consistency(ObjectId domain, Decision& decision) {
  LogicContext ctx(*this, system_, domain);
  std::set<ObjectId> targets;
  bool ok = !decision.proposed_actions.empty();
  const auto& graph = system_.config().graph();
  for (const auto& action : decision.proposed_actions) {
    if (const auto* txn = std::get_if<ReconfigTxn>(&action.payload)) {
      if (!validate(graph, *txn).ok()) ok = false;
      for (const auto& c : named_components(*txn)) {
        if (!graph.components.contains(c)) continue;
        auto obj = system_.object_of_component(c);
        if (!obj || !ctx.in_scope(*obj)) {
          ok = false;
          continue;
        }
        targets.insert(*obj);
      }
    } else if (const auto* cmd = std::get_if<AdaptationCommand>(&action.payload)) {
      if (!system_.registry().contains(cmd->to_domain) || system_.registry().kind(cmd->to_domain) != Kind::Domain ||
          !ctx.in_scope(cmd->to_domain)) {
        ok = false;
        continue;
      }
      targets.insert(cmd->to_domain);
    } else if (const auto* agent = std::get_if<MobileAgent>(&action.payload)) {
      if (agent->itinerary.empty() || !system_.agents().has_action(agent->action)) ok = false;
      for (const auto& stop : agent->itinerary) {
        auto obj = system_.registry().try_resolve_relative(domain, stop);
        if (!obj) {
          ok = false;
          continue;
        }
        targets.insert(*obj);
      }
    }
  }
  decision.targets.assign(targets.begin(), targets.end());
  return ok;
}

void Engine::trace_decision(const Decision& decision, const std::string& logic, PipelineStatus status) {
  auto& e = system_.trace()
                .add(system_.clock().now(), "decision")
                .set("domain", decision.domain)
                .set("logic", logic)
                .set("cause", join([&] {
                       std::vector<std::string> ids;
                       for (auto id : decision.cause) ids.push_back(std::to_string(id));
                       return ids;
                     }()))
                .set("targets", join(decision.targets))
                .set("actions", static_cast<std::uint64_t>(decision.proposed_actions.size()))
                .set("consistent", decision.consistency_ok)
                .set("status", to_string(status));
  for (const auto& [k, v] : decision.details) e.set("d." + k, v);
}

CommandResult Engine::handle_command(const AdaptationCommand& command) {
  if (command.verb == "set_policy") {
    Policy p = policy(command.to_domain);
    p.source = PolicySource::ParentDomain;
    for (const auto& [k, v] : command.args) p.set(k, v);
    set_policy(command.to_domain, std::move(p));
    return {true, std::nullopt};
  }
  auto& st = state(command.to_domain);
  if (!st.binding) return {false, std::nullopt};
  LogicContext ctx(*this, system_, command.to_domain);
  auto decision = st.binding->behavior->on_command(ctx, command);
  if (!decision) return {true, PipelineOutcome{PipelineStatus::NoDecision, {}, {}}};
  return {true, finish(ctx, std::move(*decision))};
}

std::vector<AuditFinding> Engine::audit_tick(ObjectId domain, Tick now) {
  const auto& reg = system_.registry();
  if (reg.kind(domain) != Kind::Domain) throw Error(Errc::NotADomain, "#" + std::to_string(domain.value) + " is not a domain");
  std::vector<AuditFinding> out;
  if (domain != reg.root() && reg.paths_of(domain).empty()) {
    out.push_back({FindingKind::OrphanedObject, domain, domain, "unreachable-from-root"});
  }
  const auto& scope = scope_of(domain);
  std::set<ObjectId> seen;
  for (const auto& entry : scope) {
    if (!reg.try_resolve_relative(domain, entry.relative)) {
      out.push_back({FindingKind::UnresolvableMember, domain, entry.id, entry.relative.relative_str()});
    }
    if (!seen.insert(entry.id).second) continue;
    if (const auto* info = system_.sensors().info(entry.id)) {
      Tick last = info->last_emit.value_or(info->registered);
      if (info->heartbeat > 0 && now - last > info->heartbeat) {
        out.push_back({FindingKind::SensorStale, domain, entry.id, "silent-since-" + std::to_string(last)});
      }
    }
  }
  auto& st = state(domain);
  if (st.binding) {
    std::set<ObjectId> refs;
    for (const auto& e : st.binding->window) refs.insert(e.source);
    for (const auto& e : st.binding->batch) refs.insert(e.source);
    for (ObjectId id : st.binding->behavior->referenced_objects()) refs.insert(id);
    for (ObjectId id : refs) {
      if (!st.scope_index.contains(id)) {
        out.push_back({FindingKind::DanglingReference, domain, id, "held-out-of-scope"});
      }
    }
    LogicContext ctx(*this, system_, domain);
    auto extra = st.binding->behavior->audit(ctx);
    out.insert(out.end(), extra.begin(), extra.end());
  }
  if (domain == reg.root()) {
    for (ObjectId id : reg.orphans()) out.push_back({FindingKind::OrphanedObject, domain, id, "no-path-from-root"});
  }
  return out;
}

const std::vector<std::uint64_t>& Engine::inbox(ObjectId domain) const {
  static const std::vector<std::uint64_t> empty;
  auto* st = find_state(domain);
  return st == nullptr ? empty : st->inbox;
}

AdaptationEvent finding_event(System& system, const AuditFinding& finding) {
  AdaptationEvent e = system.make_event(finding.subject, "audit_" + std::string(to_string(finding.kind)), {});
  e.payload["domain"] = static_cast<double>(finding.domain.value);
  return e;
}

}  // namespace adf
