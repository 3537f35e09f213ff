#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adf/events.hpp"
#include "adf/registry.hpp"
#include "adf/types.hpp"

namespace adf {

class System;
class Engine;

enum class StrategyKind { Reactive, Proactive, Retroactive };

std::string_view to_string(StrategyKind kind) noexcept;
StrategyKind strategy_kind_from_string(std::string_view text);

// When the pipeline fires. Proactive carries forecast parameters (the
// margin is lead time in ticks before the forecast crossing); Retroactive
// carries its evaluation period.
struct Strategy {
  StrategyKind kind = StrategyKind::Reactive;
  Tick window = 0;
  double critical = 0.0;
  Tick margin = 0;
  Tick period = 0;

  static Strategy reactive() { return {}; }
  static Strategy proactive(Tick window, double critical, Tick margin) {
    return {StrategyKind::Proactive, window, critical, margin, 0};
  }
  static Strategy retroactive(Tick period) { return {StrategyKind::Retroactive, 0, 0.0, 0, period}; }

  friend bool operator==(const Strategy&, const Strategy&) = default;
};

enum class PolicySource { HumanManager, ParentDomain };

std::string_view to_string(PolicySource source) noexcept;

// Adaptation management policy of one domain. Directive keys are a fixed
// vocabulary; "enabled" maps onto the enabled flag.
struct Policy {
  PolicySource source = PolicySource::HumanManager;
  ScalarMap directives;
  bool enabled = true;

  static bool known_directive(std::string_view key) noexcept;
  // Throws Error{UnknownDirective}.
  void set(const std::string& key, double value);
  std::optional<double> get(const std::string& key) const;

  friend bool operator==(const Policy&, const Policy&) = default;
};

struct AdaptationLogic {
  std::string name;  // registered behavior token
  Strategy strategy;
  ScalarMap params;

  friend bool operator==(const AdaptationLogic&, const AdaptationLogic&) = default;
};

struct Decision {
  ObjectId domain;
  std::vector<std::uint64_t> cause;
  std::vector<ActuatorAction> proposed_actions;
  bool consistency_ok = false;
  std::vector<ObjectId> targets;  // filled by the consistency check
  ScalarMap details;              // analyzer output, e.g. forecast times
};

struct ScenarioStep {
  Tick offset = 0;
  ActuatorAction action;
};

struct Scenario {
  std::vector<ScenarioStep> steps;
  Tick cooldown = 0;
};

enum class FindingKind { SensorStale, DanglingReference, OrphanedObject, UnresolvableMember };

std::string_view to_string(FindingKind kind) noexcept;

struct AuditFinding {
  FindingKind kind;
  ObjectId domain;
  ObjectId subject;
  std::string detail;
};

enum class PipelineStatus {
  NoLogic,
  Accumulated,
  NoDecision,
  Scheduled,
  ConsistencyRejected,
  PolicySuppressed,
  CooldownSuppressed,
};

std::string_view to_string(PipelineStatus status) noexcept;

struct PipelineOutcome {
  PipelineStatus status = PipelineStatus::NoDecision;
  std::optional<Decision> decision;
  std::optional<Scenario> scenario;
};

// What a stage sees: its bound domain, the virtual time, and the members in
// scope addressed by paths relative to the domain.
class LogicContext {
 public:
  LogicContext(Engine& engine, System& system, ObjectId domain);

  ObjectId domain() const noexcept { return domain_; }
  Tick now() const;
  const AdaptationLogic& logic() const;
  const Policy& policy() const;
  System& system() noexcept { return system_; }
  const System& system() const noexcept { return system_; }

  double param(const std::string& key, double fallback) const;

  // Direct and indirect members of the domain.
  const std::vector<MemberEntry>& scope() const;
  bool in_scope(ObjectId id) const;
  std::optional<PathName> path_of(ObjectId id) const;

  // Queue an escalation of event to the parent domains (runs after the
  // current stage completes).
  void escalate(const AdaptationEvent& event);
  // Drop a source's samples from the proactive window.
  void forget(ObjectId source);
  // Schedule every step of scenario through the actuators.
  void schedule(const Scenario& scenario, const Decision& decision);

 private:
  Engine& engine_;
  System& system_;
  ObjectId domain_;
};

// The five stages of a domain's adaptation logic. analyze and execute are
// mandatory; monitor, audit and regulate default to pass-through.
class LogicBehavior {
 public:
  virtual ~LogicBehavior() = default;

  virtual std::vector<AdaptationEvent> monitor(LogicContext& ctx, std::span<const AdaptationEvent> events);
  virtual std::vector<AuditFinding> audit(LogicContext& ctx);
  virtual std::optional<Decision> analyze(LogicContext& ctx, std::span<const AdaptationEvent> inputs) = 0;
  virtual Scenario regulate(LogicContext& ctx, const Decision& decision);
  virtual void execute(LogicContext& ctx, const Scenario& scenario, const Decision& decision) = 0;

  // Commands enter at analyze, bypassing monitor.
  virtual std::optional<Decision> on_command(LogicContext& ctx, const AdaptationCommand& command);
  // Objects held in stage state, checked by audit for dangling references.
  virtual std::vector<ObjectId> referenced_objects() const { return {}; }
};

class LogicCatalog {
 public:
  using Factory = std::function<std::unique_ptr<LogicBehavior>()>;

  void add(const std::string& name, Factory factory);
  bool contains(const std::string& name) const { return factories_.contains(name); }
  std::unique_ptr<LogicBehavior> create(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, Factory> factories_;
};

struct CommandResult {
  bool handled = false;
  std::optional<PipelineOutcome> outcome;
};

using DeliveryList = std::vector<std::pair<ObjectId, std::optional<Decision>>>;

class Engine {
 public:
  explicit Engine(System& system);
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  LogicCatalog& catalog() noexcept { return catalog_; }

  void load_logic(ObjectId domain, AdaptationLogic logic);
  void unload_logic(ObjectId domain);
  const AdaptationLogic* logic(ObjectId domain) const;
  std::vector<ObjectId> domains_with_logic() const;

  const Policy& policy(ObjectId domain) const;
  void set_policy(ObjectId domain, Policy policy);

  // Root-reachable domains holding source directly or transitively.
  std::vector<ObjectId> routing_targets(ObjectId source) const;
  DeliveryList dispatch_event(const AdaptationEvent& event);
  std::optional<Decision> deliver(ObjectId domain, const AdaptationEvent& event);
  DeliveryList propagate_to_parent(ObjectId domain, AdaptationEvent event);

  // Throws Error{ConsistencyRejected} / Error{PolicySuppressed}.
  std::optional<Scenario> run_pipeline(ObjectId domain, std::span<const AdaptationEvent> inputs);
  PipelineOutcome evaluate(ObjectId domain, std::span<const AdaptationEvent> inputs);
  PipelineOutcome period_boundary(ObjectId domain);
  CommandResult handle_command(const AdaptationCommand& command);

  std::vector<AuditFinding> audit_tick(ObjectId domain, Tick now);

  const std::vector<std::uint64_t>& inbox(ObjectId domain) const;
  const std::vector<Decision>& decisions() const noexcept { return decisions_; }

 private:
  friend class LogicContext;

  struct Binding {
    AdaptationLogic logic;
    std::unique_ptr<LogicBehavior> behavior;
    std::vector<AdaptationEvent> window;  // proactive
    std::vector<AdaptationEvent> batch;   // retroactive
    std::map<std::string, Tick> last_executed;
    std::uint64_t generation = 0;
  };
  struct DomainState {
    std::optional<Binding> binding;
    std::optional<Policy> policy;
    std::vector<std::uint64_t> inbox;
    std::vector<Tick> action_times;
    std::uint64_t scope_version = ~0ull;
    std::vector<MemberEntry> scope;
    std::map<ObjectId, PathName> scope_index;
  };
  struct RoutingCache {
    std::uint64_t version = ~0ull;
    std::map<ObjectId, std::vector<ObjectId>> targets;
  };

  DomainState& state(ObjectId domain);
  const DomainState* find_state(ObjectId domain) const;
  const std::vector<MemberEntry>& scope_of(ObjectId domain);
  PipelineOutcome run_stages(ObjectId domain, std::vector<AdaptationEvent> inputs, bool boundary);
  PipelineOutcome finish(LogicContext& ctx, Decision decision);
  bool check_consistency(ObjectId domain, Decision& decision);
  void schedule_boundary(ObjectId domain, std::uint64_t generation);
  void trace_decision(const Decision& decision, const std::string& logic, PipelineStatus status);

  System& system_;
  LogicCatalog catalog_;
  std::map<ObjectId, DomainState> domains_;
  std::vector<Decision> decisions_;
  std::uint64_t generations_ = 0;
  mutable RoutingCache routing_;
};

// Synthetic event carrying an audit finding, sourced at the finding's subject.
AdaptationEvent finding_event(System& system, const AuditFinding& finding);

}  // namespace adf
