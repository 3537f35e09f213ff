#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "adf/config_io.hpp"
#include "adf/report.hpp"
#include "adf/system.hpp"

namespace adf {

// Consistent view of the simulated world between clock events.
struct SystemState {
  Tick now = 0;
  std::map<HostId, Host> hosts;
  ConfigGraph graph;
  std::vector<std::string> tree;
  std::vector<std::string> pending;

  friend bool operator==(const SystemState&, const SystemState&) = default;
};

// Drives a system built from a scenario document: built-in liveness,
// resource and link samplers, seeded application traffic, the scripted
// faults / membership changes / transactions, and periodic audits.
class Simulator {
 public:
  // Throws whatever instantiate() throws.
  Simulator(const ConfigDocument& doc, std::uint64_t seed);

  System& system() noexcept { return *system_; }
  const System& system() const noexcept { return *system_; }
  const ScenarioParams& params() const noexcept { return params_; }

  // Schedules a fault at max(fault.at, now). Throws Error{UnknownHost}.
  void inject(const FaultEntry& fault);

  SystemState snapshot() const;

  // Runs the clock to `until` and returns the report. Call once.
  RunReport run(Tick until);

 private:
  // Storage for self-rescheduling closures; owned here so the clock only
  // holds plain pointers to them.
  std::function<void()>* loop();
  void schedule_samplers();
  void schedule_traffic(Tick at);
  void hop(std::uint64_t app, ComponentId to, std::string from, Tick hops_left, Tick waited);
  void schedule_audit(Tick at);
  void apply_fault(const FaultEntry& fault);
  void apply_membership(const MembershipEntry& entry);

  std::unique_ptr<System> system_;
  ScenarioParams params_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  ConfigGraph initial_graph_;
  std::uint64_t next_app_ = 1;
  bool ran_ = false;
  std::vector<std::unique_ptr<std::function<void()>>> loops_;
};

// Deterministic indented rendering of the domain hierarchy with each
// domain's logic.
std::vector<std::string> render_tree(const System& system);

// Healing scenario at scale: `objects` managed objects in total spread over
// `hosts` hosts, with a handful of host failures.
ConfigDocument scale_document(std::size_t objects, std::size_t hosts);

}  // namespace adf
