#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adf/config_graph.hpp"
#include "adf/engine.hpp"
#include "adf/system.hpp"

namespace adf {

struct FaultEntry {
  enum class Type { Kill, Revive, Leak, Link };
  Tick at = 0;
  Type type = Type::Kill;
  HostId host;
  HostId other;        // Link only
  double value = 0.0;  // leak rate or link quality

  friend bool operator==(const FaultEntry&, const FaultEntry&) = default;
};

struct MembershipEntry {
  Tick at = 0;
  bool include = true;
  std::string domain_path;
  std::string name;
  ObjectId id;  // include only

  friend bool operator==(const MembershipEntry&, const MembershipEntry&) = default;
};

struct ScriptedTxn {
  Tick at = 0;
  ObjectId owner;
  ReconfigTxn txn;
};

struct DomainDecl {
  std::optional<AdaptationLogic> logic;
  std::optional<Policy> policy;
  std::map<std::string, ObjectId> members;
};

// Everything needed to rebuild a system: structure, bindings, the world and
// its configuration graph, plus the scripted part of a scenario. Loading a
// rendered document and rendering it again yields the same bytes.
struct ConfigDocument {
  ObjectId root;
  std::map<ObjectId, Kind> objects;
  std::map<ObjectId, DomainDecl> domains;
  std::map<ObjectId, Tick> sensors;  // heartbeat
  std::map<ObjectId, HostId> host_bindings;
  std::map<ObjectId, ComponentId> component_bindings;
  std::map<ObjectId, std::pair<HostId, HostId>> link_bindings;
  std::map<HostId, Host> hosts;
  std::map<std::pair<HostId, HostId>, double> links;
  ConfigGraph graph;
  std::map<std::string, std::string> scenario;
  std::vector<FaultEntry> faults;
  std::vector<MembershipEntry> membership;
  std::vector<ScriptedTxn> transactions;
};

// Run parameters carried in the [scenario] section.
struct ScenarioParams {
  std::string name = "unnamed";
  Tick liveness_period = 10;
  Tick sample_period = 10;
  Tick link_period = 10;
  Tick audit_period = 100;
  Tick agent_hop_latency = 1;
  Tick apply_latency = 1;
  Tick traffic_interval = 5;
  Tick traffic_hops = 3;
  double component_load = 1.0;
  bool allow_concurrent = true;
  double critical_level = 0.0;
  Tick liveness_bound = 1000;
  bool exhaustion_kills = true;

  SystemOptions system_options() const;
};

// Throws Error{ParseError} for unknown keys or malformed values.
ScenarioParams scenario_params(const std::map<std::string, std::string>& raw);

// Throws Error{ParseError} (index = line number, message carries the
// column) or Error{UnknownVersion}.
ConfigDocument parse_config(std::string_view text);
std::string render_config(const ConfigDocument& doc);

// Checks that every id, host and component the document mentions is
// declared. Throws Error{DanglingReference}.
void check_references(const ConfigDocument& doc);

// Snapshot of a live system. Throws Error{DirtyRegistry} when orphans exist
// and allow_orphans is false.
ConfigDocument capture(const System& system, bool allow_orphans = false);

// Builds a fresh system from doc (ids preserved). Scripted entries are not
// scheduled here; the simulator does that.
std::unique_ptr<System> instantiate(const ConfigDocument& doc);

// Render and write; throws Error{IoFailure}.
std::string save_config(const System& system, const std::string& destination, bool allow_orphans = false);
ConfigDocument read_config_file(const std::string& source);
// Reads, validates references and instantiates. Returns the new system;
// its root is system->registry().root().
std::unique_ptr<System> load_config(const std::string& source);

}  // namespace adf
