#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace adf {

using ComponentId = std::string;
using HostId = std::string;

enum class ComponentState { Active, Blocked, Down };

std::string_view to_string(ComponentState state) noexcept;
ComponentState component_state_from_string(std::string_view text);

struct Component {
  std::string kind;
  HostId host;
  ComponentState state = ComponentState::Active;

  friend bool operator==(const Component&, const Component&) = default;
};

struct Connection {
  ComponentId from;
  std::string from_port;
  ComponentId to;
  std::string to_port;

  friend auto operator<=>(const Connection&, const Connection&) = default;
};

// The components-and-connections meta-model. Hosts are carried along with
// their up/down status so transactions can be checked against placement.
struct ConfigGraph {
  std::map<HostId, bool> hosts;  // host -> up
  std::map<ComponentId, Component> components;
  std::set<Connection> connections;

  std::vector<ComponentId> in_neighbors(const ComponentId& c) const;
  std::vector<ComponentId> out_neighbors(const ComponentId& c) const;
  std::vector<Connection> incident(const ComponentId& c) const;
  std::multiset<std::string> kind_multiset() const;

  friend bool operator==(const ConfigGraph&, const ConfigGraph&) = default;
};

namespace edit {
struct AddComponent {
  ComponentId id;
  std::string kind;
  HostId host;
};
struct RemoveComponent {
  ComponentId id;
};
struct AddConnection {
  Connection connection;
};
struct RemoveConnection {
  Connection connection;
};
struct MoveComponent {
  ComponentId id;
  HostId host;
};
struct ReplaceComponent {
  ComponentId id;
  std::string kind;
};
}  // namespace edit

using Edit = std::variant<edit::AddComponent, edit::RemoveComponent, edit::AddConnection, edit::RemoveConnection,
                          edit::MoveComponent, edit::ReplaceComponent>;

// Compact single-token rendering, e.g. "move:c1:h2" or "connect:a:out:b:in".
std::string to_string(const Edit& e);
Edit parse_edit(std::string_view text);

using TxnId = std::uint64_t;

struct ReconfigTxn {
  TxnId id = 0;
  std::vector<Edit> edits;
};

// Every component id mentioned by an edit, connection endpoints included.
std::set<ComponentId> named_components(const ReconfigTxn& txn);

std::string render_edits(const ReconfigTxn& txn);  // ';'-joined, "-" when empty
ReconfigTxn parse_edits(std::string_view text);

enum class ViolationCode {
  UnknownComponent,
  DuplicateComponent,
  UnknownConnection,
  DuplicateConnection,
  DanglingConnection,
  DuplicatePortBinding,
  UnknownHost,
  HostDown,
  InvalidToken,
};

std::string_view to_string(ViolationCode code) noexcept;

struct Violation {
  ViolationCode code;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(ViolationCode code) const;
};

// Net effect of a transaction once its edits are folded together.
struct NetDelta {
  std::set<ComponentId> added;
  std::set<ComponentId> removed;
  std::set<ComponentId> moved;
  std::set<ComponentId> replaced;
  std::set<Connection> connections_added;
  std::set<Connection> connections_removed;

  bool empty() const noexcept;
};

using BlockSet = std::set<ComponentId>;

ValidationReport validate(const ConfigGraph& graph, const ReconfigTxn& txn);
NetDelta net_delta(const ConfigGraph& graph, const ReconfigTxn& txn);

// Post-state graph. Added, moved and replaced components come up Active
// when their host is up. Throws Error{InvalidTxn}.
ConfigGraph apply(const ConfigGraph& graph, const ReconfigTxn& txn);

// Components touched by the net delta (including endpoints of changed
// connections) plus the in-neighbours of every removed, replaced or moved
// component. Throws Error{InvalidTxn}.
BlockSet compute_block_set(const ConfigGraph& graph, const ReconfigTxn& txn);

// Sufficient condition for concurrent execution: disjoint block sets.
bool can_run_concurrently(const ReconfigTxn& a, const ReconfigTxn& b, const ConfigGraph& graph);

}  // namespace adf
