#include "adf/config_graph.hpp"

#include <algorithm>
#include <map>

#include "adf/error.hpp"
#include "adf/types.hpp"

namespace adf {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<std::string> split_on(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string connection_str(const Connection& c) { return c.from + "." + c.from_port + "->" + c.to + "." + c.to_port; }

struct Folded {
  ConfigGraph post;
  std::set<ComponentId> replace_flag;
  std::vector<Violation> violations;
};

Folded fold(const ConfigGraph& graph, const ReconfigTxn& txn) {
  Folded f{graph, {}, {}};
  auto& comps = f.post.components;
  auto& conns = f.post.connections;
  std::set<ComponentId> removed_here;
  auto bad = [&](ViolationCode code, std::string detail) { f.violations.push_back({code, std::move(detail)}); };
  auto tokens_ok = [&](std::initializer_list<std::string_view> ts) {
    for (auto t : ts) {
      if (!is_token(t)) {
        bad(ViolationCode::InvalidToken, "'" + std::string(t) + "'");
        return false;
      }
    }
    return true;
  };

  for (const auto& e : txn.edits) {
    std::visit(overloaded{
                   [&](const edit::AddComponent& a) {
                     if (!tokens_ok({a.id, a.kind, a.host})) return;
                     if (comps.contains(a.id)) return bad(ViolationCode::DuplicateComponent, a.id);
                     comps[a.id] = Component{a.kind, a.host, ComponentState::Active};
                     if (removed_here.contains(a.id)) f.replace_flag.insert(a.id);
                   },
                   [&](const edit::RemoveComponent& r) {
                     if (!comps.contains(r.id)) return bad(ViolationCode::UnknownComponent, r.id);
                     comps.erase(r.id);
                     removed_here.insert(r.id);
                     f.replace_flag.erase(r.id);
                   },
                   [&](const edit::AddConnection& a) {
                     const auto& c = a.connection;
                     if (!tokens_ok({c.from, c.from_port, c.to, c.to_port})) return;
                     if (!conns.insert(c).second) bad(ViolationCode::DuplicateConnection, connection_str(c));
                   },
                   [&](const edit::RemoveConnection& r) {
                     if (conns.erase(r.connection) == 0) bad(ViolationCode::UnknownConnection, connection_str(r.connection));
                   },
                   [&](const edit::MoveComponent& m) {
                     if (!tokens_ok({m.host})) return;
                     auto it = comps.find(m.id);
                     if (it == comps.end()) return bad(ViolationCode::UnknownComponent, m.id);
                     it->second.host = m.host;
                   },
                   [&](const edit::ReplaceComponent& r) {
                     if (!tokens_ok({r.kind})) return;
                     auto it = comps.find(r.id);
                     if (it == comps.end()) return bad(ViolationCode::UnknownComponent, r.id);
                     it->second.kind = r.kind;
                     f.replace_flag.insert(r.id);
                   },
               },
               e);
  }
  return f;
}

NetDelta delta_of(const ConfigGraph& pre, const Folded& f) {
  NetDelta d;
  const auto& post = f.post;
  for (const auto& [id, c] : post.components) {
    auto it = pre.components.find(id);
    if (it == pre.components.end()) {
      d.added.insert(id);
      continue;
    }
    if (it->second.host != c.host) d.moved.insert(id);
    if (it->second.kind != c.kind || f.replace_flag.contains(id)) d.replaced.insert(id);
  }
  for (const auto& [id, c] : pre.components) {
    if (!post.components.contains(id)) d.removed.insert(id);
  }
  std::set_difference(post.connections.begin(), post.connections.end(), pre.connections.begin(), pre.connections.end(),
                      std::inserter(d.connections_added, d.connections_added.end()));
  std::set_difference(pre.connections.begin(), pre.connections.end(), post.connections.begin(), post.connections.end(),
                      std::inserter(d.connections_removed, d.connections_removed.end()));
  return d;
}

void check_post_state(const ConfigGraph& post, const NetDelta& d, std::vector<Violation>& out) {
  std::map<std::pair<ComponentId, std::string>, int> ports;
  for (const auto& c : post.connections) {
    if (!post.components.contains(c.from) || !post.components.contains(c.to)) {
      out.push_back({ViolationCode::DanglingConnection, connection_str(c)});
    }
    if (++ports[{c.from, c.from_port}] == 2) {
      out.push_back({ViolationCode::DuplicatePortBinding, c.from + "." + c.from_port});
    }
  }
  auto check_host = [&](const ComponentId& id) {
    const auto& host = post.components.at(id).host;
    auto it = post.hosts.find(host);
    if (it == post.hosts.end()) {
      out.push_back({ViolationCode::UnknownHost, id + "@" + host});
    } else if (!it->second) {
      out.push_back({ViolationCode::HostDown, id + "@" + host});
    }
  };
  for (const auto& id : d.added) check_host(id);
  for (const auto& id : d.moved) check_host(id);
  for (const auto& id : d.replaced) {
    if (!d.moved.contains(id)) check_host(id);
  }
}

void require_valid(const ValidationReport& r) {
  if (r.ok()) return;
  std::string msg;
  for (const auto& v : r.violations) {
    if (!msg.empty()) msg += ", ";
    msg += std::string(to_string(v.code)) + "(" + v.detail + ")";
  }
  throw Error(Errc::InvalidTxn, msg);
}

}  // namespace

std::string_view to_string(ComponentState state) noexcept {
  switch (state) {
    case ComponentState::Active: return "active";
    case ComponentState::Blocked: return "blocked";
    case ComponentState::Down: return "down";
  }
  return "active";
}

ComponentState component_state_from_string(std::string_view text) {
  if (text == "active") return ComponentState::Active;
  if (text == "blocked") return ComponentState::Blocked;
  if (text == "down") return ComponentState::Down;
  throw Error(Errc::ParseError, "unknown component state '" + std::string(text) + "'");
}

std::string_view to_string(ViolationCode code) noexcept {
  switch (code) {
    case ViolationCode::UnknownComponent: return "UnknownComponent";
    case ViolationCode::DuplicateComponent: return "DuplicateComponent";
    case ViolationCode::UnknownConnection: return "UnknownConnection";
    case ViolationCode::DuplicateConnection: return "DuplicateConnection";
    case ViolationCode::DanglingConnection: return "DanglingConnection";
    case ViolationCode::DuplicatePortBinding: return "DuplicatePortBinding";
    case ViolationCode::UnknownHost: return "UnknownHost";
    case ViolationCode::HostDown: return "HostDown";
    case ViolationCode::InvalidToken: return "InvalidToken";
  }
  return "Unknown";
}

std::vector<ComponentId> ConfigGraph::in_neighbors(const ComponentId& c) const {
  std::set<ComponentId> out;
  for (const auto& e : connections) {
    if (e.to == c) out.insert(e.from);
  }
  return {out.begin(), out.end()};
}

std::vector<ComponentId> ConfigGraph::out_neighbors(const ComponentId& c) const {
  std::set<ComponentId> out;
  for (const auto& e : connections) {
    if (e.from == c) out.insert(e.to);
  }
  return {out.begin(), out.end()};
}

std::vector<Connection> ConfigGraph::incident(const ComponentId& c) const {
  std::vector<Connection> out;
  for (const auto& e : connections) {
    if (e.from == c || e.to == c) out.push_back(e);
  }
  return out;
}

std::multiset<std::string> ConfigGraph::kind_multiset() const {
  std::multiset<std::string> out;
  for (const auto& [id, c] : components) out.insert(c.kind);
  return out;
}

std::string to_string(const Edit& e) {
  return std::visit(overloaded{
                        [](const edit::AddComponent& a) { return "add:" + a.id + ":" + a.kind + ":" + a.host; },
                        [](const edit::RemoveComponent& r) { return "remove:" + r.id; },
                        [](const edit::AddConnection& a) {
                          const auto& c = a.connection;
                          return "connect:" + c.from + ":" + c.from_port + ":" + c.to + ":" + c.to_port;
                        },
                        [](const edit::RemoveConnection& r) {
                          const auto& c = r.connection;
                          return "disconnect:" + c.from + ":" + c.from_port + ":" + c.to + ":" + c.to_port;
                        },
                        [](const edit::MoveComponent& m) { return "move:" + m.id + ":" + m.host; },
                        [](const edit::ReplaceComponent& r) { return "replace:" + r.id + ":" + r.kind; },
                    },
                    e);
}

Edit parse_edit(std::string_view text) {
  auto f = split_on(text, ':');
  auto need = [&](std::size_t n) {
    if (f.size() != n) throw Error(Errc::ParseError, "malformed edit '" + std::string(text) + "'");
    for (const auto& part : f) {
      if (!is_token(part)) throw Error(Errc::ParseError, "malformed edit '" + std::string(text) + "'");
    }
  };
  const std::string& op = f.front();
  if (op == "add") {
    need(4);
    return edit::AddComponent{f[1], f[2], f[3]};
  }
  if (op == "remove") {
    need(2);
    return edit::RemoveComponent{f[1]};
  }
  if (op == "connect") {
    need(5);
    return edit::AddConnection{{f[1], f[2], f[3], f[4]}};
  }
  if (op == "disconnect") {
    need(5);
    return edit::RemoveConnection{{f[1], f[2], f[3], f[4]}};
  }
  if (op == "move") {
    need(3);
    return edit::MoveComponent{f[1], f[2]};
  }
  if (op == "replace") {
    need(3);
    return edit::ReplaceComponent{f[1], f[2]};
  }
  throw Error(Errc::ParseError, "unknown edit '" + std::string(text) + "'");
}

std::set<ComponentId> named_components(const ReconfigTxn& txn) {
  std::set<ComponentId> out;
  for (const auto& e : txn.edits) {
    std::visit(overloaded{
                   [&](const edit::AddComponent& a) { out.insert(a.id); },
                   [&](const edit::RemoveComponent& r) { out.insert(r.id); },
                   [&](const edit::AddConnection& a) {
                     out.insert(a.connection.from);
                     out.insert(a.connection.to);
                   },
                   [&](const edit::RemoveConnection& r) {
                     out.insert(r.connection.from);
                     out.insert(r.connection.to);
                   },
                   [&](const edit::MoveComponent& m) { out.insert(m.id); },
                   [&](const edit::ReplaceComponent& r) { out.insert(r.id); },
               },
               e);
  }
  return out;
}

std::string render_edits(const ReconfigTxn& txn) {
  if (txn.edits.empty()) return "-";
  std::string out;
  for (const auto& e : txn.edits) {
    if (!out.empty()) out += ';';
    out += to_string(e);
  }
  return out;
}

ReconfigTxn parse_edits(std::string_view text) {
  ReconfigTxn txn;
  if (text == "-") return txn;
  for (const auto& part : split_on(text, ';')) txn.edits.push_back(parse_edit(part));
  return txn;
}

bool ValidationReport::has(ViolationCode code) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.code == code; });
}

bool NetDelta::empty() const noexcept {
  return added.empty() && removed.empty() && moved.empty() && replaced.empty() && connections_added.empty() &&
         connections_removed.empty();
}

ValidationReport validate(const ConfigGraph& graph, const ReconfigTxn& txn) {
  Folded f = fold(graph, txn);
  ValidationReport report{std::move(f.violations)};
  check_post_state(f.post, delta_of(graph, f), report.violations);
  return report;
}

NetDelta net_delta(const ConfigGraph& graph, const ReconfigTxn& txn) { return delta_of(graph, fold(graph, txn)); }

ConfigGraph apply(const ConfigGraph& graph, const ReconfigTxn& txn) {
  Folded f = fold(graph, txn);
  ValidationReport report{f.violations};
  NetDelta d = delta_of(graph, f);
  check_post_state(f.post, d, report.violations);
  require_valid(report);

  ConfigGraph out = std::move(f.post);
  auto restart = [&](const ComponentId& id) {
    auto& c = out.components.at(id);
    c.state = out.hosts.at(c.host) ? ComponentState::Active : ComponentState::Down;
  };
  for (const auto& id : d.added) restart(id);
  for (const auto& id : d.moved) restart(id);
  for (const auto& id : d.replaced) restart(id);
  return out;
}

BlockSet compute_block_set(const ConfigGraph& graph, const ReconfigTxn& txn) {
  Folded f = fold(graph, txn);
  ValidationReport report{f.violations};
  NetDelta d = delta_of(graph, f);
  check_post_state(f.post, d, report.violations);
  require_valid(report);

  BlockSet out;
  out.insert(d.added.begin(), d.added.end());
  out.insert(d.removed.begin(), d.removed.end());
  out.insert(d.moved.begin(), d.moved.end());
  out.insert(d.replaced.begin(), d.replaced.end());
  for (const auto* set : {&d.connections_added, &d.connections_removed}) {
    for (const auto& c : *set) {
      out.insert(c.from);
      out.insert(c.to);
    }
  }
  for (const auto* set : {&d.removed, &d.moved, &d.replaced}) {
    for (const auto& id : *set) {
      for (auto& n : graph.in_neighbors(id)) out.insert(std::move(n));
    }
  }
  return out;
}

bool can_run_concurrently(const ReconfigTxn& a, const ReconfigTxn& b, const ConfigGraph& graph) {
  BlockSet sa = compute_block_set(graph, a);
  BlockSet sb = compute_block_set(graph, b);
  return std::none_of(sa.begin(), sa.end(), [&](const ComponentId& c) { return sb.contains(c); });
}

}  // namespace adf
