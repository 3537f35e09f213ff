#include "adf/report.hpp"

#include <algorithm>
#include <sstream>

#include "adf/error.hpp"

namespace adf {

namespace {

constexpr std::string_view kReportHeader = "adf-report 1";

[[noreturn]] void fail(std::size_t line, const std::string& message) {
  throw Error(Errc::ParseError, "line " + std::to_string(line) + ": " + message, line);
}

std::vector<std::string> words(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

void parse_graph_line(ConfigGraph& g, std::string_view line, std::size_t number) {
  auto w = words(line);
  try {
    if (w.size() == 3 && w[0] == "host" && (w[2] == "up" || w[2] == "down")) {
      g.hosts[w[1]] = w[2] == "up";
    } else if (w.size() == 5 && w[0] == "component") {
      g.components[w[1]] = Component{w[2], w[3], component_state_from_string(w[4])};
    } else if (w.size() == 5 && w[0] == "connection") {
      g.connections.insert(Connection{w[1], w[2], w[3], w[4]});
    } else {
      fail(number, "malformed graph line");
    }
  } catch (const Error& e) {
    if (e.index()) throw;
    fail(number, e.what());
  }
}

}  // namespace

std::vector<std::string> render_graph_lines(const ConfigGraph& graph) {
  std::vector<std::string> out;
  for (const auto& [id, up] : graph.hosts) out.push_back("host " + id + (up ? " up" : " down"));
  for (const auto& [id, c] : graph.components) {
    out.push_back("component " + id + " " + c.kind + " " + c.host + " " + std::string(to_string(c.state)));
  }
  for (const auto& c : graph.connections) {
    out.push_back("connection " + c.from + " " + c.from_port + " " + c.to + " " + c.to_port);
  }
  return out;
}

std::string render_report(const RunReport& report) {
  std::string out(kReportHeader);
  out += "\n[meta]\n";
  for (const auto& [k, v] : report.meta) out += k + " " + v + "\n";
  out += "[initial-graph]\n";
  for (const auto& l : render_graph_lines(report.initial_graph)) out += l + "\n";
  out += "[trace]\n";
  std::uint64_t h = 0;
  for (const auto& e : report.trace) {
    std::string line = e.render();
    h = chain_hash(h, line);
    out += line + " #" + hex64(h) + "\n";
  }
  out += "[graph]\n";
  for (const auto& l : render_graph_lines(report.final_graph)) out += l + "\n";
  out += "[metrics]\n";
  for (const auto& [k, v] : report.metrics) out += k + " " + format_scalar(v) + "\n";
  return out;
}

ParsedReport parse_report(std::string_view text) {
  ParsedReport r;
  static const std::vector<std::string> order{"[meta]", "[initial-graph]", "[trace]", "[graph]", "[metrics]"};
  std::size_t section = 0;  // index into order, 0 = before [meta]
  std::size_t number = 0;
  std::size_t pos = 0;
  bool header = false;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) fail(number + 1, "missing final newline");
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++number;
    if (!header) {
      if (line.starts_with("adf-report ") && line != kReportHeader) {
        throw Error(Errc::UnknownVersion, "report version '" + std::string(line.substr(11)) + "' is not supported", number);
      }
      if (line != kReportHeader) fail(number, "expected '" + std::string(kReportHeader) + "'");
      header = true;
      continue;
    }
    if (!line.empty() && line.front() == '[') {
      auto it = std::find(order.begin(), order.end(), std::string(line));
      if (it == order.end()) fail(number, "unknown section " + std::string(line));
      std::size_t idx = static_cast<std::size_t>(it - order.begin()) + 1;
      if (idx != section + 1) fail(number, "section " + std::string(line) + " out of order");
      section = idx;
      continue;
    }
    switch (section) {
      case 0: fail(number, "entry before [meta]");
      case 1: {
        auto w = words(line);
        if (w.size() != 2) fail(number, "meta lines are '<key> <value>'");
        r.meta[w[0]] = w[1];
        break;
      }
      case 2: parse_graph_line(r.initial_graph, line, number); break;
      case 3: {
        TraceLine t;
        t.line_number = number;
        auto hash = line.rfind(" #");
        if (hash == std::string_view::npos) {
          t.text = std::string(line);
        } else {
          t.text = std::string(line.substr(0, hash));
          t.hash = std::string(line.substr(hash + 2));
        }
        r.trace.push_back(std::move(t));
        break;
      }
      case 4: parse_graph_line(r.final_graph, line, number); break;
      case 5: {
        auto w = words(line);
        if (w.size() != 2) fail(number, "metric lines are '<key> <value>'");
        try {
          r.metrics[w[0]] = parse_scalar(w[1]);
        } catch (const Error&) {
          fail(number, "bad metric value");
        }
        break;
      }
      default: break;
    }
  }
  if (!header) fail(1, "empty report");
  if (section != order.size()) fail(number, "report truncated, missing " + order[section]);
  return r;
}

// ---------------------------------------------------------------------------

GraphTracker::GraphTracker(ConfigGraph initial) : graph_(std::move(initial)) {}

std::size_t GraphTracker::down_count() const {
  return static_cast<std::size_t>(std::count_if(graph_.components.begin(), graph_.components.end(),
                                                [](const auto& kv) { return kv.second.state == ComponentState::Down; }));
}

void GraphTracker::advance(Tick t) {
  if (t > last_) {
    downtime_ += static_cast<double>(down_count()) * static_cast<double>(t - last_);
    last_ = t;
  }
}

std::optional<ReconfigTxn> GraphTracker::submitted(TxnId id) const {
  auto it = submitted_.find(id);
  if (it == submitted_.end()) return std::nullopt;
  return it->second;
}

const std::string& GraphTracker::origin(TxnId id) const {
  static const std::string none;
  auto it = origins_.find(id);
  return it == origins_.end() ? none : it->second;
}

void GraphTracker::unblock(TxnId id) {
  const auto& prior = prior_[id];
  for (const auto& c : running_sets_[id]) {
    auto it = graph_.components.find(c);
    if (it == graph_.components.end() || it->second.state != ComponentState::Blocked) continue;
    auto p = prior.find(c);
    it->second.state = p == prior.end() || p->second == ComponentState::Blocked ? ComponentState::Active : p->second;
  }
  running_sets_.erase(id);
  prior_.erase(id);
}

std::optional<std::string> GraphTracker::apply(const TraceEntry& e) {
  advance(e.time);
  auto field = [&](const char* key) -> std::string {
    const std::string* v = e.get(key);
    return v == nullptr ? std::string() : *v;
  };
  auto txn_id = [&]() -> std::optional<TxnId> {
    try {
      return static_cast<TxnId>(std::stoull(field("txn")));
    } catch (...) {
      return std::nullopt;
    }
  };

  if (e.kind == "submit") {
    auto id = txn_id();
    if (!id) return "submit without txn id";
    try {
      ReconfigTxn txn = parse_edits(field("edits"));
      txn.id = *id;
      submitted_[*id] = std::move(txn);
      origins_[*id] = field("origin");
    } catch (const Error& err) {
      return std::string("unparseable edits: ") + err.what();
    }
  } else if (e.kind == "block") {
    auto id = txn_id();
    if (!id || !submitted_.contains(*id)) return "block of unknown transaction";
    BlockSet set;
    for (auto& c : split_list(field("set"))) set.insert(std::move(c));
    for (const auto& [other, other_set] : running_sets_) {
      for (const auto& c : set) {
        if (other_set.contains(c)) {
          return "transactions " + std::to_string(other) + " and " + std::to_string(*id) + " run concurrently on " + c;
        }
      }
    }
    auto& prior = prior_[*id];
    for (const auto& c : set) {
      auto it = graph_.components.find(c);
      if (it == graph_.components.end()) continue;
      prior[c] = it->second.state;
      if (it->second.state == ComponentState::Active) it->second.state = ComponentState::Blocked;
    }
    running_sets_[*id] = std::move(set);
  } else if (e.kind == "commit") {
    auto id = txn_id();
    if (!id || !running_sets_.contains(*id)) return "commit of a transaction that is not running";
    for (const auto& c : running_sets_[*id]) {
      if (occupancy_.contains(c)) return "commit while application traffic occupies " + c;
    }
    try {
      graph_ = adf::apply(graph_, submitted_.at(*id));
    } catch (const Error& err) {
      return std::string("committed transaction does not apply: ") + err.what();
    }
    unblock(*id);
  } else if (e.kind == "abort") {
    auto id = txn_id();
    if (!id || !submitted_.contains(*id)) return "abort of unknown transaction";
    if (running_sets_.contains(*id)) unblock(*id);
  } else if (e.kind == "host") {
    HostId host = field("host");
    auto h = graph_.hosts.find(host);
    if (h == graph_.hosts.end()) return "status change of unknown host " + host;
    bool up = field("up") == "1";
    h->second = up;
    for (auto& [id, c] : graph_.components) {
      if (c.host != host) continue;
      if (!up) {
        c.state = ComponentState::Down;
      } else if (c.state == ComponentState::Down) {
        bool blocked = false;
        for (auto& [tid, set] : running_sets_) {
          if (set.contains(id)) {
            blocked = true;
            prior_[tid][id] = ComponentState::Active;
          }
        }
        c.state = blocked ? ComponentState::Blocked : ComponentState::Active;
      }
    }
  } else if (e.kind == "hop") {
    ComponentId to = field("to");
    auto it = graph_.components.find(to);
    if (it == graph_.components.end()) return "application hop into unknown component " + to;
    if (it->second.state != ComponentState::Active) {
      return "application hop into " + std::string(to_string(it->second.state)) + " component " + to;
    }
    ++occupancy_[to];
  } else if (e.kind == "leave") {
    ComponentId c = field("component");
    auto it = occupancy_.find(c);
    if (it == occupancy_.end()) return "leave without matching hop on " + c;
    if (--it->second == 0) occupancy_.erase(it);
  }
  return std::nullopt;
}

}  // namespace adf
