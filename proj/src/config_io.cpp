#include "adf/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "adf/error.hpp"

namespace adf {

namespace {

constexpr std::string_view kHeader = "adf-config";
constexpr int kVersion = 1;

std::string id_str(ObjectId id) { return std::to_string(id.value); }

std::string owner_str(ObjectId id) { return id.valid() ? id_str(id) : "-"; }

// --- rendering helpers

std::string strategy_str(const Strategy& s) {
  switch (s.kind) {
    case StrategyKind::Reactive: return "reactive";
    case StrategyKind::Proactive:
      return "proactive window=" + std::to_string(s.window) + " critical=" + format_scalar(s.critical) +
             " margin=" + std::to_string(s.margin);
    case StrategyKind::Retroactive: return "retroactive period=" + std::to_string(s.period);
  }
  return "reactive";
}

std::string fault_str(const FaultEntry& f) {
  std::string out = std::to_string(f.at) + " ";
  switch (f.type) {
    case FaultEntry::Type::Kill: return out + "kill " + f.host;
    case FaultEntry::Type::Revive: return out + "revive " + f.host;
    case FaultEntry::Type::Leak: return out + "leak " + f.host + " " + format_scalar(f.value);
    case FaultEntry::Type::Link: return out + "link " + f.host + " " + f.other + " " + format_scalar(f.value);
  }
  return out;
}

// Domain paths for the informational section headers: breadth-first from the
// root, members visited in name order, first discovery wins.
std::map<ObjectId, std::string> first_paths(const ConfigDocument& doc) {
  std::map<ObjectId, std::string> out;
  if (!doc.root.valid()) return out;
  out[doc.root] = "/";
  std::deque<std::pair<ObjectId, PathName>> queue{{doc.root, PathName{}}};
  while (!queue.empty()) {
    auto [id, path] = queue.front();
    queue.pop_front();
    auto d = doc.domains.find(id);
    if (d == doc.domains.end()) continue;
    for (const auto& [name, member] : d->second.members) {
      auto kind = doc.objects.find(member);
      if (kind == doc.objects.end() || kind->second != Kind::Domain || out.contains(member)) continue;
      PathName p = path.child(name);
      out[member] = p.str();
      queue.emplace_back(member, p);
    }
  }
  return out;
}

// --- parsing helpers

struct Token {
  std::string text;
  std::size_t column;  // 1-based
};

struct Line {
  std::size_t number;
  std::vector<Token> tokens;
  std::size_t end_column;
};

[[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& message) {
  throw Error(Errc::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message,
              line);
}

Line tokenize(std::string_view text, std::size_t number) {
  Line line{number, {}, text.size() + 1};
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == ' ' || text[i] == '\t' || text[i] == '\r') {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t' && text[i] != '\r') ++i;
    line.tokens.push_back({std::string(text.substr(start, i - start)), start + 1});
  }
  return line;
}

class Reader {
 public:
  explicit Reader(const Line& line) : line_(line) {}

  const Token& next(const char* what) {
    if (pos_ >= line_.tokens.size()) fail(line_.number, line_.end_column, std::string("expected ") + what);
    return line_.tokens[pos_++];
  }
  std::string token(const char* what) {
    const Token& t = next(what);
    if (!is_token(t.text)) fail(line_.number, t.column, std::string("invalid ") + what + " '" + t.text + "'");
    return t.text;
  }
  std::string word(const char* what) { return next(what).text; }
  double scalar(const char* what) {
    const Token& t = next(what);
    try {
      return parse_scalar(t.text);
    } catch (const Error&) {
      fail(line_.number, t.column, std::string("invalid ") + what + " '" + t.text + "'");
    }
  }
  std::int64_t integer(const char* what, std::int64_t min = 0) {
    const Token& t = next(what);
    std::int64_t v = 0;
    auto [end, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || end != t.text.data() + t.text.size() || v < min) {
      fail(line_.number, t.column, std::string("invalid ") + what + " '" + t.text + "'");
    }
    return v;
  }
  ObjectId id(const char* what) { return ObjectId{static_cast<std::uint64_t>(integer(what, 1))}; }
  ObjectId optional_id(const char* what) {
    const Token& t = line_.tokens.size() > pos_ ? line_.tokens[pos_] : next(what);
    if (t.text == "-") {
      ++pos_;
      return {};
    }
    return id(what);
  }
  bool flag(const char* what) {
    const Token& t = next(what);
    if (t.text == "0") return false;
    if (t.text == "1") return true;
    fail(line_.number, t.column, std::string(what) + " must be 0 or 1");
  }
  bool more() const { return pos_ < line_.tokens.size(); }
  void end() {
    if (more()) fail(line_.number, line_.tokens[pos_].column, "unexpected '" + line_.tokens[pos_].text + "'");
  }
  std::size_t column() const { return pos_ < line_.tokens.size() ? line_.tokens[pos_].column : line_.end_column; }
  std::size_t number() const { return line_.number; }

 private:
  const Line& line_;
  std::size_t pos_ = 0;
};

enum class Section { None, Objects, Domain, Sensors, Bindings, Hosts, Graph, Scenario, Faults, Membership, Transactions };

Section section_of(std::string_view name) {
  if (name == "objects") return Section::Objects;
  if (name == "domain") return Section::Domain;
  if (name == "sensors") return Section::Sensors;
  if (name == "bindings") return Section::Bindings;
  if (name == "hosts") return Section::Hosts;
  if (name == "graph") return Section::Graph;
  if (name == "scenario") return Section::Scenario;
  if (name == "faults") return Section::Faults;
  if (name == "membership") return Section::Membership;
  if (name == "transactions") return Section::Transactions;
  return Section::None;
}

std::pair<HostId, HostId> ordered(HostId a, HostId b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

void parse_strategy_option(Reader& r, Strategy& s) {
  std::size_t col = r.column();
  std::string opt = r.word("strategy option");
  auto eq = opt.find('=');
  if (eq == std::string::npos) fail(r.number(), col, "expected key=value, got '" + opt + "'");
  std::string key = opt.substr(0, eq);
  std::string value = opt.substr(eq + 1);
  try {
    if (key == "window" && s.kind == StrategyKind::Proactive) {
      s.window = static_cast<Tick>(parse_scalar(value));
    } else if (key == "critical" && s.kind == StrategyKind::Proactive) {
      s.critical = parse_scalar(value);
    } else if (key == "margin" && s.kind == StrategyKind::Proactive) {
      s.margin = static_cast<Tick>(parse_scalar(value));
    } else if (key == "period" && s.kind == StrategyKind::Retroactive) {
      s.period = static_cast<Tick>(parse_scalar(value));
    } else {
      fail(r.number(), col, "option '" + key + "' does not apply to this strategy");
    }
  } catch (const Error& e) {
    if (e.code() == Errc::ParseError && e.index()) throw;
    fail(r.number(), col, "invalid value in '" + opt + "'");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

SystemOptions ScenarioParams::system_options() const {
  SystemOptions o;
  o.config.apply_latency = apply_latency;
  o.config.allow_concurrent = allow_concurrent;
  o.agent_hop_latency = agent_hop_latency;
  o.component_load = component_load;
  o.critical_level = critical_level;
  o.exhaustion_kills = exhaustion_kills;
  return o;
}

ScenarioParams scenario_params(const std::map<std::string, std::string>& raw) {
  ScenarioParams p;
  for (const auto& [key, value] : raw) {
    auto tick = [&](Tick& out, Tick min) {
      double v = parse_scalar(value);
      if (v != static_cast<double>(static_cast<Tick>(v)) || v < static_cast<double>(min)) {
        throw Error(Errc::ParseError, "scenario key '" + key + "' needs an integer >= " + std::to_string(min));
      }
      out = static_cast<Tick>(v);
    };
    auto boolean = [&](bool& out) {
      if (value != "0" && value != "1") throw Error(Errc::ParseError, "scenario key '" + key + "' must be 0 or 1");
      out = value == "1";
    };
    if (key == "name") {
      if (!is_token(value)) throw Error(Errc::ParseError, "scenario name must be a token");
      p.name = value;
    } else if (key == "liveness_period") {
      tick(p.liveness_period, 1);
    } else if (key == "sample_period") {
      tick(p.sample_period, 1);
    } else if (key == "link_period") {
      tick(p.link_period, 1);
    } else if (key == "audit_period") {
      tick(p.audit_period, 0);
    } else if (key == "agent_hop_latency") {
      tick(p.agent_hop_latency, 0);
    } else if (key == "apply_latency") {
      tick(p.apply_latency, 0);
    } else if (key == "traffic_interval") {
      tick(p.traffic_interval, 0);
    } else if (key == "traffic_hops") {
      tick(p.traffic_hops, 0);
    } else if (key == "component_load") {
      p.component_load = parse_scalar(value);
    } else if (key == "allow_concurrent") {
      boolean(p.allow_concurrent);
    } else if (key == "critical_level") {
      p.critical_level = parse_scalar(value);
    } else if (key == "liveness_bound") {
      tick(p.liveness_bound, 1);
    } else if (key == "exhaustion_kills") {
      boolean(p.exhaustion_kills);
    } else {
      throw Error(Errc::ParseError, "unknown scenario key '" + key + "'");
    }
  }
  return p;
}

// ---------------------------------------------------------------------------

std::string render_config(const ConfigDocument& doc) {
  std::ostringstream out;
  out << kHeader << ' ' << kVersion << '\n';
  out << "[objects]\n";
  if (doc.root.valid()) out << "root " << id_str(doc.root) << '\n';
  for (const auto& [id, kind] : doc.objects) out << "object " << id_str(id) << ' ' << to_string(kind) << '\n';

  auto paths = first_paths(doc);
  for (const auto& [id, d] : doc.domains) {
    auto p = paths.find(id);
    out << "[domain " << id_str(id) << ' ' << (p == paths.end() ? "-" : p->second) << "]\n";
    if (d.logic) {
      out << "logic " << d.logic->name << ' ' << strategy_str(d.logic->strategy) << '\n';
      for (const auto& [k, v] : d.logic->params) out << "param " << k << ' ' << format_scalar(v) << '\n';
    }
    if (d.policy) {
      out << "policy " << to_string(d.policy->source) << ' ' << (d.policy->enabled ? 1 : 0) << '\n';
      for (const auto& [k, v] : d.policy->directives) out << "directive " << k << ' ' << format_scalar(v) << '\n';
    }
    for (const auto& [name, member] : d.members) out << "member " << name << ' ' << id_str(member) << '\n';
  }

  if (!doc.sensors.empty()) {
    out << "[sensors]\n";
    for (const auto& [id, hb] : doc.sensors) out << "sensor " << id_str(id) << ' ' << hb << '\n';
  }
  if (!doc.host_bindings.empty() || !doc.component_bindings.empty() || !doc.link_bindings.empty()) {
    out << "[bindings]\n";
    for (const auto& [id, h] : doc.host_bindings) out << "host " << id_str(id) << ' ' << h << '\n';
    for (const auto& [id, c] : doc.component_bindings) out << "component " << id_str(id) << ' ' << c << '\n';
    for (const auto& [id, l] : doc.link_bindings) out << "link " << id_str(id) << ' ' << l.first << ' ' << l.second << '\n';
  }
  if (!doc.hosts.empty() || !doc.links.empty()) {
    out << "[hosts]\n";
    for (const auto& [id, h] : doc.hosts) {
      out << "host " << id << ' ' << format_scalar(h.capacity) << ' ' << format_scalar(h.level) << ' '
          << format_scalar(h.leak) << ' ' << (h.up ? "up" : "down") << '\n';
    }
    for (const auto& [key, q] : doc.links) out << "link " << key.first << ' ' << key.second << ' ' << format_scalar(q) << '\n';
  }
  if (!doc.graph.components.empty() || !doc.graph.connections.empty()) {
    out << "[graph]\n";
    for (const auto& [id, c] : doc.graph.components) {
      out << "component " << id << ' ' << c.kind << ' ' << c.host << ' ' << to_string(c.state) << '\n';
    }
    for (const auto& c : doc.graph.connections) {
      out << "connection " << c.from << ' ' << c.from_port << ' ' << c.to << ' ' << c.to_port << '\n';
    }
  }
  if (!doc.scenario.empty()) {
    out << "[scenario]\n";
    for (const auto& [k, v] : doc.scenario) out << k << ' ' << v << '\n';
  }
  if (!doc.faults.empty()) {
    out << "[faults]\n";
    for (const auto& f : doc.faults) out << fault_str(f) << '\n';
  }
  if (!doc.membership.empty()) {
    out << "[membership]\n";
    for (const auto& m : doc.membership) {
      out << m.at << (m.include ? " include " : " exclude ") << m.domain_path << ' ' << m.name;
      if (m.include) out << ' ' << id_str(m.id);
      out << '\n';
    }
  }
  if (!doc.transactions.empty()) {
    out << "[transactions]\n";
    for (const auto& t : doc.transactions) {
      out << "txn " << t.at << ' ' << owner_str(t.owner) << ' ' << render_edits(t.txn) << '\n';
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------

ConfigDocument parse_config(std::string_view text) {
  ConfigDocument doc;
  Section section = Section::None;
  std::set<Section> seen;
  DomainDecl* domain = nullptr;
  bool header = false;
  Tick last_fault = 0;
  Tick last_membership = 0;
  Tick last_txn = 0;

  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++number;
    Line line = tokenize(raw, number);
    if (line.tokens.empty() || line.tokens.front().text.front() == '#') continue;
    Reader r(line);

    if (!header) {
      const Token& t = r.next("header");
      if (t.text != kHeader) fail(number, t.column, "expected '" + std::string(kHeader) + "' header");
      const Token& v = r.next("format version");
      if (v.text != std::to_string(kVersion)) {
        throw Error(Errc::UnknownVersion, "config format version '" + v.text + "' is not supported", number);
      }
      r.end();
      header = true;
      continue;
    }

    const std::string& first = line.tokens.front().text;
    if (first.front() == '[') {
      std::string inner(raw.substr(raw.find('[') + 1));
      auto close = inner.rfind(']');
      if (close == std::string::npos) fail(number, line.end_column, "expected ']'");
      Line head = tokenize(std::string_view(inner).substr(0, close), number);
      for (auto& t : head.tokens) t.column += line.tokens.front().column;
      Reader hr(head);
      const Token& name = hr.next("section name");
      Section next = section_of(name.text);
      if (next == Section::None) fail(number, name.column, "unknown section '" + name.text + "'");
      if (next < section || (next != Section::Domain && seen.contains(next))) {
        fail(number, name.column, "section '" + name.text + "' out of order");
      }
      section = next;
      seen.insert(next);
      domain = nullptr;
      if (next == Section::Domain) {
        ObjectId id = hr.id("domain id");
        const Token& path = hr.next("domain path");
        if (path.text != "-") {
          try {
            PathName::parse(path.text);
          } catch (const Error&) {
            fail(number, path.column, "invalid path '" + path.text + "'");
          }
        }
        hr.end();
        if (doc.domains.contains(id)) fail(number, line.tokens.front().column, "domain " + id_str(id) + " declared twice");
        domain = &doc.domains[id];
      } else {
        hr.end();
      }
      if (close + 1 < inner.size() && inner.find_first_not_of(" \t\r", close + 1) != std::string::npos) {
        fail(number, line.end_column, "trailing text after section header");
      }
      continue;
    }

    switch (section) {
      case Section::None: fail(number, line.tokens.front().column, "entry outside any section");
      case Section::Objects: {
        std::string kw = r.word("keyword");
        if (kw == "root") {
          if (doc.root.valid()) fail(number, 1, "root declared twice");
          doc.root = r.id("root id");
        } else if (kw == "object") {
          ObjectId id = r.id("object id");
          std::size_t col = r.column();
          std::string k = r.word("kind");
          Kind kind;
          try {
            kind = kind_from_string(k);
          } catch (const Error&) {
            fail(number, col, "unknown kind '" + k + "'");
          }
          if (!doc.objects.emplace(id, kind).second) fail(number, line.tokens[1].column, "object " + id_str(id) + " declared twice");
        } else {
          fail(number, line.tokens.front().column, "unknown entry '" + kw + "'");
        }
        r.end();
        break;
      }
      case Section::Domain: {
        std::string kw = r.word("keyword");
        if (kw == "logic") {
          if (domain->logic) fail(number, 1, "logic declared twice");
          AdaptationLogic logic;
          logic.name = r.token("logic name");
          std::size_t col = r.column();
          std::string s = r.word("strategy");
          try {
            logic.strategy.kind = strategy_kind_from_string(s);
          } catch (const Error&) {
            fail(number, col, "unknown strategy '" + s + "'");
          }
          while (r.more()) parse_strategy_option(r, logic.strategy);
          domain->logic = std::move(logic);
        } else if (kw == "param") {
          if (!domain->logic) fail(number, 1, "param before logic");
          std::string k = r.token("parameter name");
          domain->logic->params[k] = r.scalar("parameter value");
        } else if (kw == "policy") {
          if (domain->policy) fail(number, 1, "policy declared twice");
          Policy p;
          std::size_t col = r.column();
          std::string src = r.word("policy source");
          if (src == "human") {
            p.source = PolicySource::HumanManager;
          } else if (src == "parent") {
            p.source = PolicySource::ParentDomain;
          } else {
            fail(number, col, "unknown policy source '" + src + "'");
          }
          p.enabled = r.flag("enabled flag");
          domain->policy = std::move(p);
        } else if (kw == "directive") {
          if (!domain->policy) fail(number, 1, "directive before policy");
          std::size_t col = r.column();
          std::string k = r.token("directive name");
          if (!Policy::known_directive(k) || k == "enabled") fail(number, col, "unknown directive '" + k + "'");
          domain->policy->directives[k] = r.scalar("directive value");
        } else if (kw == "member") {
          std::size_t col = r.column();
          std::string name = r.token("local name");
          ObjectId id = r.id("member id");
          if (!domain->members.emplace(name, id).second) fail(number, col, "duplicate local name '" + name + "'");
        } else {
          fail(number, line.tokens.front().column, "unknown entry '" + kw + "'");
        }
        r.end();
        break;
      }
      case Section::Sensors: {
        std::string kw = r.word("keyword");
        if (kw != "sensor") fail(number, 1, "expected 'sensor'");
        ObjectId id = r.id("sensor id");
        doc.sensors[id] = r.integer("heartbeat");
        r.end();
        break;
      }
      case Section::Bindings: {
        std::string kw = r.word("keyword");
        ObjectId id = r.id("object id");
        if (kw == "host") {
          doc.host_bindings[id] = r.token("host id");
        } else if (kw == "component") {
          doc.component_bindings[id] = r.token("component id");
        } else if (kw == "link") {
          std::string a = r.token("host id");
          std::string b = r.token("host id");
          doc.link_bindings[id] = ordered(a, b);
        } else {
          fail(number, 1, "unknown binding '" + kw + "'");
        }
        r.end();
        break;
      }
      case Section::Hosts: {
        std::string kw = r.word("keyword");
        if (kw == "host") {
          Host h;
          h.id = r.token("host id");
          h.capacity = r.scalar("capacity");
          h.level = r.scalar("level");
          h.leak = r.scalar("leak rate");
          std::size_t col = r.column();
          std::string st = r.word("host status");
          if (st != "up" && st != "down") fail(number, col, "host status must be up or down");
          h.up = st == "up";
          if (h.capacity < 0 || h.level < 0 || h.level > h.capacity || h.leak < 0) {
            fail(number, line.tokens[2].column, "host needs 0 <= level <= capacity and leak >= 0");
          }
          HostId id = h.id;
          if (!doc.hosts.emplace(id, std::move(h)).second) fail(number, line.tokens[1].column, "host declared twice");
        } else if (kw == "link") {
          std::string a = r.token("host id");
          std::string b = r.token("host id");
          double q = r.scalar("link quality");
          if (q < 0 || q > 1) fail(number, line.tokens[3].column, "link quality must lie in [0, 1]");
          doc.links[ordered(a, b)] = q;
        } else {
          fail(number, 1, "unknown entry '" + kw + "'");
        }
        r.end();
        break;
      }
      case Section::Graph: {
        std::string kw = r.word("keyword");
        if (kw == "component") {
          ComponentId id = r.token("component id");
          Component c;
          c.kind = r.token("component kind");
          c.host = r.token("host id");
          std::size_t col = r.column();
          std::string st = r.word("component state");
          try {
            c.state = component_state_from_string(st);
          } catch (const Error&) {
            fail(number, col, "unknown component state '" + st + "'");
          }
          if (!doc.graph.components.emplace(id, std::move(c)).second) fail(number, line.tokens[1].column, "component declared twice");
        } else if (kw == "connection") {
          Connection c;
          c.from = r.token("component id");
          c.from_port = r.token("port");
          c.to = r.token("component id");
          c.to_port = r.token("port");
          doc.graph.connections.insert(std::move(c));
        } else {
          fail(number, 1, "unknown entry '" + kw + "'");
        }
        r.end();
        break;
      }
      case Section::Scenario: {
        std::string key = r.token("scenario key");
        std::string value = r.word("scenario value");
        r.end();
        if (!doc.scenario.emplace(key, value).second) fail(number, 1, "scenario key '" + key + "' repeated");
        break;
      }
      case Section::Faults: {
        Tick at = r.integer("tick");
        if (at < last_fault) fail(number, 1, "fault entries must be sorted by time");
        last_fault = at;
        FaultEntry f;
        f.at = at;
        std::size_t col = r.column();
        std::string kw = r.word("fault");
        f.host = r.token("host id");
        if (kw == "kill") {
          f.type = FaultEntry::Type::Kill;
        } else if (kw == "revive") {
          f.type = FaultEntry::Type::Revive;
        } else if (kw == "leak") {
          f.type = FaultEntry::Type::Leak;
          f.value = r.scalar("leak rate");
        } else if (kw == "link") {
          f.type = FaultEntry::Type::Link;
          f.other = r.token("host id");
          f.value = r.scalar("link quality");
        } else {
          fail(number, col, "unknown fault '" + kw + "'");
        }
        r.end();
        doc.faults.push_back(std::move(f));
        break;
      }
      case Section::Membership: {
        MembershipEntry m;
        m.at = r.integer("tick");
        if (m.at < last_membership) fail(number, 1, "membership entries must be sorted by time");
        last_membership = m.at;
        std::size_t col = r.column();
        std::string kw = r.word("membership operation");
        if (kw != "include" && kw != "exclude") fail(number, col, "expected include or exclude");
        m.include = kw == "include";
        col = r.column();
        m.domain_path = r.word("domain path");
        try {
          PathName::parse(m.domain_path);
        } catch (const Error&) {
          fail(number, col, "invalid path '" + m.domain_path + "'");
        }
        m.name = r.token("local name");
        if (m.include) m.id = r.id("member id");
        r.end();
        doc.membership.push_back(std::move(m));
        break;
      }
      case Section::Transactions: {
        std::string kw = r.word("keyword");
        if (kw != "txn") fail(number, 1, "expected 'txn'");
        ScriptedTxn t;
        t.at = r.integer("tick");
        if (t.at < last_txn) fail(number, 1, "transactions must be sorted by time");
        last_txn = t.at;
        t.owner = r.optional_id("owner id");
        std::size_t col = r.column();
        std::string edits = r.word("edit list");
        try {
          t.txn = parse_edits(edits);
        } catch (const Error& e) {
          fail(number, col, e.what());
        }
        r.end();
        doc.transactions.push_back(std::move(t));
        break;
      }
    }
  }
  if (!header) fail(number == 0 ? 1 : number, 1, "missing '" + std::string(kHeader) + "' header");
  if (!doc.root.valid()) fail(number, 1, "no root declared");
  for (const auto& [id, h] : doc.hosts) doc.graph.hosts[id] = h.up;
  return doc;
}

// ---------------------------------------------------------------------------

void check_references(const ConfigDocument& doc) {
  auto dangling = [](const std::string& what) { throw Error(Errc::DanglingReference, what); };
  auto declared = [&](ObjectId id, const std::string& where) {
    if (!doc.objects.contains(id)) dangling(where + " references undeclared object " + id_str(id));
  };
  declared(doc.root, "root");
  if (doc.objects.at(doc.root) != Kind::Domain) dangling("root " + id_str(doc.root) + " is not a domain");
  for (const auto& [id, d] : doc.domains) {
    declared(id, "domain section");
    if (doc.objects.at(id) != Kind::Domain) dangling("domain section for non-domain object " + id_str(id));
    for (const auto& [name, member] : d.members) declared(member, "member '" + name + "' of domain " + id_str(id));
  }
  for (const auto& [id, hb] : doc.sensors) declared(id, "sensor entry");
  auto host_known = [&](const HostId& h, const std::string& where) {
    if (!doc.hosts.contains(h)) dangling(where + " references undeclared host '" + h + "'");
  };
  for (const auto& [id, h] : doc.host_bindings) {
    declared(id, "host binding");
    host_known(h, "host binding");
  }
  for (const auto& [id, c] : doc.component_bindings) {
    declared(id, "component binding");
    if (!doc.graph.components.contains(c)) dangling("component binding references undeclared component '" + c + "'");
  }
  for (const auto& [id, l] : doc.link_bindings) {
    declared(id, "link binding");
    if (!doc.links.contains(l)) dangling("link binding references undeclared link " + l.first + "-" + l.second);
  }
  for (const auto& [key, q] : doc.links) {
    host_known(key.first, "link");
    host_known(key.second, "link");
  }
  for (const auto& [id, c] : doc.graph.components) host_known(c.host, "component '" + id + "'");
  for (const auto& c : doc.graph.connections) {
    if (!doc.graph.components.contains(c.from) || !doc.graph.components.contains(c.to)) {
      dangling("connection " + c.from + "->" + c.to + " references an undeclared component");
    }
  }
  for (const auto& f : doc.faults) {
    host_known(f.host, "fault");
    if (f.type == FaultEntry::Type::Link) {
      host_known(f.other, "fault");
      if (!doc.links.contains(ordered(f.host, f.other))) dangling("fault references undeclared link");
    }
  }
  for (const auto& m : doc.membership) {
    if (m.include) declared(m.id, "membership entry");
  }
  for (const auto& t : doc.transactions) {
    if (t.owner.valid()) declared(t.owner, "transaction owner");
  }
}

ConfigDocument capture(const System& system, bool allow_orphans) {
  const Registry& reg = system.registry();
  if (!reg.initialized()) throw Error(Errc::NotInitialized, "registry has no root");
  auto orphans = reg.orphans();
  if (!orphans.empty() && !allow_orphans) {
    throw Error(Errc::DirtyRegistry, std::to_string(orphans.size()) + " orphaned object(s); pass the allow flag to save anyway");
  }
  ConfigDocument doc;
  doc.root = reg.root();
  for (ObjectId id : reg.objects()) {
    Kind kind = reg.kind(id);
    doc.objects[id] = kind;
    if (kind != Kind::Domain) continue;
    DomainDecl& d = doc.domains[id];
    d.members = reg.members(id);
    if (const auto* logic = system.engine().logic(id)) d.logic = *logic;
    const Policy& p = system.engine().policy(id);
    if (p != Policy{}) d.policy = p;
  }
  for (const auto& [id, info] : system.sensors().sensors()) doc.sensors[id] = info.heartbeat;
  doc.host_bindings = system.host_bindings();
  doc.component_bindings = system.component_bindings();
  doc.link_bindings = system.link_bindings();
  Tick now = system.clock().now();
  for (const auto& [id, h] : system.hosts()) {
    Host copy = h;
    copy.level = h.level_at(now);
    copy.updated = 0;
    doc.hosts[id] = copy;
  }
  doc.links = system.links();
  doc.graph = system.config().graph();
  return doc;
}

std::unique_ptr<System> instantiate(const ConfigDocument& doc) {
  check_references(doc);
  ScenarioParams params = scenario_params(doc.scenario);
  auto system = std::make_unique<System>(params.system_options());
  Registry& reg = system->registry();
  reg.create_root(doc.root);
  for (const auto& [id, kind] : doc.objects) {
    if (id != doc.root) reg.register_object(id, kind);
  }
  for (const auto& [id, h] : doc.hosts) system->add_host(h);
  for (const auto& [key, q] : doc.links) system->set_link(key.first, key.second, q);
  ConfigGraph graph = doc.graph;
  graph.hosts = system->config().graph().hosts;
  system->config().reset(std::move(graph));
  for (const auto& [id, d] : doc.domains) {
    for (const auto& [name, member] : d.members) reg.include(id, member, name);
  }
  for (const auto& [id, h] : doc.host_bindings) system->bind_host(id, h);
  for (const auto& [id, c] : doc.component_bindings) system->bind_component(id, c);
  for (const auto& [id, l] : doc.link_bindings) system->bind_link(id, l.first, l.second);
  for (const auto& [id, hb] : doc.sensors) system->sensors().register_sensor(id, hb);
  for (const auto& [id, d] : doc.domains) {
    if (d.policy) system->engine().set_policy(id, *d.policy);
    if (d.logic) system->engine().load_logic(id, *d.logic);
  }
  return system;
}

std::string save_config(const System& system, const std::string& destination, bool allow_orphans) {
  std::string text = render_config(capture(system, allow_orphans));
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot open '" + destination + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(Errc::IoFailure, "write to '" + destination + "' failed");
  return text;
}

ConfigDocument read_config_file(const std::string& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open '" + source + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::unique_ptr<System> load_config(const std::string& source) { return instantiate(read_config_file(source)); }

}  // namespace adf
