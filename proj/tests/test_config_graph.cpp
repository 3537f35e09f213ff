#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "adf/config_graph.hpp"
#include "adf/error.hpp"

using namespace adf;

namespace {

ConfigGraph chain() {
  // a -> b -> c on h1, d alone on h2, h3 down.
  ConfigGraph g;
  g.hosts = {{"h1", true}, {"h2", true}, {"h3", false}};
  g.components["a"] = {"frontend", "h1", ComponentState::Active};
  g.components["b"] = {"service", "h1", ComponentState::Active};
  g.components["c"] = {"store", "h1", ComponentState::Active};
  g.components["d"] = {"cache", "h2", ComponentState::Active};
  g.connections.insert({"a", "out", "b", "in"});
  g.connections.insert({"b", "out", "c", "in"});
  return g;
}

ReconfigTxn txn(std::initializer_list<Edit> edits) { return ReconfigTxn{0, edits}; }

std::vector<ComponentId> ids(const BlockSet& s) { return {s.begin(), s.end()}; }

// Random graphs and edit scripts for the property tests. Replacements
// always change the kind and removed ids are never re-added, so the net
// change can be read off the pre and post graphs alone.
struct Generator {
  std::mt19937_64 rng;
  explicit Generator(std::uint64_t seed) : rng(seed) {}

  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng() % n); }

  ConfigGraph graph() {
    ConfigGraph g;
    g.hosts = {{"h1", true}, {"h2", true}, {"h3", pick(4) != 0}};
    const std::size_t n = 2 + pick(6);
    static const char* kinds[] = {"frontend", "service", "cache", "store"};
    for (std::size_t i = 0; i < n; ++i) {
      g.components["c" + std::to_string(i)] = {kinds[pick(4)], "h" + std::to_string(1 + pick(2)), ComponentState::Active};
    }
    for (std::size_t k = 0; k < n + pick(n); ++k) {
      auto from = "c" + std::to_string(pick(n));
      auto to = "c" + std::to_string(pick(n));
      std::string port = "p" + std::to_string(pick(2));
      bool port_taken = false;
      for (const auto& c : g.connections) port_taken |= c.from == from && c.from_port == port;
      if (from != to && !port_taken) g.connections.insert({from, port, to, "in"});
    }
    return g;
  }

  Edit edit(const ConfigGraph& g, int& fresh) {
    std::vector<ComponentId> comps;
    for (const auto& [id, c] : g.components) comps.push_back(id);
    comps.push_back("ghost");
    const auto& c = comps[pick(comps.size())];
    std::string host = "h" + std::to_string(1 + pick(4));
    switch (pick(6)) {
      case 0: return edit::AddComponent{"n" + std::to_string(fresh++), "cache", host};
      case 1: return edit::RemoveComponent{c};
      case 2: return edit::AddConnection{{c, "p" + std::to_string(pick(3)), comps[pick(comps.size())], "in"}};
      case 3: {
        if (g.connections.empty() || pick(5) == 0) return edit::RemoveConnection{{c, "p0", c, "in"}};
        auto it = std::next(g.connections.begin(), static_cast<long>(pick(g.connections.size())));
        return edit::RemoveConnection{*it};
      }
      case 4: return edit::MoveComponent{c, host};
      default: return edit::ReplaceComponent{c, "kind" + std::to_string(fresh++)};
    }
  }

  ReconfigTxn txn(const ConfigGraph& g, int& fresh) {
    ReconfigTxn t;
    std::size_t n = 1 + pick(3);
    for (std::size_t i = 0; i < n; ++i) t.edits.push_back(edit(g, fresh));
    return t;
  }
};

// Straightforward sequential interpreter used as an oracle for apply().
std::optional<ConfigGraph> interpret(const ConfigGraph& g, const ReconfigTxn& t) {
  ConfigGraph out = g;
  for (const auto& e : t.edits) {
    if (auto* a = std::get_if<edit::AddComponent>(&e)) {
      if (out.components.contains(a->id)) return std::nullopt;
      out.components[a->id] = {a->kind, a->host, ComponentState::Active};
    } else if (auto* r = std::get_if<edit::RemoveComponent>(&e)) {
      if (!out.components.erase(r->id)) return std::nullopt;
    } else if (auto* ac = std::get_if<edit::AddConnection>(&e)) {
      if (!out.connections.insert(ac->connection).second) return std::nullopt;
    } else if (auto* rc = std::get_if<edit::RemoveConnection>(&e)) {
      if (!out.connections.erase(rc->connection)) return std::nullopt;
    } else if (auto* m = std::get_if<edit::MoveComponent>(&e)) {
      if (!out.components.contains(m->id)) return std::nullopt;
      out.components[m->id].host = m->host;
    } else if (auto* rp = std::get_if<edit::ReplaceComponent>(&e)) {
      if (!out.components.contains(rp->id)) return std::nullopt;
      out.components[rp->id].kind = rp->kind;
    }
  }
  std::set<std::pair<ComponentId, std::string>> ports;
  for (const auto& c : out.connections) {
    if (!out.components.contains(c.from) || !out.components.contains(c.to)) return std::nullopt;
    if (!ports.insert({c.from, c.from_port}).second) return std::nullopt;
  }
  for (const auto& [id, c] : out.components) {
    auto pre = g.components.find(id);
    bool changed = pre == g.components.end() || pre->second.host != c.host || pre->second.kind != c.kind;
    if (!changed) continue;
    auto h = out.hosts.find(c.host);
    if (h == out.hosts.end() || !h->second) return std::nullopt;
    out.components[id].state = ComponentState::Active;
  }
  return out;
}

// Block set by direct comparison of the pre and post graphs.
BlockSet scan_block_set(const ConfigGraph& pre, const ConfigGraph& post) {
  BlockSet out;
  std::set<ComponentId> all;
  for (const auto& [id, c] : pre.components) all.insert(id);
  for (const auto& [id, c] : post.components) all.insert(id);
  std::set<ComponentId> initiator_of;  // removed, moved or replaced
  for (const auto& id : all) {
    auto a = pre.components.find(id);
    auto b = post.components.find(id);
    if (a == pre.components.end()) {
      out.insert(id);
    } else if (b == post.components.end() || a->second.host != b->second.host || a->second.kind != b->second.kind) {
      out.insert(id);
      initiator_of.insert(id);
    }
  }
  for (const auto& c : pre.connections) {
    if (!post.connections.contains(c)) out.insert({c.from, c.to});
    if (initiator_of.contains(c.to)) out.insert(c.from);
  }
  for (const auto& c : post.connections) {
    if (!pre.connections.contains(c)) out.insert({c.from, c.to});
  }
  return out;
}

}  // namespace

TEST(ConfigGraph, EditsRoundTripThroughText) {
  std::vector<Edit> edits = {edit::AddComponent{"x", "cache", "h1"},
                             edit::RemoveComponent{"x"},
                             edit::AddConnection{{"a", "out", "b", "in"}},
                             edit::RemoveConnection{{"a", "out", "b", "in"}},
                             edit::MoveComponent{"a", "h2"},
                             edit::ReplaceComponent{"a", "frontend2"}};
  for (const auto& e : edits) EXPECT_EQ(to_string(parse_edit(to_string(e))), to_string(e));
  ReconfigTxn t{0, edits};
  EXPECT_EQ(render_edits(parse_edits(render_edits(t))), render_edits(t));
  EXPECT_EQ(render_edits(ReconfigTxn{}), "-");
  EXPECT_THROW(parse_edit("move:a"), Error);
  EXPECT_THROW(parse_edit("teleport:a:b"), Error);
}

TEST(ConfigGraph, NeighboursAndKinds) {
  auto g = chain();
  EXPECT_EQ(g.in_neighbors("b"), (std::vector<ComponentId>{"a"}));
  EXPECT_EQ(g.out_neighbors("b"), (std::vector<ComponentId>{"c"}));
  EXPECT_EQ(g.incident("b").size(), 2u);
  EXPECT_EQ(g.kind_multiset().size(), 4u);
}

TEST(ConfigGraph, ValidateFlagsEachViolation) {
  auto g = chain();
  EXPECT_TRUE(validate(g, txn({edit::MoveComponent{"a", "h2"}})).ok());
  EXPECT_TRUE(validate(g, txn({edit::RemoveComponent{"zz"}})).has(ViolationCode::UnknownComponent));
  EXPECT_TRUE(validate(g, txn({edit::AddComponent{"a", "x", "h1"}})).has(ViolationCode::DuplicateComponent));
  EXPECT_TRUE(validate(g, txn({edit::RemoveConnection{{"a", "out", "c", "in"}}})).has(ViolationCode::UnknownConnection));
  EXPECT_TRUE(validate(g, txn({edit::AddConnection{{"a", "out", "b", "in"}}})).has(ViolationCode::DuplicateConnection));
  EXPECT_TRUE(validate(g, txn({edit::RemoveComponent{"c"}})).has(ViolationCode::DanglingConnection));
  EXPECT_TRUE(validate(g, txn({edit::AddConnection{{"a", "out", "d", "in"}}})).has(ViolationCode::DuplicatePortBinding));
  EXPECT_TRUE(validate(g, txn({edit::MoveComponent{"a", "h9"}})).has(ViolationCode::UnknownHost));
  EXPECT_TRUE(validate(g, txn({edit::MoveComponent{"a", "h3"}})).has(ViolationCode::HostDown));
  EXPECT_TRUE(validate(g, txn({edit::AddComponent{"bad id", "x", "h1"}})).has(ViolationCode::InvalidToken));
}

TEST(ConfigGraph, RemoveThenAddIsAReplacement) {
  auto g = chain();
  auto t = txn({edit::RemoveComponent{"d"}, edit::AddComponent{"d", "cache", "h2"}});
  auto d = net_delta(g, t);
  EXPECT_TRUE(d.added.empty());
  EXPECT_TRUE(d.removed.empty());
  EXPECT_EQ(d.replaced, (std::set<ComponentId>{"d"}));
}

TEST(ConfigGraph, ApplyRestartsTouchedComponents) {
  auto g = chain();
  g.components["a"].state = ComponentState::Down;
  auto post = apply(g, txn({edit::MoveComponent{"a", "h2"}}));
  EXPECT_EQ(post.components.at("a").host, "h2");
  EXPECT_EQ(post.components.at("a").state, ComponentState::Active);
  EXPECT_THROW(apply(g, txn({edit::MoveComponent{"a", "h3"}})), Error);
}

TEST(BlockSet, ReplacementBlocksItsInitiators) {
  auto g = chain();
  EXPECT_EQ(ids(compute_block_set(g, txn({edit::ReplaceComponent{"b", "service2"}}))),
            (std::vector<ComponentId>{"a", "b"}));
  EXPECT_EQ(ids(compute_block_set(g, txn({edit::RemoveConnection{{"b", "out", "c", "in"}}, edit::RemoveComponent{"c"}}))),
            (std::vector<ComponentId>{"b", "c"}));
  EXPECT_EQ(ids(compute_block_set(g, txn({edit::AddComponent{"e", "cache", "h2"}}))), (std::vector<ComponentId>{"e"}));
}

TEST(BlockSet, DisjointSetsMayRunConcurrently) {
  auto g = chain();
  auto t1 = txn({edit::ReplaceComponent{"c", "store2"}});
  auto t2 = txn({edit::MoveComponent{"d", "h1"}});
  auto t3 = txn({edit::MoveComponent{"b", "h2"}});
  EXPECT_TRUE(can_run_concurrently(t1, t2, g));
  EXPECT_FALSE(can_run_concurrently(t1, t3, g));
  EXPECT_FALSE(can_run_concurrently(t3, t1, g));
}

TEST(BlockSetProperty, MatchesExhaustiveScan) {
  Generator gen(11);
  int checked = 0;
  for (int i = 0; i < 3000; ++i) {
    auto g = gen.graph();
    int fresh = 0;
    auto t = gen.txn(g, fresh);
    if (!validate(g, t).ok()) continue;
    auto post = apply(g, t);
    EXPECT_EQ(compute_block_set(g, t), scan_block_set(g, post)) << render_edits(t);
    ++checked;
  }
  EXPECT_GT(checked, 300);
}

// validate and apply agree with each other and with a sequential
// interpreter on random transactions.
TEST(ConfigGraphProperty, ValidateApplyFuzz) {
  Generator gen(5);
  int valid = 0;
  for (int i = 0; i < 12000; ++i) {
    auto g = gen.graph();
    int fresh = 0;
    auto t = gen.txn(g, fresh);
    auto expected = interpret(g, t);
    bool ok = validate(g, t).ok();
    ASSERT_EQ(ok, expected.has_value()) << render_edits(t);
    if (!ok) {
      try {
        apply(g, t);
        ADD_FAILURE() << "apply accepted " << render_edits(t);
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::InvalidTxn);
      }
      continue;
    }
    ++valid;
    auto post = apply(g, t);
    EXPECT_EQ(post, *expected) << render_edits(t);
    EXPECT_TRUE(validate(post, ReconfigTxn{}).ok());
  }
  EXPECT_GT(valid, 1000);
}
