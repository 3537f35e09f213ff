#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "adf/error.hpp"
#include "adf/registry.hpp"

using namespace adf;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an adf::Error";
  return Errc::ReferenceError;
}

struct Tree {
  Registry reg;
  ObjectId root = reg.create_root();
  ObjectId domain(ObjectId parent, const std::string& name) {
    ObjectId d = reg.register_object(Kind::Domain);
    reg.include(parent, d, name);
    return d;
  }
  ObjectId object(ObjectId parent, const std::string& name) {
    ObjectId o = reg.register_object(Kind::PlainObject);
    reg.include(parent, o, name);
    return o;
  }
};

std::vector<std::string> strs(const std::vector<PathName>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) out.push_back(p.str());
  return out;
}

}  // namespace

TEST(PathName, ParsesAndRenders) {
  EXPECT_EQ(PathName::parse("/").str(), "/");
  EXPECT_TRUE(PathName::parse("/").empty());
  EXPECT_EQ(PathName::parse("/a/b-c/d_1").str(), "/a/b-c/d_1");
  EXPECT_EQ(PathName::parse_relative("x/y").relative_str(), "x/y");
  EXPECT_TRUE(PathName::parse_relative("").empty());
  for (const char* bad : {"", "a/b", "/a//b", "/a/", "/a b", "/a/$"}) {
    EXPECT_EQ(code_of([&] { PathName::parse(bad); }), Errc::InvalidName) << bad;
  }
  EXPECT_EQ(code_of([&] { PathName::parse("/" + std::string(65, 'x')); }), Errc::InvalidName);
}

TEST(Registry, RootIsCreatedOnce) {
  Registry reg;
  EXPECT_EQ(code_of([&] { reg.root(); }), Errc::NotInitialized);
  ObjectId root = reg.create_root();
  EXPECT_EQ(reg.kind(root), Kind::Domain);
  EXPECT_EQ(code_of([&] { reg.create_root(); }), Errc::AlreadyInitialized);
  EXPECT_EQ(reg.resolve(PathName::parse("/")), root);
}

TEST(Registry, IncludeReturnsPathAndResolves) {
  Tree t;
  ObjectId d = t.domain(t.root, "healing");
  ObjectId o = t.reg.register_object(Kind::PlainObject);
  auto p = t.reg.include(d, o, "server1");
  ASSERT_TRUE(p);
  EXPECT_EQ(p->str(), "/healing/server1");
  EXPECT_EQ(t.reg.resolve(*p), o);
}

TEST(Registry, IncludeIntoDetachedDomainHasNoPath) {
  Tree t;
  ObjectId loose = t.reg.register_object(Kind::Domain);
  ObjectId o = t.reg.register_object(Kind::PlainObject);
  EXPECT_FALSE(t.reg.include(loose, o, "x"));
  EXPECT_TRUE(t.reg.paths_of(o).empty());
}

TEST(Registry, OneObjectManyPaths) {
  Tree t;
  ObjectId a = t.domain(t.root, "a");
  ObjectId b = t.domain(t.root, "b");
  ObjectId o = t.object(a, "x");
  t.reg.include(b, o, "y");
  EXPECT_EQ(strs(t.reg.paths_of(o)), (std::vector<std::string>{"/a/x", "/b/y"}));
  EXPECT_EQ(t.reg.parents(o), (std::vector<ObjectId>{a, b}));
}

TEST(Registry, RejectsCyclesDuplicatesAndBadNames) {
  Tree t;
  ObjectId a = t.domain(t.root, "a");
  ObjectId b = t.domain(a, "b");
  EXPECT_EQ(code_of([&] { t.reg.include(b, a, "back"); }), Errc::CycleDetected);
  EXPECT_EQ(code_of([&] { t.reg.include(a, a, "self"); }), Errc::CycleDetected);
  EXPECT_EQ(code_of([&] { t.reg.include(a, b, "b"); }), Errc::DuplicateLocalName);
  ObjectId o = t.reg.register_object(Kind::PlainObject);
  EXPECT_EQ(code_of([&] { t.reg.include(a, o, "no/slash"); }), Errc::InvalidName);
  EXPECT_EQ(code_of([&] { t.reg.include(o, a, "x"); }), Errc::NotADomain);
  EXPECT_EQ(code_of([&] { t.reg.include(a, t.root, "r"); }), Errc::Forbidden);
  EXPECT_EQ(code_of([&] { t.reg.include(a, ObjectId{999}, "ghost"); }), Errc::UnknownId);
}

TEST(Registry, ResolveReportsFailingSegment) {
  Tree t;
  ObjectId a = t.domain(t.root, "a");
  t.object(a, "leaf");
  try {
    t.reg.resolve(PathName::parse("/a/missing"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotFound);
    EXPECT_EQ(e.index(), 1u);
  }
  try {
    t.reg.resolve(PathName::parse("/a/leaf/deeper"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotADomain);
    EXPECT_EQ(e.index(), 2u);
  }
}

TEST(Registry, ExcludeRemovesOnlyThatBinding) {
  Tree t;
  ObjectId a = t.domain(t.root, "a");
  ObjectId o = t.object(a, "x");
  t.reg.include(t.root, o, "x");
  t.reg.exclude(a, "x");
  EXPECT_EQ(strs(t.reg.paths_of(o)), (std::vector<std::string>{"/x"}));
  EXPECT_EQ(code_of([&] { t.reg.exclude(a, "x"); }), Errc::UnknownLocalName);
  t.reg.exclude(t.root, "x");
  EXPECT_EQ(t.reg.orphans(), (std::vector<ObjectId>{o}));
}

TEST(Registry, EnumerateDirectAndIndirect) {
  Tree t;
  ObjectId a = t.domain(t.root, "a");
  ObjectId b = t.domain(a, "b");
  ObjectId x = t.object(a, "x");
  ObjectId y = t.object(b, "y");
  auto direct = t.reg.enumerate(a, EnumerateMode::Direct);
  ASSERT_EQ(direct.size(), 2u);
  EXPECT_EQ(direct[0].relative.relative_str(), "b");
  EXPECT_EQ(direct[1].id, x);
  auto all = t.reg.enumerate(a, EnumerateMode::Indirect);
  std::vector<std::pair<std::string, ObjectId>> got;
  for (const auto& m : all) got.emplace_back(m.relative.relative_str(), m.id);
  EXPECT_EQ(got, (std::vector<std::pair<std::string, ObjectId>>{{"b", b}, {"b/y", y}, {"x", x}}));
  EXPECT_EQ(code_of([&] { t.reg.enumerate(x, EnumerateMode::Direct); }), Errc::NotADomain);
}

TEST(Registry, VersionMovesOnEveryMutation) {
  Tree t;
  auto v = t.reg.version();
  ObjectId a = t.domain(t.root, "a");
  EXPECT_GT(t.reg.version(), v);
  v = t.reg.version();
  t.reg.exclude(t.root, "a");
  EXPECT_GT(t.reg.version(), v);
  v = t.reg.version();
  t.reg.retire(a);
  EXPECT_GT(t.reg.version(), v);
  EXPECT_FALSE(t.reg.contains(a));
  EXPECT_NE(t.reg.register_object(Kind::PlainObject), a);
}

TEST(Registry, RetireRequiresUnboundObject) {
  Tree t;
  ObjectId a = t.domain(t.root, "a");
  EXPECT_EQ(code_of([&] { t.reg.retire(a); }), Errc::Forbidden);
  EXPECT_EQ(code_of([&] { t.reg.retire(t.root); }), Errc::Forbidden);
}

// Random hierarchies checked against a shadow model kept by the test:
// include succeeds exactly when the shadow DFS finds no cycle, paths_of
// matches an exhaustive walk from the root, enumerate(Indirect) matches a
// breadth-first closure and ancestors matches reverse reachability.
TEST(RegistryProperty, RandomHierarchiesAgreeWithShadowModel) {
  for (std::uint32_t seed = 1; seed <= 40; ++seed) {
    std::mt19937 rng(seed);
    Tree t;
    std::vector<ObjectId> domains{t.root};
    std::vector<ObjectId> all{t.root};
    std::map<ObjectId, bool> is_domain{{t.root, true}};
    std::map<ObjectId, std::map<std::string, ObjectId>> edges;  // shadow

    std::function<bool(ObjectId, ObjectId)> reaches = [&](ObjectId from, ObjectId to) {
      if (from == to) return true;
      for (const auto& [n, m] : edges[from]) {
        if (is_domain[m] && reaches(m, to)) return true;
      }
      return false;
    };

    const int nodes = 5 + static_cast<int>(rng() % 45);
    for (int i = 0; i < nodes; ++i) {
      bool dom = rng() % 3 == 0;
      ObjectId o = t.reg.register_object(dom ? Kind::Domain : Kind::PlainObject);
      is_domain[o] = dom;
      all.push_back(o);
      if (dom) domains.push_back(o);
    }
    for (int step = 0; step < nodes * 3; ++step) {
      ObjectId d = domains[rng() % domains.size()];
      ObjectId m = all[rng() % all.size()];
      std::string name = "n" + std::to_string(rng() % 6);
      if (m == t.root) continue;
      bool duplicate = edges[d].contains(name);
      bool cycle = is_domain[m] && reaches(m, d);
      try {
        t.reg.include(d, m, name);
        ASSERT_FALSE(duplicate || cycle) << "seed " << seed;
        edges[d][name] = m;
      } catch (const Error& e) {
        if (duplicate) {
          EXPECT_EQ(e.code(), Errc::DuplicateLocalName);
        } else {
          EXPECT_TRUE(cycle) << "seed " << seed;
          EXPECT_EQ(e.code(), Errc::CycleDetected);
        }
      }
      if (rng() % 7 == 0 && !edges[d].empty()) {
        auto it = std::next(edges[d].begin(), static_cast<long>(rng() % edges[d].size()));
        t.reg.exclude(d, it->first);
        edges[d].erase(it);
      }
    }

    // Exhaustive walk of every root-anchored path.
    std::map<ObjectId, std::vector<std::string>> expected_paths;
    std::function<void(ObjectId, std::string)> walk = [&](ObjectId d, std::string prefix) {
      for (const auto& [n, m] : edges[d]) {
        std::string p = prefix + "/" + n;
        expected_paths[m].push_back(p);
        if (is_domain[m]) walk(m, p);
      }
    };
    walk(t.root, "");
    for (ObjectId o : all) {
      if (o == t.root) continue;
      auto want = expected_paths[o];
      std::sort(want.begin(), want.end());
      EXPECT_EQ(strs(t.reg.paths_of(o)), want) << "seed " << seed << " object " << o.value;
      for (const auto& p : want) EXPECT_EQ(t.reg.resolve(PathName::parse(p)), o);
    }

    std::map<ObjectId, std::set<ObjectId>> closures;
    for (ObjectId d : domains) {
      // Breadth-first closure over the shadow edges.
      std::set<ObjectId> closure;
      std::vector<ObjectId> frontier{d};
      while (!frontier.empty()) {
        std::vector<ObjectId> next;
        for (ObjectId f : frontier) {
          for (const auto& [n, m] : edges[f]) {
            if (closure.insert(m).second && is_domain[m]) next.push_back(m);
          }
        }
        frontier = next;
      }
      std::set<ObjectId> got;
      for (const auto& e : t.reg.enumerate(d, EnumerateMode::Indirect)) {
        got.insert(e.id);
        EXPECT_EQ(t.reg.resolve_relative(d, e.relative), e.id);
      }
      EXPECT_EQ(got, closure) << "seed " << seed;
      closures[d] = closure;
    }

    for (ObjectId o : all) {
      std::vector<ObjectId> want;
      for (ObjectId d : domains) {
        if (closures[d].contains(o)) want.push_back(d);
      }
      std::sort(want.begin(), want.end());
      EXPECT_EQ(t.reg.ancestors(o), want) << "seed " << seed;
    }
  }
}
