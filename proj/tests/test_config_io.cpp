#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "adf/config_io.hpp"
#include "adf/error.hpp"
#include "random_system.hpp"

using namespace adf;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "adf-config-io-tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::AlreadyInitialized;
}

}  // namespace

TEST(ConfigIo, RootOnlyDocument) {
  System sys;
  sys.registry().create_root();
  std::string text = render_config(capture(sys));
  auto loaded = instantiate(parse_config(text));
  EXPECT_EQ(loaded->registry().root(), sys.registry().root());
  EXPECT_EQ(loaded->registry().objects().size(), 1u);
  EXPECT_EQ(render_config(capture(*loaded)), text);
}

TEST(ConfigIo, RefusesOrphansUnlessAllowed) {
  System sys;
  ObjectId root = sys.registry().create_root();
  ObjectId d = sys.registry().register_object(Kind::Domain);
  sys.registry().include(root, d, "d");
  sys.registry().register_object(Kind::PlainObject);
  EXPECT_EQ(code_of([&] { capture(sys); }), Errc::DirtyRegistry);
  auto path = scratch("orphans.cfg");
  EXPECT_EQ(code_of([&] { save_config(sys, path.string()); }), Errc::DirtyRegistry);
  std::string text = save_config(sys, path.string(), true);
  auto loaded = load_config(path.string());
  EXPECT_EQ(loaded->registry().orphans().size(), 1u);
  EXPECT_EQ(render_config(capture(*loaded, true)), text);
}

TEST(ConfigIo, UnknownVersionIsRejected) {
  EXPECT_EQ(code_of([] { parse_config("adf-config 9\n[objects]\nroot 1\n"); }), Errc::UnknownVersion);
}

TEST(ConfigIo, ParseErrorsCarryTheLine) {
  const std::string text = "adf-config 1\n[objects]\nroot 1\nobject 1 domain\nobject two domain\n";
  try {
    parse_config(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ParseError);
    ASSERT_TRUE(e.index());
    EXPECT_EQ(*e.index(), 5u);
    EXPECT_NE(std::string(e.what()).find("column 8"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([] { parse_config("adf-config 1\n[nonsense]\n"); }), Errc::ParseError);
  EXPECT_EQ(code_of([] { parse_config("adf-config 1\n[scenario]\nspeed 3\n"); }), Errc::ParseError);
}

TEST(ConfigIo, DanglingMemberIsReported) {
  const std::string text =
      "adf-config 1\n[objects]\nroot 1\nobject 1 domain\n[domain 1 /]\nmember ghost 7\n";
  ConfigDocument doc;
  // The parser may or may not notice; instantiation always does.
  try {
    doc = parse_config(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DanglingReference);
    return;
  }
  EXPECT_EQ(code_of([&] { check_references(doc); }), Errc::DanglingReference);
  EXPECT_EQ(code_of([&] { instantiate(doc); }), Errc::DanglingReference);
}

TEST(ConfigIo, MissingFileIsAnIoFailure) {
  EXPECT_EQ(code_of([] { load_config("/nonexistent/dir/x.cfg"); }), Errc::IoFailure);
}

// Saving, loading and saving again reproduces the bytes, and the loaded
// system has the same paths, bindings, logics, policies and graph.
TEST(ConfigIoProperty, RandomSystemsRoundTrip) {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    auto original = testkit::random_system(seed);
    auto first = scratch("rt-a.cfg");
    auto second = scratch("rt-b.cfg");
    std::string text = save_config(*original, first.string());
    EXPECT_EQ(slurp(first), text);
    auto loaded = load_config(first.string());
    save_config(*loaded, second.string());
    ASSERT_EQ(slurp(second), text) << "seed " << seed;

    const Registry& a = original->registry();
    const Registry& b = loaded->registry();
    ASSERT_EQ(a.objects(), b.objects()) << "seed " << seed;
    for (ObjectId id : a.objects()) {
      EXPECT_EQ(a.kind(id), b.kind(id));
      EXPECT_EQ(a.paths_of(id), b.paths_of(id)) << "seed " << seed << " #" << id.value;
      if (a.kind(id) != Kind::Domain) continue;
      const auto* la = original->engine().logic(id);
      const auto* lb = loaded->engine().logic(id);
      ASSERT_EQ(la == nullptr, lb == nullptr);
      if (la != nullptr) EXPECT_EQ(*la, *lb) << "seed " << seed;
      EXPECT_EQ(original->engine().policy(id), loaded->engine().policy(id)) << "seed " << seed;
    }
    EXPECT_EQ(original->config().graph(), loaded->config().graph());
    EXPECT_EQ(original->host_bindings(), loaded->host_bindings());
    EXPECT_EQ(original->component_bindings(), loaded->component_bindings());
    EXPECT_EQ(original->link_bindings(), loaded->link_bindings());
    EXPECT_EQ(original->hosts(), loaded->hosts());
    EXPECT_EQ(original->links(), loaded->links());
  }
}

TEST(ConfigIo, ShippedScenariosParseAndRenderStably) {
  for (const auto& entry : std::filesystem::directory_iterator(ADF_SCENARIO_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    ConfigDocument doc = read_config_file(entry.path().string());
    check_references(doc);
    std::string once = render_config(doc);
    EXPECT_EQ(render_config(parse_config(once)), once) << entry.path();
    scenario_params(doc.scenario);
  }
}
