// Command-line front end: run scenarios, inspect domain trees, and re-check
// recorded reports.
//
// Exit codes: 0 success, 1 a run or report violates an invariant, 2 usage,
// parse or I/O errors.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "adf/config_io.hpp"
#include "adf/error.hpp"
#include "adf/replay.hpp"
#include "adf/report.hpp"
#include "adf/sim.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

int error_exit(const adf::Error& e) {
  std::cerr << "adf: " << e.what() << '\n';
  switch (e.code()) {
    case adf::Errc::ParseError:
    case adf::Errc::UnknownVersion:
    case adf::Errc::IoFailure:
      return kUsage;
    default:
      return kViolation;
  }
}

adf::ConfigDocument load_document(const std::string& path) {
  adf::ConfigDocument doc = adf::read_config_file(path);
  adf::check_references(doc);
  adf::scenario_params(doc.scenario);
  return doc;
}

int report_problems(const adf::ReplayResult& result) {
  for (const auto& p : result.problems) std::cerr << "adf: " << p << '\n';
  return result.exit_code;
}

int cmd_run(const std::string& scenario, std::uint64_t seed, adf::Tick until, const std::string& report_path) {
  adf::ConfigDocument doc = load_document(scenario);
  adf::Simulator sim(doc, seed);
  std::string text = adf::render_report(sim.run(until));

  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::binary);
    if (!out || !(out << text)) {
      std::cerr << "adf: cannot write report to '" << report_path << "'\n";
      return kUsage;
    }
  }
  adf::ReplayResult check = adf::check_report(text);
  if (check.exit_code != 0) return report_problems(check);

  const auto& m = sim.system().metrics();
  std::cout << "ran " << sim.params().name << " seed=" << seed << " until=" << until
            << " decisions=" << m.decisions << " adaptations=" << m.adaptations_executed
            << " events=" << m.events_emitted << '\n';
  return kOk;
}

int cmd_tree(const std::string& config) {
  adf::ConfigDocument doc = load_document(config);
  auto system = adf::instantiate(doc);
  for (const auto& line : adf::render_tree(*system)) std::cout << line << '\n';
  return kOk;
}

int cmd_validate(const std::string& scenario) {
  adf::ConfigDocument doc = load_document(scenario);
  // Building the system exercises logic, policy and sensor registration.
  adf::Simulator sim(doc, 0);
  std::cout << scenario << ": ok (" << doc.objects.size() << " objects, " << doc.graph.components.size()
            << " components, " << doc.hosts.size() << " hosts)\n";
  return kOk;
}

int cmd_replay(const std::string& report) {
  adf::ReplayResult result = adf::check_report_file(report);
  if (result.exit_code == 0) std::cout << report << ": ok\n";
  return report_problems(result);
}

int cmd_dump_graph(const std::string& report) {
  std::ifstream in(report, std::ios::binary);
  if (!in) {
    std::cerr << "adf: cannot open '" << report << "'\n";
    return kUsage;
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  adf::ParsedReport parsed = adf::parse_report(text);
  for (const auto& line : adf::render_graph_lines(parsed.final_graph)) std::cout << line << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive-domain framework simulator"};
  app.require_subcommand(1);

  std::string path;
  std::uint64_t seed = 0;
  adf::Tick until = 0;
  std::string report_path;

  auto* run = app.add_subcommand("run", "Run a scenario and optionally write its report");
  run->add_option("scenario", path, "Scenario config file")->required();
  run->add_option("--seed", seed, "Random seed")->required();
  run->add_option("--until", until, "Virtual time to run to")->required()->check(CLI::NonNegativeNumber);
  run->add_option("--report", report_path, "Where to write the run report");

  auto* tree = app.add_subcommand("tree", "Print the domain hierarchy with each domain's logic");
  tree->add_option("config", path, "Config file")->required();

  auto* validate = app.add_subcommand("validate", "Parse and check a scenario without running it");
  validate->add_option("scenario", path, "Scenario config file")->required();

  auto* replay = app.add_subcommand("replay", "Re-check every invariant over a recorded report");
  replay->add_option("report", path, "Report file")->required();

  auto* dump = app.add_subcommand("dump-graph", "Print the final configuration graph of a report");
  dump->add_option("report", path, "Report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(path, seed, until, report_path);
    if (*tree) return cmd_tree(path);
    if (*validate) return cmd_validate(path);
    if (*replay) return cmd_replay(path);
    if (*dump) return cmd_dump_graph(path);
  } catch (const adf::Error& e) {
    return error_exit(e);
  } catch (const std::exception& e) {
    std::cerr << "adf: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
