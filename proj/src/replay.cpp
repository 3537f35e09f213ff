#include "adf/replay.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "adf/error.hpp"
#include "adf/report.hpp"

namespace adf {

namespace {

std::optional<std::uint64_t> as_u64(const std::string* s) {
  if (s == nullptr) return std::nullopt;
  try {
    std::size_t used = 0;
    auto v = std::stoull(*s, &used);
    if (used != s->size()) return std::nullopt;
    return v;
  } catch (...) {
    return std::nullopt;
  }
}

std::optional<std::uint64_t> parse_hex64(const std::string& text) {
  if (text.empty() || text.size() > 16) return std::nullopt;
  try {
    std::size_t used = 0;
    auto v = std::stoull(text, &used, 16);
    if (used != text.size()) return std::nullopt;
    return v;
  } catch (...) {
    return std::nullopt;
  }
}

constexpr std::size_t kMaxProblems = 50;

struct AgentProgress {
  std::size_t itinerary = 0;
  std::size_t next = 0;
  bool done = false;
};

}  // namespace

ReplayResult check_report(std::string_view text) {
  ReplayResult result;
  ParsedReport report;
  try {
    report = parse_report(text);
  } catch (const Error& e) {
    result.exit_code = 2;
    result.problems.emplace_back(e.what());
    return result;
  }
  auto problem = [&](std::size_t line, const std::string& what) {
    result.problems.push_back("line " + std::to_string(line) + ": " + what);
  };

  Tick bound = 0;
  try {
    bound = static_cast<Tick>(std::stoll(report.meta.at("liveness_bound")));
  } catch (...) {
    result.exit_code = 2;
    result.problems.emplace_back("meta lacks a numeric liveness_bound");
    return result;
  }

  GraphTracker tracker(report.initial_graph);
  std::uint64_t hash = 0;
  Tick last_time = 0;
  std::uint64_t last_event = 0;
  std::map<std::string, Tick> source_time;
  std::map<std::uint64_t, Tick> open_txns;
  std::map<std::string, AgentProgress> agents;
  std::map<std::string, std::uint64_t> counts;
  Tick end_time = -1;

  for (std::size_t i = 0; i < report.trace.size(); ++i) {
    const TraceLine& line = report.trace[i];
    hash = chain_hash(hash, line.text);
    if (line.hash != hex64(hash)) {
      problem(line.line_number, "hash chain broken");
      // Resynchronise on the recorded value so one edited line is reported once.
      if (auto recorded = parse_hex64(line.hash)) hash = *recorded;
    }
    auto parsed = TraceEntry::parse(line.text);
    if (!parsed) {
      problem(line.line_number, "malformed trace line");
      continue;
    }
    const TraceEntry& e = *parsed;
    ++counts[e.kind];
    if (i == 0 && e.kind != "start") problem(line.line_number, "trace must begin with 'start'");
    if (e.time < last_time) problem(line.line_number, "time goes backwards");
    last_time = e.time;

    const std::string* origin = nullptr;
    std::optional<std::multiset<std::string>> kinds_before;
    if (e.kind == "commit") {
      if (auto id = as_u64(e.get("txn")); id && tracker.origin(*id) == "healing") {
        kinds_before = tracker.graph().kind_multiset();
        origin = &tracker.origin(*id);
      }
    }
    if (auto err = tracker.apply(e)) problem(line.line_number, *err);
    if (origin != nullptr && kinds_before && *kinds_before != tracker.graph().kind_multiset()) {
      problem(line.line_number, "healing transaction changed the component-kind multiset");
    }

    if (e.kind == "event") {
      auto id = as_u64(e.get("id"));
      if (!id || *id <= last_event) problem(line.line_number, "event ids must strictly increase");
      if (id) last_event = *id;
      const std::string* src = e.get("source");
      if (src != nullptr) {
        auto it = source_time.find(*src);
        if (it != source_time.end() && e.time < it->second) problem(line.line_number, "source timestamps regress");
        source_time[*src] = e.time;
      }
      if (const auto* route = e.get("route"); route != nullptr && *route == "sensor") ++counts["event:sensor"];
    } else if (e.kind == "submit") {
      if (auto id = as_u64(e.get("txn"))) open_txns[*id] = e.time;
    } else if (e.kind == "commit" || e.kind == "abort") {
      if (auto id = as_u64(e.get("txn")); id && open_txns.contains(*id)) {
        if (e.time - open_txns[*id] > bound) problem(line.line_number, "transaction finished after the liveness bound");
        open_txns.erase(*id);
      }
    } else if (e.kind == "action") {
      const std::string* strategy = e.get("strategy");
      if (strategy != nullptr && *strategy == "retroactive") {
        auto period = as_u64(e.get("period"));
        if (!period || *period == 0 || e.time % static_cast<Tick>(*period) != 0) {
          problem(line.line_number, "retroactive action between period boundaries");
        }
      }
    } else if (e.kind == "agent-launch") {
      const std::string* agent = e.get("agent");
      const std::string* itinerary = e.get("itinerary");
      if (agent == nullptr || itinerary == nullptr) {
        problem(line.line_number, "agent launch lacks fields");
        continue;
      }
      auto& a = agents[*agent];
      if (a.itinerary != 0 && !a.done) problem(line.line_number, "agent relaunched mid-itinerary");
      a = AgentProgress{split_list(*itinerary, '+').size(), 0, false};
    } else if (e.kind == "agent-stop") {
      const std::string* agent = e.get("agent");
      auto index = as_u64(e.get("index"));
      auto it = agent == nullptr ? agents.end() : agents.find(*agent);
      if (it == agents.end() || !index || it->second.done || *index != it->second.next ||
          *index >= it->second.itinerary) {
        problem(line.line_number, "agent stop out of itinerary order");
      } else {
        ++it->second.next;
      }
    } else if (e.kind == "agent-done") {
      const std::string* agent = e.get("agent");
      auto it = agent == nullptr ? agents.end() : agents.find(*agent);
      auto stops = as_u64(e.get("stops"));
      if (it == agents.end() || !stops || *stops != it->second.next || it->second.next != it->second.itinerary) {
        problem(line.line_number, "agent report does not match its visits");
      } else {
        it->second.done = true;
      }
    } else if (e.kind == "end") {
      end_time = e.time;
      if (i + 1 != report.trace.size()) problem(line.line_number, "'end' must be the last trace line");
    }
  }
  if (report.trace.empty() || end_time < 0) {
    result.problems.emplace_back("trace does not end with 'end'");
  }
  for (const auto& [id, submitted] : open_txns) {
    if (end_time - submitted > bound) {
      result.problems.push_back("transaction " + std::to_string(id) + " still pending past the liveness bound");
    }
  }

  if (tracker.graph() != report.final_graph) {
    result.problems.emplace_back("replayed graph differs from the recorded final graph");
  }

  auto expect = [&](const std::string& metric, double value) {
    auto it = report.metrics.find(metric);
    if (it == report.metrics.end()) {
      result.problems.push_back("metric " + metric + " missing");
    } else if (it->second != value) {
      result.problems.push_back("metric " + metric + " is " + format_scalar(it->second) + ", trace implies " +
                                format_scalar(value));
    }
  };
  auto count = [&](const char* kind) { return static_cast<double>(counts[kind]); };
  expect("txns_committed", count("commit"));
  expect("txns_aborted", count("abort"));
  expect("adaptations_executed", count("action"));
  expect("decisions", count("decision"));
  expect("events_emitted", count("event:sensor"));
  expect("exhaustions_reached", count("exhausted"));
  expect("app_transactions", count("app-start"));
  expect("app_deferred", count("app-deferred"));
  expect("agents_completed", count("agent-done"));
  expect("quiescence_violations", 0.0);
  expect("downtime_ticks", tracker.downtime());

  if (!result.problems.empty()) result.exit_code = 1;
  if (result.problems.size() > kMaxProblems) {
    std::size_t more = result.problems.size() - kMaxProblems;
    result.problems.resize(kMaxProblems);
    result.problems.push_back("... and " + std::to_string(more) + " more");
  }
  return result;
}

ReplayResult check_report_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return ReplayResult{2, {"cannot open '" + path + "'"}};
  std::ostringstream buf;
  buf << in.rdbuf();
  return check_report(buf.str());
}

}  // namespace adf
