#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adf/config_graph.hpp"
#include "adf/trace.hpp"

namespace adf {

// A finished run: the trace plus the graph before and after, and counters.
struct RunReport {
  std::map<std::string, std::string> meta;
  ConfigGraph initial_graph;
  std::vector<TraceEntry> trace;
  ConfigGraph final_graph;
  std::map<std::string, double> metrics;
};

// Sections "[meta]", "[initial-graph]", "[trace]", "[graph]", "[metrics]"
// after an "adf-report 1" line. Every trace line is suffixed with
// " #<hash>", the running chain hash over the rendered lines so far.
std::string render_report(const RunReport& report);

struct TraceLine {
  std::size_t line_number = 0;
  std::string text;  // without the hash suffix
  std::string hash;  // as written, may be empty when missing
};

struct ParsedReport {
  std::map<std::string, std::string> meta;
  ConfigGraph initial_graph;
  std::vector<TraceLine> trace;
  ConfigGraph final_graph;
  std::map<std::string, double> metrics;
};

// Structural parse only; trace lines are kept verbatim for the checker.
// Throws Error{ParseError} (index = line) or Error{UnknownVersion}.
ParsedReport parse_report(std::string_view text);

std::vector<std::string> render_graph_lines(const ConfigGraph& graph);

// Rebuilds configuration-graph state from trace entries, mirroring the
// configuration manager's block / commit / abort / host transitions and the
// application traffic gate.
class GraphTracker {
 public:
  explicit GraphTracker(ConfigGraph initial);

  // Returns a description of the first inconsistency the entry exposes.
  std::optional<std::string> apply(const TraceEntry& entry);

  const ConfigGraph& graph() const noexcept { return graph_; }
  // Sum over time of the number of Down components, up to the last entry.
  double downtime() const noexcept { return downtime_; }
  const std::map<TxnId, BlockSet>& running() const noexcept { return running_sets_; }
  std::optional<ReconfigTxn> submitted(TxnId id) const;
  const std::string& origin(TxnId id) const;

 private:
  void advance(Tick t);
  void unblock(TxnId id);
  std::size_t down_count() const;

  ConfigGraph graph_;
  Tick last_ = 0;
  double downtime_ = 0.0;
  std::map<TxnId, ReconfigTxn> submitted_;
  std::map<TxnId, std::string> origins_;
  std::map<TxnId, BlockSet> running_sets_;
  std::map<TxnId, std::map<ComponentId, ComponentState>> prior_;
  std::map<ComponentId, int> occupancy_;
};

}  // namespace adf
