#pragma once

#include <deque>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "adf/clock.hpp"
#include "adf/config_graph.hpp"
#include "adf/trace.hpp"
#include "adf/types.hpp"

namespace adf {

enum class TxnStatus { Queued, Running, Committed, Aborted };

std::string_view to_string(TxnStatus status) noexcept;

struct TxnResult {
  TxnId id = 0;
  TxnStatus status = TxnStatus::Queued;
  ObjectId owner;          // domain that issued the transaction, if any
  std::string origin;      // logic name or "script"
  Tick submitted = 0;
  Tick started = -1;
  Tick finished = -1;
  BlockSet block_set;
  std::string reason;      // abort reason
};

struct ConfigManagerOptions {
  Tick apply_latency = 1;
  bool allow_concurrent = true;
};

// The configuration-manager actuator. Admission is serialized through
// submit(); an admitted transaction runs as soon as its block set is
// disjoint from every running transaction and from every transaction queued
// ahead of it. A running transaction blocks its set, waits until no
// application traffic occupies a blocked component, applies its net delta
// after apply_latency and unblocks.
class ConfigManager {
 public:
  using Listener = std::function<void(const TxnResult&)>;

  ConfigManager(SimClock& clock, Trace& trace, ConfigManagerOptions options = {});

  void reset(ConfigGraph graph);
  const ConfigGraph& graph() const noexcept { return graph_; }
  const ConfigManagerOptions& options() const noexcept { return options_; }

  // Throws Error{InvalidTxn} when txn is invalid against the current graph.
  TxnId submit(ReconfigTxn txn, ObjectId owner = {}, std::string origin = "script");
  void on_finished(Listener listener) { listeners_.push_back(std::move(listener)); }

  const TxnResult& result(TxnId id) const;
  const std::map<TxnId, TxnResult>& results() const noexcept { return results_; }
  // True when c is in the block set of a running or queued transaction.
  bool busy(const ComponentId& c) const;
  std::size_t running() const noexcept;
  std::size_t queued() const noexcept { return queue_.size(); }

  // Application traffic gate.
  bool may_enter(const ComponentId& c) const;
  void enter(const ComponentId& c);
  void leave(const ComponentId& c);
  int occupancy(const ComponentId& c) const;
  std::uint64_t quiescence_violations() const noexcept { return violations_; }

  void set_host_status(const HostId& host, bool up);

 private:
  struct Running {
    ReconfigTxn txn;
    std::map<ComponentId, ComponentState> prior;
    bool commit_scheduled = false;
  };

  void pump();
  void start(TxnId id, ReconfigTxn txn, BlockSet block_set);
  void check_quiescent(TxnId id);
  void commit(TxnId id);
  void abort(TxnId id, const std::string& reason);
  void unblock(const Running& run, const BlockSet& set);
  void finish(TxnId id);

  SimClock& clock_;
  Trace& trace_;
  ConfigManagerOptions options_;
  ConfigGraph graph_;
  TxnId next_id_ = 1;
  std::deque<std::pair<TxnId, ReconfigTxn>> queue_;
  std::map<TxnId, Running> running_;
  std::map<TxnId, TxnResult> results_;
  std::map<ComponentId, int> occupancy_;
  std::uint64_t violations_ = 0;
  std::vector<Listener> listeners_;
};

}  // namespace adf
