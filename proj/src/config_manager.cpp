#include "adf/config_manager.hpp"

#include <algorithm>

#include "adf/error.hpp"

namespace adf {

namespace {

bool intersects(const BlockSet& a, const BlockSet& b) {
  return std::any_of(a.begin(), a.end(), [&](const ComponentId& c) { return b.contains(c); });
}

}  // namespace

std::string_view to_string(TxnStatus status) noexcept {
  switch (status) {
    case TxnStatus::Queued: return "queued";
    case TxnStatus::Running: return "running";
    case TxnStatus::Committed: return "committed";
    case TxnStatus::Aborted: return "aborted";
  }
  return "queued";
}

ConfigManager::ConfigManager(SimClock& clock, Trace& trace, ConfigManagerOptions options)
    : clock_(clock), trace_(trace), options_(options) {}

void ConfigManager::reset(ConfigGraph graph) { graph_ = std::move(graph); }

TxnId ConfigManager::submit(ReconfigTxn txn, ObjectId owner, std::string origin) {
  TxnId id = next_id_++;
  txn.id = id;
  auto report = validate(graph_, txn);
  if (!report.ok()) {
    std::vector<std::string> codes;
    for (const auto& v : report.violations) codes.emplace_back(to_string(v.code));
    trace_.add(clock_.now(), "reject").set("txn", id).set("owner", owner).set("violations", join(codes));
    throw Error(Errc::InvalidTxn, "transaction " + std::to_string(id) + " rejected: " + join(codes));
  }
  TxnResult& r = results_[id];
  r.id = id;
  r.owner = owner;
  r.origin = std::move(origin);
  r.submitted = clock_.now();
  r.block_set = compute_block_set(graph_, txn);
  trace_.add(clock_.now(), "submit")
      .set("txn", id)
      .set("owner", owner)
      .set("origin", r.origin)
      .set("edits", render_edits(txn));
  queue_.emplace_back(id, std::move(txn));
  pump();
  return id;
}

const TxnResult& ConfigManager::result(TxnId id) const {
  auto it = results_.find(id);
  if (it == results_.end()) throw Error(Errc::UnknownId, "unknown transaction " + std::to_string(id));
  return it->second;
}

bool ConfigManager::busy(const ComponentId& c) const {
  for (const auto& [id, r] : results_) {
    if ((r.status == TxnStatus::Running || r.status == TxnStatus::Queued) && r.block_set.contains(c)) return true;
  }
  return false;
}

std::size_t ConfigManager::running() const noexcept { return running_.size(); }

void ConfigManager::pump() {
  BlockSet reserved;
  for (auto it = queue_.begin(); it != queue_.end();) {
    auto& [id, txn] = *it;
    if (!validate(graph_, txn).ok()) {
      TxnId dead = id;
      it = queue_.erase(it);
      TxnResult& r = results_[dead];
      r.status = TxnStatus::Aborted;
      r.finished = clock_.now();
      r.reason = "invalid";
      trace_.add(clock_.now(), "abort").set("txn", dead).set("reason", "invalid");
      finish(dead);
      // finish() may have re-entered pump(); restart the scan.
      return pump();
    }
    BlockSet set = compute_block_set(graph_, txn);
    bool clear = options_.allow_concurrent ? !intersects(set, reserved) : running_.empty() && reserved.empty();
    if (clear) {
      for (const auto& [rid, run] : running_) {
        if (intersects(set, results_[rid].block_set)) {
          clear = false;
          break;
        }
      }
    }
    if (clear) {
      TxnId start_id = id;
      ReconfigTxn start_txn = std::move(txn);
      it = queue_.erase(it);
      start(start_id, std::move(start_txn), std::move(set));
      continue;
    }
    if (!options_.allow_concurrent) break;
    results_[id].block_set = set;
    reserved.insert(set.begin(), set.end());
    ++it;
  }
}

void ConfigManager::start(TxnId id, ReconfigTxn txn, BlockSet block_set) {
  TxnResult& r = results_[id];
  r.status = TxnStatus::Running;
  r.started = clock_.now();
  r.block_set = std::move(block_set);
  Running run{std::move(txn), {}, false};
  for (const auto& c : r.block_set) {
    auto it = graph_.components.find(c);
    if (it == graph_.components.end()) continue;
    run.prior[c] = it->second.state;
    if (it->second.state == ComponentState::Active) it->second.state = ComponentState::Blocked;
  }
  trace_.add(clock_.now(), "block").set("txn", id).set("set", join(r.block_set));
  running_.emplace(id, std::move(run));
  clock_.at(clock_.now(), "quiesce txn " + std::to_string(id), [this, id] { check_quiescent(id); });
}

void ConfigManager::check_quiescent(TxnId id) {
  auto it = running_.find(id);
  if (it == running_.end() || it->second.commit_scheduled) return;
  const auto& set = results_[id].block_set;
  bool quiet = std::all_of(set.begin(), set.end(), [&](const ComponentId& c) { return occupancy(c) == 0; });
  if (!quiet) {
    clock_.after(1, "quiesce txn " + std::to_string(id), [this, id] { check_quiescent(id); });
    return;
  }
  it->second.commit_scheduled = true;
  clock_.after(options_.apply_latency, "apply txn " + std::to_string(id), [this, id] { commit(id); });
}

void ConfigManager::unblock(const Running& run, const BlockSet& set) {
  for (const auto& c : set) {
    auto it = graph_.components.find(c);
    if (it == graph_.components.end() || it->second.state != ComponentState::Blocked) continue;
    auto prior = run.prior.find(c);
    it->second.state = prior == run.prior.end() ? ComponentState::Active : prior->second;
    if (it->second.state == ComponentState::Blocked) it->second.state = ComponentState::Active;
  }
}

void ConfigManager::commit(TxnId id) {
  auto it = running_.find(id);
  if (it == running_.end()) return;
  if (!validate(graph_, it->second.txn).ok()) return abort(id, "invalid");
  graph_ = apply(graph_, it->second.txn);
  unblock(it->second, results_[id].block_set);
  running_.erase(it);
  TxnResult& r = results_[id];
  r.status = TxnStatus::Committed;
  r.finished = clock_.now();
  trace_.add(clock_.now(), "commit").set("txn", id);
  finish(id);
  pump();
}

void ConfigManager::abort(TxnId id, const std::string& reason) {
  auto it = running_.find(id);
  if (it == running_.end()) return;
  unblock(it->second, results_[id].block_set);
  running_.erase(it);
  TxnResult& r = results_[id];
  r.status = TxnStatus::Aborted;
  r.finished = clock_.now();
  r.reason = reason;
  trace_.add(clock_.now(), "abort").set("txn", id).set("reason", reason);
  finish(id);
  pump();
}

void ConfigManager::finish(TxnId id) {
  TxnResult copy = results_[id];
  for (const auto& l : listeners_) l(copy);
}

bool ConfigManager::may_enter(const ComponentId& c) const {
  auto it = graph_.components.find(c);
  return it != graph_.components.end() && it->second.state == ComponentState::Active;
}

void ConfigManager::enter(const ComponentId& c) {
  if (!may_enter(c)) ++violations_;
  ++occupancy_[c];
}

void ConfigManager::leave(const ComponentId& c) {
  auto it = occupancy_.find(c);
  if (it == occupancy_.end()) return;
  if (--it->second <= 0) occupancy_.erase(it);
}

int ConfigManager::occupancy(const ComponentId& c) const {
  auto it = occupancy_.find(c);
  return it == occupancy_.end() ? 0 : it->second;
}

void ConfigManager::set_host_status(const HostId& host, bool up) {
  auto h = graph_.hosts.find(host);
  if (h == graph_.hosts.end()) throw Error(Errc::UnknownHost, "unknown host '" + host + "'");
  if (h->second == up) return;
  h->second = up;
  trace_.add(clock_.now(), "host").set("host", host).set("up", up);

  BlockSet blocked_now;
  for (const auto& [id, run] : running_) {
    blocked_now.insert(results_[id].block_set.begin(), results_[id].block_set.end());
  }
  for (auto& [id, c] : graph_.components) {
    if (c.host != host) continue;
    if (!up) {
      c.state = ComponentState::Down;
    } else if (c.state == ComponentState::Down) {
      c.state = blocked_now.contains(id) ? ComponentState::Blocked : ComponentState::Active;
      if (c.state == ComponentState::Blocked) {
        for (auto& [rid, run] : running_) {
          if (results_[rid].block_set.contains(id)) run.prior[id] = ComponentState::Active;
        }
      }
    }
  }
  if (up) return pump();

  // A blocked component lost before apply aborts its transaction; so does a
  // transaction that no longer validates (e.g. its target host went down).
  std::vector<TxnId> doomed;
  for (const auto& [id, run] : running_) {
    bool lost = false;
    for (const auto& [c, prior] : run.prior) {
      auto it = graph_.components.find(c);
      if (prior != ComponentState::Down && it != graph_.components.end() && it->second.host == host) lost = true;
    }
    if (lost || !validate(graph_, run.txn).ok()) doomed.push_back(id);
  }
  for (TxnId id : doomed) abort(id, "host-down");
  pump();
}

}  // namespace adf
