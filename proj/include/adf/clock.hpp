#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "adf/types.hpp"

namespace adf {

// Discrete-event clock. Events fire in (time, sequence) order, so a fixed
// script always yields the same interleaving.
class SimClock {
 public:
  using Action = std::function<void()>;

  Tick now() const noexcept { return now_; }

  // Schedules action at absolute time `at` (clamped to now). The label is
  // what snapshots report for pending work.
  void at(Tick at, std::string label, Action action);
  void after(Tick delay, std::string label, Action action) { at(now_ + delay, std::move(label), std::move(action)); }

  // Runs every event with time <= until, then advances now to until.
  void run_until(Tick until);
  // Runs a single event; false when the queue is empty.
  bool step();
  bool idle() const noexcept { return queue_.empty(); }
  std::size_t pending() const noexcept { return queue_.size(); }
  // Labels of pending events in firing order.
  std::vector<std::string> pending_labels() const;

 private:
  struct Entry {
    Tick time;
    std::uint64_t seq;
    std::string label;
    Action action;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  Tick now_ = 0;
  std::uint64_t seq_ = 0;
  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
};

}  // namespace adf
