#include "adf/clock.hpp"

#include <algorithm>

namespace adf {

void SimClock::at(Tick at, std::string label, Action action) {
  queue_.push(Entry{std::max(at, now_), seq_++, std::move(label), std::move(action)});
}

bool SimClock::step() {
  if (queue_.empty()) return false;
  Entry e = queue_.top();
  queue_.pop();
  now_ = e.time;
  e.action();
  return true;
}

void SimClock::run_until(Tick until) {
  while (!queue_.empty() && queue_.top().time <= until) step();
  now_ = std::max(now_, until);
}

std::vector<std::string> SimClock::pending_labels() const {
  auto copy = queue_;
  std::vector<std::string> out;
  out.reserve(copy.size());
  while (!copy.empty()) {
    out.push_back(copy.top().label);
    copy.pop();
  }
  return out;
}

}  // namespace adf
