#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "adf/types.hpp"

namespace adf {

using Sample = std::pair<Tick, double>;

// Least-squares line through samples, extrapolated to the level `critical`.
// Returns nothing when the fitted slope is zero or points away from
// critical. Throws Error{InsufficientSamples} with fewer than two distinct
// sample times.
std::optional<double> forecast_exhaustion(std::span<const Sample> samples, double critical);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;  // value at t = 0
};

LinearFit fit_line(std::span<const Sample> samples);

// True when value has crossed threshold in the given direction.
inline bool threshold_crossed(double value, double threshold, bool below) {
  return below ? value < threshold : value > threshold;
}

// Counts failures per key over a sliding window of ticks.
class FailureCounter {
 public:
  explicit FailureCounter(Tick window) : window_(window) {}

  // Records a failure and returns the count inside the window ending at t.
  std::size_t record(ObjectId key, Tick t);
  std::size_t count(ObjectId key, Tick t) const;
  void clear(ObjectId key) { history_.erase(key); }

 private:
  Tick window_;
  std::map<ObjectId, std::vector<Tick>> history_;
};

}  // namespace adf
