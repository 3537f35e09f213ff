#include "adf/analyzers.hpp"

#include <algorithm>
#include <set>

#include "adf/error.hpp"

namespace adf {

LinearFit fit_line(std::span<const Sample> samples) {
  std::set<Tick> times;
  for (const auto& [t, v] : samples) times.insert(t);
  if (times.size() < 2) throw Error(Errc::InsufficientSamples, "need two samples at distinct times");

  // Centre the abscissa before accumulating; large tick values otherwise
  // swamp the cross terms.
  const double n = static_cast<double>(samples.size());
  double mean_t = 0.0;
  double mean_v = 0.0;
  for (const auto& [t, v] : samples) {
    mean_t += static_cast<double>(t);
    mean_v += v;
  }
  mean_t /= n;
  mean_v /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [t, v] : samples) {
    double dt = static_cast<double>(t) - mean_t;
    sxx += dt * dt;
    sxy += dt * (v - mean_v);
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_v - fit.slope * mean_t;
  return fit;
}

std::optional<double> forecast_exhaustion(std::span<const Sample> samples, double critical) {
  LinearFit fit = fit_line(samples);
  if (fit.slope == 0.0) return std::nullopt;
  Tick last = std::max_element(samples.begin(), samples.end())->first;
  double fitted_last = fit.intercept + fit.slope * static_cast<double>(last);
  double gap = critical - fitted_last;
  // Only a line heading towards critical has a crossing ahead of it.
  if (gap != 0.0 && (gap > 0.0) != (fit.slope > 0.0)) return std::nullopt;
  return (critical - fit.intercept) / fit.slope;
}

std::size_t FailureCounter::record(ObjectId key, Tick t) {
  history_[key].push_back(t);
  return count(key, t);
}

std::size_t FailureCounter::count(ObjectId key, Tick t) const {
  auto it = history_.find(key);
  if (it == history_.end()) return 0;
  return static_cast<std::size_t>(
      std::count_if(it->second.begin(), it->second.end(), [&](Tick x) { return x <= t && x > t - window_; }));
}

}  // namespace adf
