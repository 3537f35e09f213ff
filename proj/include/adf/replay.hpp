#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace adf {

struct ReplayResult {
  // 0 all invariants hold, 1 an invariant is violated, 2 the report could
  // not be read or parsed.
  int exit_code = 0;
  std::vector<std::string> problems;
};

// Re-checks a recorded run: the hash chain, ordering of time and event ids,
// quiescence and block-set disjointness, healing conservation, retroactive
// timing, transaction liveness, agent itineraries, the final graph and the
// metrics.
ReplayResult check_report(std::string_view text);
ReplayResult check_report_file(const std::string& path);

}  // namespace adf
