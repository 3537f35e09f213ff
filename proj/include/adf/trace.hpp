#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "adf/types.hpp"

namespace adf {

// One line of a run trace: "<tick> <kind> key=value ...". Values never
// contain whitespace; the empty value renders as "-".
struct TraceEntry {
  Tick time = 0;
  std::string kind;
  std::vector<std::pair<std::string, std::string>> fields;

  TraceEntry& set(std::string key, std::string value);
  TraceEntry& set(std::string key, std::string_view value) { return set(std::move(key), std::string(value)); }
  TraceEntry& set(std::string key, const char* value) { return set(std::move(key), std::string(value)); }
  TraceEntry& set(std::string key, std::int64_t value) { return set(std::move(key), std::to_string(value)); }
  TraceEntry& set(std::string key, std::uint64_t value) { return set(std::move(key), std::to_string(value)); }
  TraceEntry& set(std::string key, int value) { return set(std::move(key), std::to_string(value)); }
  TraceEntry& set(std::string key, double value) { return set(std::move(key), format_scalar(value)); }
  TraceEntry& set(std::string key, bool value) { return set(std::move(key), std::string(value ? "1" : "0")); }
  TraceEntry& set(std::string key, ObjectId value) { return set(std::move(key), value.value); }

  const std::string* get(std::string_view key) const;
  std::string render() const;
  static std::optional<TraceEntry> parse(std::string_view line);
};

class Trace {
 public:
  TraceEntry& add(Tick time, std::string kind);
  const std::vector<TraceEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  std::vector<const TraceEntry*> of_kind(std::string_view kind) const;

 private:
  std::vector<TraceEntry> entries_;
};

// Chained FNV-1a over trace lines; each report line carries the running
// value so any edited line breaks the chain.
std::uint64_t chain_hash(std::uint64_t previous, std::string_view line);
std::string hex64(std::uint64_t value);

template <class Range>
std::string join(const Range& items, char sep = ',') {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += sep;
    if constexpr (std::is_same_v<std::decay_t<decltype(item)>, ObjectId>) {
      out += std::to_string(item.value);
    } else {
      out += item;
    }
  }
  return out.empty() ? "-" : out;
}

std::vector<std::string> split_list(std::string_view text, char sep = ',');

}  // namespace adf
