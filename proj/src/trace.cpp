#include "adf/trace.hpp"

#include <charconv>
#include <cstdio>

namespace adf {

TraceEntry& TraceEntry::set(std::string key, std::string value) {
  if (value.empty()) value = "-";
  fields.emplace_back(std::move(key), std::move(value));
  return *this;
}

const std::string* TraceEntry::get(std::string_view key) const {
  for (const auto& [k, v] : fields) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string TraceEntry::render() const {
  std::string out = std::to_string(time) + " " + kind;
  for (const auto& [k, v] : fields) {
    out += ' ';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

std::optional<TraceEntry> TraceEntry::parse(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t pos = 0;
  while (pos < line.size()) {
    auto next = line.find(' ', pos);
    if (next == std::string_view::npos) next = line.size();
    if (next == pos) return std::nullopt;
    words.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  if (words.size() < 2) return std::nullopt;
  TraceEntry e;
  auto [end, ec] = std::from_chars(words[0].data(), words[0].data() + words[0].size(), e.time);
  if (ec != std::errc{} || end != words[0].data() + words[0].size()) return std::nullopt;
  e.kind = std::string(words[1]);
  for (std::size_t i = 2; i < words.size(); ++i) {
    auto eq = words[i].find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == words[i].size()) return std::nullopt;
    e.fields.emplace_back(std::string(words[i].substr(0, eq)), std::string(words[i].substr(eq + 1)));
  }
  return e;
}

TraceEntry& Trace::add(Tick time, std::string kind) {
  entries_.push_back(TraceEntry{time, std::move(kind), {}});
  return entries_.back();
}

std::vector<const TraceEntry*> Trace::of_kind(std::string_view kind) const {
  std::vector<const TraceEntry*> out;
  for (const auto& e : entries_) {
    if (e.kind == kind) out.push_back(&e);
  }
  return out;
}

std::uint64_t chain_hash(std::uint64_t previous, std::string_view line) {
  std::uint64_t h = 14695981039346656037ull ^ previous;
  for (unsigned char c : line) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::vector<std::string> split_list(std::string_view text, char sep) {
  std::vector<std::string> out;
  if (text.empty() || text == "-") return out;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace adf
