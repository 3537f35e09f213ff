#include "adf/registry.hpp"

#include <algorithm>
#include <mutex>

#include "adf/error.hpp"

namespace adf {

namespace {

std::vector<std::string> split(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto slash = text.find('/', start);
    if (slash == std::string_view::npos) slash = text.size();
    out.emplace_back(text.substr(start, slash - start));
    start = slash + 1;
  }
  return out;
}

void check_segments(const std::vector<std::string>& segments, std::string_view text) {
  for (const auto& s : segments) {
    if (!is_token(s)) throw Error(Errc::InvalidName, "bad path '" + std::string(text) + "'");
  }
}

std::string id_str(ObjectId id) { return "#" + std::to_string(id.value); }

}  // namespace

PathName::PathName(std::vector<std::string> segments) : segments_(std::move(segments)) {
  check_segments(segments_, relative_str());
}

PathName PathName::parse(std::string_view text) {
  if (text.empty() || text.front() != '/') throw Error(Errc::InvalidName, "path must start with '/': '" + std::string(text) + "'");
  if (text == "/") return {};
  auto segments = split(text.substr(1));
  check_segments(segments, text);
  PathName p;
  p.segments_ = std::move(segments);
  return p;
}

PathName PathName::parse_relative(std::string_view text) {
  if (text.empty()) return {};
  auto segments = split(text);
  check_segments(segments, text);
  PathName p;
  p.segments_ = std::move(segments);
  return p;
}

PathName PathName::child(std::string_view name) const {
  if (!is_token(name)) throw Error(Errc::InvalidName, "bad local name '" + std::string(name) + "'");
  PathName p = *this;
  p.segments_.emplace_back(name);
  return p;
}

PathName PathName::concat(const PathName& tail) const {
  PathName p = *this;
  p.segments_.insert(p.segments_.end(), tail.segments_.begin(), tail.segments_.end());
  return p;
}

std::string PathName::str() const { return "/" + relative_str(); }

std::string PathName::relative_str() const {
  std::string out;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (i) out += '/';
    out += segments_[i];
  }
  return out;
}

// ---------------------------------------------------------------------------

const Registry::Record& Registry::record(ObjectId id) const {
  auto it = objects_.find(id);
  if (it == objects_.end()) throw Error(Errc::UnknownId, "unknown object " + id_str(id));
  return it->second;
}

Registry::Record& Registry::record(ObjectId id) {
  auto it = objects_.find(id);
  if (it == objects_.end()) throw Error(Errc::UnknownId, "unknown object " + id_str(id));
  return it->second;
}

const Registry::Record& Registry::domain_record(ObjectId id) const {
  const auto& r = record(id);
  if (r.kind != Kind::Domain) throw Error(Errc::NotADomain, id_str(id) + " is not a domain");
  return r;
}

ObjectId Registry::create_root() {
  std::unique_lock lock(mutex_);
  if (root_.valid()) throw Error(Errc::AlreadyInitialized, "root already created");
  root_ = ObjectId{next_id_++};
  objects_[root_].kind = Kind::Domain;
  ++version_;
  return root_;
}

ObjectId Registry::create_root(ObjectId id) {
  std::unique_lock lock(mutex_);
  if (root_.valid()) throw Error(Errc::AlreadyInitialized, "root already created");
  if (!id.valid() || objects_.contains(id)) throw Error(Errc::UnknownId, "root id " + id_str(id) + " unusable");
  root_ = id;
  objects_[root_].kind = Kind::Domain;
  next_id_ = std::max(next_id_, id.value + 1);
  ++version_;
  return root_;
}

ObjectId Registry::register_object(Kind kind) {
  std::unique_lock lock(mutex_);
  ObjectId id{next_id_++};
  objects_[id].kind = kind;
  ++version_;
  return id;
}

void Registry::register_object(ObjectId id, Kind kind) {
  std::unique_lock lock(mutex_);
  if (!id.valid() || objects_.contains(id)) {
    throw Error(Errc::UnknownId, "id " + id_str(id) + " already in use");
  }
  objects_[id].kind = kind;
  next_id_ = std::max(next_id_, id.value + 1);
  ++version_;
}

void Registry::retire(ObjectId id) {
  std::unique_lock lock(mutex_);
  if (id == root_) throw Error(Errc::Forbidden, "cannot retire the root domain");
  const auto& r = record(id);
  if (!r.memberships.empty() || !r.members.empty()) throw Error(Errc::Forbidden, id_str(id) + " still bound");
  objects_.erase(id);
  ++version_;
}

bool Registry::reaches(ObjectId from_domain, ObjectId target) const {
  if (from_domain == target) return true;
  for (const auto& [name, m] : record(from_domain).members) {
    if (record(m).kind == Kind::Domain && reaches(m, target)) return true;
  }
  return false;
}

std::optional<PathName> Registry::include(ObjectId domain, ObjectId member, std::string_view local_name) {
  std::unique_lock lock(mutex_);
  if (!root_.valid()) throw Error(Errc::NotInitialized, "no root domain");
  auto& d = const_cast<Record&>(domain_record(domain));
  auto& m = record(member);
  if (!is_token(local_name)) throw Error(Errc::InvalidName, "bad local name '" + std::string(local_name) + "'");
  if (member == root_) throw Error(Errc::Forbidden, "the root domain cannot be included");
  if (d.members.contains(std::string(local_name))) {
    throw Error(Errc::DuplicateLocalName, "'" + std::string(local_name) + "' already bound in " + id_str(domain));
  }
  if (m.kind == Kind::Domain && reaches(member, domain)) {
    throw Error(Errc::CycleDetected, id_str(member) + " already contains " + id_str(domain));
  }
  d.members.emplace(local_name, member);
  m.memberships.emplace(domain, std::string(local_name));
  ++version_;

  std::vector<PathName> paths;
  collect_paths(domain, paths);
  if (paths.empty()) return std::nullopt;
  std::sort(paths.begin(), paths.end(), [](const PathName& a, const PathName& b) { return a.str() < b.str(); });
  return paths.front().child(local_name);
}

void Registry::exclude(ObjectId domain, std::string_view local_name) {
  std::unique_lock lock(mutex_);
  auto& d = const_cast<Record&>(domain_record(domain));
  auto it = d.members.find(std::string(local_name));
  if (it == d.members.end()) throw Error(Errc::UnknownLocalName, "'" + std::string(local_name) + "' not bound in " + id_str(domain));
  record(it->second).memberships.erase({domain, std::string(local_name)});
  d.members.erase(it);
  ++version_;
}

ObjectId Registry::resolve(const PathName& path) const {
  std::shared_lock lock(mutex_);
  if (!root_.valid()) throw Error(Errc::NotInitialized, "no root domain");
  ObjectId current = root_;
  const auto& segs = path.segments();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& r = record(current);
    if (r.kind != Kind::Domain) throw Error(Errc::NotADomain, "segment " + std::to_string(i) + " of " + path.str(), i);
    auto it = r.members.find(segs[i]);
    if (it == r.members.end()) throw Error(Errc::NotFound, "segment " + std::to_string(i) + " of " + path.str(), i);
    current = it->second;
  }
  return current;
}

std::optional<ObjectId> Registry::try_resolve(const PathName& path) const {
  try {
    return resolve(path);
  } catch (const Error&) {
    return std::nullopt;
  }
}

ObjectId Registry::resolve_relative(ObjectId domain, const PathName& relative) const {
  std::shared_lock lock(mutex_);
  ObjectId current = domain;
  record(domain);
  const auto& segs = relative.segments();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& r = record(current);
    if (r.kind != Kind::Domain) throw Error(Errc::NotADomain, "segment " + std::to_string(i) + " of " + relative.relative_str(), i);
    auto it = r.members.find(segs[i]);
    if (it == r.members.end()) throw Error(Errc::NotFound, "segment " + std::to_string(i) + " of " + relative.relative_str(), i);
    current = it->second;
  }
  return current;
}

std::optional<ObjectId> Registry::try_resolve_relative(ObjectId domain, const PathName& relative) const {
  try {
    return resolve_relative(domain, relative);
  } catch (const Error&) {
    return std::nullopt;
  }
}

void Registry::collect_paths(ObjectId object, std::vector<PathName>& out) const {
  if (object == root_) {
    out.emplace_back();
    return;
  }
  for (const auto& [domain, name] : record(object).memberships) {
    std::vector<PathName> prefixes;
    collect_paths(domain, prefixes);
    for (auto& p : prefixes) out.push_back(p.child(name));
  }
}

bool Registry::has_path(ObjectId object) const {
  if (object == root_) return true;
  for (const auto& [domain, name] : record(object).memberships) {
    if (has_path(domain)) return true;
  }
  return false;
}

std::vector<PathName> Registry::paths_of(ObjectId object) const {
  std::shared_lock lock(mutex_);
  record(object);
  std::vector<PathName> out;
  if (root_.valid()) collect_paths(object, out);
  std::sort(out.begin(), out.end(), [](const PathName& a, const PathName& b) { return a.str() < b.str(); });
  return out;
}

void Registry::collect_members(ObjectId domain, const PathName& prefix, std::vector<MemberEntry>& out) const {
  for (const auto& [name, id] : record(domain).members) {
    PathName p = prefix.child(name);
    out.push_back({p, id});
    if (record(id).kind == Kind::Domain) collect_members(id, p, out);
  }
}

std::vector<MemberEntry> Registry::enumerate(ObjectId domain, EnumerateMode mode) const {
  std::shared_lock lock(mutex_);
  const auto& d = domain_record(domain);
  std::vector<MemberEntry> out;
  if (mode == EnumerateMode::Direct) {
    for (const auto& [name, id] : d.members) out.push_back({PathName({name}), id});
  } else {
    collect_members(domain, PathName{}, out);
  }
  std::sort(out.begin(), out.end(), [](const MemberEntry& a, const MemberEntry& b) {
    return a.relative.relative_str() < b.relative.relative_str();
  });
  return out;
}

std::vector<ObjectId> Registry::parents(ObjectId object) const {
  std::shared_lock lock(mutex_);
  std::set<ObjectId> out;
  for (const auto& [domain, name] : record(object).memberships) out.insert(domain);
  return {out.begin(), out.end()};
}

std::vector<ObjectId> Registry::ancestors(ObjectId object) const {
  std::shared_lock lock(mutex_);
  std::set<ObjectId> seen;
  std::vector<ObjectId> stack{object};
  while (!stack.empty()) {
    ObjectId cur = stack.back();
    stack.pop_back();
    for (const auto& [domain, name] : record(cur).memberships) {
      if (seen.insert(domain).second) stack.push_back(domain);
    }
  }
  return {seen.begin(), seen.end()};
}

std::vector<ObjectId> Registry::orphans() const {
  std::shared_lock lock(mutex_);
  std::vector<ObjectId> out;
  for (const auto& [id, r] : objects_) {
    if (id != root_ && !has_path(id)) out.push_back(id);
  }
  return out;
}

const std::map<std::string, ObjectId>& Registry::members(ObjectId domain) const {
  std::shared_lock lock(mutex_);
  return domain_record(domain).members;
}

std::vector<ObjectId> Registry::objects() const {
  std::shared_lock lock(mutex_);
  std::vector<ObjectId> out;
  out.reserve(objects_.size());
  for (const auto& [id, r] : objects_) out.push_back(id);
  return out;
}

ObjectId Registry::root() const {
  if (!root_.valid()) throw Error(Errc::NotInitialized, "no root domain");
  return root_;
}

bool Registry::contains(ObjectId id) const {
  std::shared_lock lock(mutex_);
  return objects_.contains(id);
}

Kind Registry::kind(ObjectId id) const {
  std::shared_lock lock(mutex_);
  return record(id).kind;
}

}  // namespace adf
