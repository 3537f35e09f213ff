#pragma once

#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "adf/types.hpp"

namespace adf {

// A traversal of the domain hierarchy. Absolute paths render as "/a/b"
// (root is "/"); paths relative to a domain render as "a/b".
class PathName {
 public:
  PathName() = default;
  explicit PathName(std::vector<std::string> segments);

  // Parses an absolute path. Throws Error{InvalidName} on malformed input.
  static PathName parse(std::string_view text);
  // Parses a relative path ("a/b"); the empty string is the empty path.
  static PathName parse_relative(std::string_view text);

  const std::vector<std::string>& segments() const noexcept { return segments_; }
  bool empty() const noexcept { return segments_.empty(); }
  std::size_t size() const noexcept { return segments_.size(); }

  PathName child(std::string_view name) const;
  PathName concat(const PathName& tail) const;

  std::string str() const;
  std::string relative_str() const;

  friend auto operator<=>(const PathName&, const PathName&) = default;

 private:
  std::vector<std::string> segments_;
};

enum class EnumerateMode { Direct, Indirect };

struct MemberEntry {
  PathName relative;
  ObjectId id;

  friend bool operator==(const MemberEntry&, const MemberEntry&) = default;
};

// The managed-object registry and domain hierarchy. Membership is by
// reference: one object may be bound under different local names in many
// domains. Domain-to-domain membership is kept acyclic.
//
// Mutations take an exclusive lock and bump version(); reads take a shared
// lock, so concurrent readers only observe fully applied mutations.
class Registry {
 public:
  Registry() = default;
  Registry(const Registry&) = delete;
  Registry& operator=(const Registry&) = delete;

  ObjectId create_root();
  // Restores a root with a persisted id (used by config loading).
  ObjectId create_root(ObjectId id);

  ObjectId register_object(Kind kind);
  // Registers with an explicit id; later fresh ids never collide with it.
  void register_object(ObjectId id, Kind kind);

  // Drops an object that has no memberships and contains nothing. The id is
  // never handed out again.
  void retire(ObjectId id);

  std::optional<PathName> include(ObjectId domain, ObjectId member, std::string_view local_name);
  void exclude(ObjectId domain, std::string_view local_name);

  ObjectId resolve(const PathName& path) const;
  std::optional<ObjectId> try_resolve(const PathName& path) const;
  ObjectId resolve_relative(ObjectId domain, const PathName& relative) const;
  std::optional<ObjectId> try_resolve_relative(ObjectId domain, const PathName& relative) const;

  // Sorted set of every root-anchored path that resolves to object.
  std::vector<PathName> paths_of(ObjectId object) const;
  std::vector<MemberEntry> enumerate(ObjectId domain, EnumerateMode mode) const;

  // Domains holding a direct binding to object, sorted by id.
  std::vector<ObjectId> parents(ObjectId object) const;
  // All domains containing object directly or transitively, sorted by id.
  std::vector<ObjectId> ancestors(ObjectId object) const;
  // Registered non-root objects without any root-anchored path.
  std::vector<ObjectId> orphans() const;

  const std::map<std::string, ObjectId>& members(ObjectId domain) const;
  std::vector<ObjectId> objects() const;

  ObjectId root() const;
  bool initialized() const noexcept { return root_.valid(); }
  bool contains(ObjectId id) const;
  Kind kind(ObjectId id) const;
  std::uint64_t version() const noexcept { return version_; }

 private:
  struct Record {
    Kind kind = Kind::PlainObject;
    std::map<std::string, ObjectId> members;                 // Domain-kind only
    std::set<std::pair<ObjectId, std::string>> memberships;  // (domain, local name)
  };

  const Record& record(ObjectId id) const;
  Record& record(ObjectId id);
  const Record& domain_record(ObjectId id) const;
  bool reaches(ObjectId from_domain, ObjectId target) const;
  void collect_paths(ObjectId object, std::vector<PathName>& out) const;
  void collect_members(ObjectId domain, const PathName& prefix, std::vector<MemberEntry>& out) const;
  bool has_path(ObjectId object) const;

  mutable std::shared_mutex mutex_;
  std::map<ObjectId, Record> objects_;
  ObjectId root_;
  std::uint64_t next_id_ = 1;
  std::uint64_t version_ = 0;
};

}  // namespace adf
