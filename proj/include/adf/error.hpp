#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace adf {

enum class Errc {
  AlreadyInitialized,
  NotInitialized,
  InvalidName,
  DuplicateLocalName,
  CycleDetected,
  UnknownId,
  UnknownLocalName,
  Forbidden,
  NotFound,
  NotADomain,
  NoLogicLoaded,
  UnknownLogic,
  UnknownDirective,
  UnknownSensor,
  TimeRegression,
  ConsistencyRejected,
  PolicySuppressed,
  InsufficientSamples,
  NoParent,
  NotAChild,
  UnknownAction,
  EmptyItinerary,
  InvalidTxn,
  Aborted,
  UnknownHost,
  ParseError,
  UnknownVersion,
  DanglingReference,
  DirtyRegistry,
  IoFailure,
  ReferenceError,
};

std::string_view to_string(Errc code) noexcept;

// Single exception type for the framework; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), index_(index) {}

  Errc code() const noexcept { return code_; }

  // Segment index for path errors, line number for parse errors.
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  Errc code_;
  std::optional<std::size_t> index_;
};

}  // namespace adf
