#include "adf/types.hpp"

#include <charconv>
#include <cmath>

#include "adf/error.hpp"

namespace adf {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::AlreadyInitialized: return "AlreadyInitialized";
    case Errc::NotInitialized: return "NotInitialized";
    case Errc::InvalidName: return "InvalidName";
    case Errc::DuplicateLocalName: return "DuplicateLocalName";
    case Errc::CycleDetected: return "CycleDetected";
    case Errc::UnknownId: return "UnknownId";
    case Errc::UnknownLocalName: return "UnknownLocalName";
    case Errc::Forbidden: return "Forbidden";
    case Errc::NotFound: return "NotFound";
    case Errc::NotADomain: return "NotADomain";
    case Errc::NoLogicLoaded: return "NoLogicLoaded";
    case Errc::UnknownLogic: return "UnknownLogic";
    case Errc::UnknownDirective: return "UnknownDirective";
    case Errc::UnknownSensor: return "UnknownSensor";
    case Errc::TimeRegression: return "TimeRegression";
    case Errc::ConsistencyRejected: return "ConsistencyRejected";
    case Errc::PolicySuppressed: return "PolicySuppressed";
    case Errc::InsufficientSamples: return "InsufficientSamples";
    case Errc::NoParent: return "NoParent";
    case Errc::NotAChild: return "NotAChild";
    case Errc::UnknownAction: return "UnknownAction";
    case Errc::EmptyItinerary: return "EmptyItinerary";
    case Errc::InvalidTxn: return "InvalidTxn";
    case Errc::Aborted: return "Aborted";
    case Errc::UnknownHost: return "UnknownHost";
    case Errc::ParseError: return "ParseError";
    case Errc::UnknownVersion: return "UnknownVersion";
    case Errc::DanglingReference: return "DanglingReference";
    case Errc::DirtyRegistry: return "DirtyRegistry";
    case Errc::IoFailure: return "IoFailure";
    case Errc::ReferenceError: return "ReferenceError";
  }
  return "Unknown";
}

std::string_view to_string(Kind kind) noexcept {
  switch (kind) {
    case Kind::Domain: return "domain";
    case Kind::PlainObject: return "object";
    case Kind::Sensor: return "sensor";
    case Kind::Actuator: return "actuator";
    case Kind::Agent: return "agent";
  }
  return "object";
}

Kind kind_from_string(std::string_view text) {
  if (text == "domain") return Kind::Domain;
  if (text == "object") return Kind::PlainObject;
  if (text == "sensor") return Kind::Sensor;
  if (text == "actuator") return Kind::Actuator;
  if (text == "agent") return Kind::Agent;
  throw Error(Errc::ParseError, "unknown object kind '" + std::string(text) + "'");
}

bool is_token(std::string_view text) noexcept {
  if (text.empty() || text.size() > 64) return false;
  for (char c : text) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::string format_scalar(double value) {
  if (value == 0.0) value = 0.0;  // folds -0 into 0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

double parse_scalar(std::string_view text) {
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(value)) {
    throw Error(Errc::ParseError, "not a scalar: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace adf
