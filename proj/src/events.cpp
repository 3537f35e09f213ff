#include "adf/events.hpp"

#include "adf/error.hpp"
#include "adf/trace.hpp"

namespace adf {

std::string_view to_string(StopStatus status) noexcept {
  switch (status) {
    case StopStatus::Ok: return "ok";
    case StopStatus::Skipped: return "skipped";
    case StopStatus::Failed: return "failed";
  }
  return "failed";
}

std::string_view to_string(ActionKind kind) noexcept {
  switch (kind) {
    case ActionKind::GraphEdit: return "graph-edit";
    case ActionKind::Command: return "command";
    case ActionKind::AgentLaunch: return "agent";
  }
  return "graph-edit";
}

std::string render_payload(const ScalarMap& payload) {
  std::vector<std::string> parts;
  for (const auto& [k, v] : payload) parts.push_back(k + ":" + format_scalar(v));
  return join(parts);
}

ScalarMap parse_payload(std::string_view text) {
  ScalarMap out;
  if (text == "-") return out;
  for (const auto& part : split_list(text)) {
    auto colon = part.find(':');
    if (colon == std::string::npos) throw Error(Errc::ParseError, "payload entry '" + part + "' lacks ':'");
    std::string key = part.substr(0, colon);
    if (!is_token(key)) throw Error(Errc::ParseError, "bad payload key '" + key + "'");
    out[key] = parse_scalar(std::string_view(part).substr(colon + 1));
  }
  return out;
}

std::string describe(const ActuatorAction& action) {
  struct Visitor {
    std::string operator()(const ReconfigTxn& txn) const { return "edit[" + render_edits(txn) + "]"; }
    std::string operator()(const AdaptationCommand& c) const {
      return "cmd[" + std::to_string(c.from_domain.value) + ">" + std::to_string(c.to_domain.value) + ":" + c.verb +
             ":" + render_payload(c.args) + "]";
    }
    std::string operator()(const MobileAgent& a) const {
      std::vector<std::string> stops;
      for (const auto& p : a.itinerary) stops.push_back(p.relative_str());
      return "agent[" + a.action + ":" + join(stops, '+') + "]";
    }
  };
  return std::visit(Visitor{}, action.payload);
}

}  // namespace adf
