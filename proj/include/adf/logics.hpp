#pragma once

#include <map>
#include <string>
#include <vector>

#include "adf/config_graph.hpp"
#include "adf/engine.hpp"

namespace adf {

class AgentDispatcher;

// Registers "healing", "rejuvenation", "optimization" and "supervisor".
void register_builtin_logics(LogicCatalog& catalog);

// Registers the agent actions "noop", "probe" and "rejuvenate".
void register_builtin_actions(AgentDispatcher& agents);

// Greedy placement used by healing: each stranded component, in id order,
// goes to the up candidate host with the most free resource (ties broken by
// host id); a placed component consumes `load` from its new host.
std::map<ComponentId, HostId> plan_placement(const std::vector<ComponentId>& stranded,
                                             std::map<HostId, double> free_by_host, double load);

}  // namespace adf
