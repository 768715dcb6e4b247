#pragma once

#include <string>

#include <json.hpp>

#include "cord/ordering.hpp"

namespace cord {

/// Deterministic DOT serialization. Endogenous clusters render as subgraph
/// boxes; exogenous singletons as dashed nodes; parameters as point nodes.
std::string to_dot(const OrientedGraph& g);
std::string to_dot(const ClusterGraph& co);
std::string to_dot(const MarkovDag& mo);

/// Versioned JSON documents.
nlohmann::json to_json(const OrientedGraph& g);
nlohmann::json to_json(const ClusterGraph& co);
nlohmann::json to_json(const MarkovDag& mo);

}  // namespace cord
