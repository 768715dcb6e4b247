#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cord/ordering.hpp"

namespace cord {

/// Generic-effect partition for one intervention target. Effects read off a
/// causal ordering graph hold generically (outside a measure-zero parameter
/// set), hence the report keeps the qualifier in its field names.
struct EffectReport {
    std::string target;
    std::string target_kind;  // equation | parameter | exogenous | cluster
    std::vector<std::string> generic_affected;
    std::vector<std::string> unaffected;

    nlohmann::json to_json() const;
};

/// Directed-path relation of the cluster graph: true iff cl(x) = cl(y) or a
/// chain of clusters connected by vertex->cluster edges leads from cl(x) to
/// cl(y).
bool cluster_reachable(const ClusterGraph& co, const std::string& x, const std::string& y);

/// Effects of a soft intervention targeting an equation, parameter, or
/// exogenous variable.
EffectReport soft_intervention_effects(const ClusterGraph& co, const std::string& target);

/// Effects of a perfect intervention on a cluster (must contain equation
/// vertices; exogenous/parameter singletons are not valid targets).
EffectReport perfect_intervention_effects(const ClusterGraph& co, int cluster_index);

/// Accepts a cluster label ("C2") or any member vertex.
int resolve_cluster(const ClusterGraph& co, const std::string& selector);

/// Standard d-separation verdict via reachability on the ancestral moral
/// graph. X, Y, Z must be pairwise disjoint subsets of the vertex set.
bool d_separated(const MarkovDag& mo, const std::vector<std::string>& X,
                 const std::vector<std::string>& Y, const std::vector<std::string>& Z);

struct IndependenceRow {
    std::string x, y;
    std::vector<std::string> given;
    bool separated;

    bool operator==(const IndependenceRow&) const = default;
};

/// Every unordered vertex pair with every conditioning set of size up to
/// max_conditioning, in deterministic order.
std::vector<IndependenceRow> implied_independence_table(const MarkovDag& mo,
                                                        int max_conditioning = 1);

nlohmann::json to_json(const std::vector<IndependenceRow>& table);

}  // namespace cord
