#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cord/matching.hpp"
#include "cord/model.hpp"

namespace cord {

/// Orientation of a bipartite graph under a perfect matching: f -> v for
/// matched pairs, v -> f for every other incidence.
struct OrientedGraph {
    std::vector<std::string> vertices;  // variables then equations
    std::vector<std::pair<std::string, std::string>> edges;
};

OrientedGraph orient(const BipartiteView& g, const Matching& m);

enum class ClusterKind { endogenous, exogenous, parameter };

struct Cluster {
    std::string name;  // "C{i}" by topological order
    ClusterKind kind = ClusterKind::endogenous;
    std::vector<std::string> members;  // lexicographically sorted
};

/// Directed cluster graph: a partition of V ∪ F into clusters (plus singleton
/// clusters for exogenous variables and parameters) and directed edges from
/// vertices to clusters not containing them.
struct ClusterGraph {
    std::vector<Cluster> clusters;  // topological order
    std::vector<std::pair<std::string, int>> edges;  // (vertex, target cluster index)
    std::map<std::string, int> cluster_of;           // every vertex -> its cluster
    std::vector<std::string> variables, equations, exogenous, parameters;

    int cluster_index(const std::string& vertex) const;
    bool has_edge(const std::string& vertex, int cluster) const;
    bool contains_vertex(const std::string& vertex) const;
};

/// Directed acyclic graph over endogenous and exogenous vertices whose
/// d-separations imply conditional independences of the equilibrium
/// distribution. Edge x -> y iff the cluster graph has x -> cl(y).
struct MarkovDag {
    std::vector<std::string> vertices;  // variables then exogenous
    std::vector<std::pair<std::string, std::string>> edges;

    bool has_vertex(const std::string& v) const;
    bool has_edge(const std::string& a, const std::string& b) const;
};

/// Three-step causal ordering: orient by a perfect matching, contract
/// strongly connected components together with their matched partners, then
/// connect vertices to the clusters of equations they feed. Exogenous and
/// parameter singletons are appended with edges into the clusters of the
/// equations they appear in. The result does not depend on which perfect
/// matching is used. Throws NoPerfectMatchingError (with a deficiency
/// witness) when no perfect matching exists.
ClusterGraph causal_ordering(const IncidenceModel& model);

/// Same construction from a caller-supplied perfect matching.
ClusterGraph causal_ordering_with(const IncidenceModel& model, const Matching& m);

MarkovDag markov_ordering(const IncidenceModel& model);
MarkovDag markov_from(const ClusterGraph& co);

/// Iterative Tarjan; components in reverse topological order of discovery.
std::vector<std::vector<int>> strongly_connected_components(
    int n, const std::vector<std::pair<int, int>>& edges);

}  // namespace cord
