#pragma once

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cord/equilibrium.hpp"
#include "cord/matching.hpp"
#include "cord/ordering.hpp"
#include "cord/parser.hpp"

namespace testutil {

inline std::string fixture_path(const std::string& name) {
    return std::string(CORD_FIXTURE_DIR) + "/" + name;
}

inline cord::LoweredFile load_fixture(const std::string& name) {
    return cord::load_file(fixture_path(name));
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// --- canonical forms for graph comparison --------------------------------

using MemberSet = std::vector<std::string>;  // sorted
using ClusterSet = std::set<MemberSet>;
using ClusterEdgeSet = std::set<std::pair<std::string, MemberSet>>;

inline ClusterSet clusters_of(const cord::ClusterGraph& co) {
    ClusterSet out;
    for (const auto& c : co.clusters) out.insert(c.members);
    return out;
}

inline ClusterEdgeSet cluster_edges_of(const cord::ClusterGraph& co) {
    ClusterEdgeSet out;
    for (const auto& [src, dst] : co.edges) out.insert({src, co.clusters[dst].members});
    return out;
}

inline std::set<std::pair<std::string, std::string>> edge_set(
    const std::vector<std::pair<std::string, std::string>>& edges) {
    return {edges.begin(), edges.end()};
}

inline bool same_cluster_graph(const cord::ClusterGraph& a, const cord::ClusterGraph& b) {
    return clusters_of(a) == clusters_of(b) && cluster_edges_of(a) == cluster_edges_of(b);
}

// --- independent oracles ---------------------------------------------------

// Exhaustive maximum-matching size by recursion over variables.
inline int brute_force_max_matching(const cord::BipartiteView& g) {
    int nv = static_cast<int>(g.vars().size());
    std::vector<bool> eq_used(g.eqs().size(), false);
    std::function<int(int)> best = [&](int v) -> int {
        if (v == nv) return 0;
        int result = best(v + 1);  // leave v unmatched
        for (int f : g.var_adj(v)) {
            if (eq_used[f]) continue;
            eq_used[f] = true;
            result = std::max(result, 1 + best(v + 1));
            eq_used[f] = false;
        }
        return result;
    };
    return best(0);
}

// All perfect matchings by backtracking, as sets of (var, eq) name pairs.
inline std::set<std::set<std::pair<std::string, std::string>>> brute_force_perfect_matchings(
    const cord::BipartiteView& g) {
    std::set<std::set<std::pair<std::string, std::string>>> out;
    if (g.vars().size() != g.eqs().size()) return out;
    int nv = static_cast<int>(g.vars().size());
    std::vector<int> assigned(nv, -1);
    std::vector<bool> eq_used(g.eqs().size(), false);
    std::function<void(int)> rec = [&](int v) {
        if (v == nv) {
            std::set<std::pair<std::string, std::string>> m;
            for (int i = 0; i < nv; ++i) m.insert({g.vars()[i], g.eqs()[assigned[i]]});
            out.insert(std::move(m));
            return;
        }
        for (int f : g.var_adj(v)) {
            if (eq_used[f]) continue;
            eq_used[f] = true;
            assigned[v] = f;
            rec(v + 1);
            eq_used[f] = false;
        }
    };
    rec(0);
    return out;
}

// Hall condition check for a claimed witness.
inline bool hall_violated(const cord::BipartiteView& g, const std::vector<std::string>& eqs) {
    std::set<std::string> neighborhood;
    for (const auto& f : eqs) {
        int fi = g.eq_index(f);
        REQUIRE(fi >= 0);
        for (int v : g.eq_adj(fi)) neighborhood.insert(g.vars()[v]);
    }
    return neighborhood.size() < eqs.size();
}

// d-separation by exhaustive enumeration of simple paths with the classic
// blocking rules; independent of the moralization routine under test.
struct PathOracle {
    const cord::MarkovDag& mo;
    std::map<std::string, std::set<std::string>> parents, children, neighbors;

    explicit PathOracle(const cord::MarkovDag& dag) : mo(dag) {
        for (const auto& [a, b] : dag.edges) {
            parents[b].insert(a);
            children[a].insert(b);
            neighbors[a].insert(b);
            neighbors[b].insert(a);
        }
    }

    bool has_descendant_in(const std::string& v, const std::set<std::string>& zs) const {
        std::set<std::string> seen{v};
        std::vector<std::string> stack{v};
        while (!stack.empty()) {
            std::string cur = stack.back();
            stack.pop_back();
            if (zs.count(cur)) return true;
            auto it = children.find(cur);
            if (it == children.end()) continue;
            for (const auto& w : it->second)
                if (seen.insert(w).second) stack.push_back(w);
        }
        return false;
    }

    bool is_parent(const std::string& a, const std::string& b) const {
        auto it = parents.find(b);
        return it != parents.end() && it->second.count(a) > 0;
    }

    bool connected(const std::set<std::string>& xs, const std::set<std::string>& ys,
                   const std::set<std::string>& zs) const {
        for (const auto& x : xs) {
            std::vector<std::string> path{x};
            std::set<std::string> on_path{x};
            if (search(path, on_path, ys, zs)) return true;
        }
        return false;
    }

    bool search(std::vector<std::string>& path, std::set<std::string>& on_path,
                const std::set<std::string>& ys, const std::set<std::string>& zs) const {
        const std::string& tip = path.back();
        if (ys.count(tip)) return path_active(path, zs);
        auto it = neighbors.find(tip);
        if (it == neighbors.end()) return false;
        for (const auto& next : it->second) {
            if (on_path.count(next)) continue;
            path.push_back(next);
            on_path.insert(next);
            bool hit = ys.count(next) ? path_active(path, zs)
                                      : search(path, on_path, ys, zs);
            if (hit) return true;
            on_path.erase(next);
            path.pop_back();
        }
        return false;
    }

    bool path_active(const std::vector<std::string>& path,
                     const std::set<std::string>& zs) const {
        for (std::size_t i = 1; i + 1 < path.size(); ++i) {
            bool collider = is_parent(path[i - 1], path[i]) && is_parent(path[i + 1], path[i]);
            if (collider) {
                if (!has_descendant_in(path[i], zs)) return false;
            } else {
                if (zs.count(path[i])) return false;
            }
        }
        return true;
    }
};

inline bool oracle_d_separated(const cord::MarkovDag& mo, const std::vector<std::string>& X,
                               const std::vector<std::string>& Y,
                               const std::vector<std::string>& Z) {
    PathOracle oracle(mo);
    return !oracle.connected({X.begin(), X.end()}, {Y.begin(), Y.end()},
                             {Z.begin(), Z.end()});
}

// --- random structure generators (deterministic via RngStream) -------------

inline cord::MarkovDag random_dag(cord::RngStream& rng, int n, int edge_percent) {
    cord::MarkovDag dag;
    for (int i = 0; i < n; ++i) dag.vertices.push_back("x" + std::to_string(i));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.below(100) < edge_percent)
                dag.edges.push_back({dag.vertices[i], dag.vertices[j]});
    return dag;
}

// Bipartite graph with a planted perfect matching plus random extra edges.
inline cord::BipartiteView random_matchable_bipartite(cord::RngStream& rng, int n,
                                                      int edge_percent) {
    std::vector<std::string> vars, eqs;
    for (int i = 0; i < n; ++i) {
        vars.push_back("v" + std::to_string(i));
        eqs.push_back("f" + std::to_string(i));
    }
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    std::set<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) edges.insert({i, perm[i]});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (rng.below(100) < edge_percent) edges.insert({i, j});
    std::vector<std::pair<std::string, std::string>> named;
    for (const auto& [v, f] : edges) named.push_back({vars[v], eqs[f]});
    return cord::BipartiteView(vars, eqs, named);
}

inline cord::BipartiteView random_bipartite(cord::RngStream& rng, int nv, int nf,
                                            int edge_percent) {
    std::vector<std::string> vars, eqs;
    for (int i = 0; i < nv; ++i) vars.push_back("v" + std::to_string(i));
    for (int i = 0; i < nf; ++i) eqs.push_back("f" + std::to_string(i));
    std::vector<std::pair<std::string, std::string>> edges;
    for (int i = 0; i < nv; ++i)
        for (int j = 0; j < nf; ++j)
            if (rng.below(100) < edge_percent) edges.push_back({vars[i], eqs[j]});
    return cord::BipartiteView(vars, eqs, edges);
}

// Incidence model over a bare bipartite graph (no exogenous, no parameters).
inline cord::IncidenceModel model_of(const cord::BipartiteView& g) {
    cord::IncidenceModel m;
    m.name = "synthetic";
    m.variables = g.vars();
    m.equations = g.eqs();
    m.var_edges = g.edges();
    return m;
}

}  // namespace testutil
