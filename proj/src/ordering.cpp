#include "cord/ordering.hpp"

#include <algorithm>
#include <set>

#include "cord/errors.hpp"

namespace cord {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<std::vector<int>> strongly_connected_components(
    int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<int>> adj(n);
    for (const auto& [a, b] : edges) adj[a].push_back(b);

    std::vector<int> index(n, -1), lowlink(n, 0), on_stack(n, 0), iter(n, 0);
    std::vector<int> scc_stack;
    std::vector<std::vector<int>> components;
    int counter = 0;

    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<int> call_stack{root};
        while (!call_stack.empty()) {
            int v = call_stack.back();
            if (index[v] == -1) {
                index[v] = lowlink[v] = counter++;
                scc_stack.push_back(v);
                on_stack[v] = 1;
            }
            bool descended = false;
            while (iter[v] < static_cast<int>(adj[v].size())) {
                int w = adj[v][iter[v]++];
                if (index[w] == -1) {
                    call_stack.push_back(w);
                    descended = true;
                    break;
                }
                if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
            }
            if (descended) continue;
            call_stack.pop_back();
            if (!call_stack.empty()) {
                int parent = call_stack.back();
                lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
            }
            if (lowlink[v] == index[v]) {
                std::vector<int> component;
                int w;
                do {
                    w = scc_stack.back();
                    scc_stack.pop_back();
                    on_stack[w] = 0;
                    component.push_back(w);
                } while (w != v);
                std::sort(component.begin(), component.end());
                components.push_back(std::move(component));
            }
        }
    }
    return components;
}

OrientedGraph orient(const BipartiteView& g, const Matching& m) {
    if (!is_perfect(g, m))
        throw ValidationError("orientation requires a perfect matching");

    OrientedGraph out;
    out.vertices = g.vars();
    for (const auto& f : g.eqs()) out.vertices.push_back(f);
    for (const auto& [v, f] : g.edges()) {
        if (m.matches(v, f))
            out.edges.push_back({f, v});
        else
            out.edges.push_back({v, f});
    }
    return out;
}

int ClusterGraph::cluster_index(const std::string& vertex) const {
    auto it = cluster_of.find(vertex);
    if (it == cluster_of.end())
        throw ValidationError("unknown vertex: " + vertex);
    return it->second;
}

bool ClusterGraph::has_edge(const std::string& vertex, int cluster) const {
    for (const auto& [src, dst] : edges)
        if (src == vertex && dst == cluster) return true;
    return false;
}

bool ClusterGraph::contains_vertex(const std::string& vertex) const {
    return cluster_of.count(vertex) > 0;
}

bool MarkovDag::has_vertex(const std::string& v) const {
    return std::find(vertices.begin(), vertices.end(), v) != vertices.end();
}

bool MarkovDag::has_edge(const std::string& a, const std::string& b) const {
    return std::find(edges.begin(), edges.end(), std::make_pair(a, b)) != edges.end();
}

ClusterGraph causal_ordering_with(const IncidenceModel& model, const Matching& m) {
    BipartiteView g = bipartite_of(model);
    if (!is_perfect(g, m))
        throw ValidationError("causal ordering requires a perfect matching");

    int nv = static_cast<int>(g.vars().size());
    int total = nv + static_cast<int>(g.eqs().size());

    // Step 1: orientation as index edges. Variables occupy [0, nv),
    // equations [nv, total).
    std::vector<std::pair<int, int>> oriented;
    for (const auto& [v, f] : g.edges()) {
        int vi = g.var_index(v), fi = nv + g.eq_index(f);
        if (m.matches(v, f))
            oriented.push_back({fi, vi});
        else
            oriented.push_back({vi, fi});
    }

    // Step 2: strongly connected components, then merge every matched pair
    // into its component (clusters are S_i together with M(S_i)).
    auto sccs = strongly_connected_components(total, oriented);
    UnionFind uf(total);
    for (const auto& comp : sccs)
        for (std::size_t i = 1; i < comp.size(); ++i) uf.unite(comp[0], comp[i]);
    for (const auto& [v, f] : m.pairs) uf.unite(g.var_index(v), nv + g.eq_index(f));

    std::map<int, std::vector<std::string>> members;
    auto vertex_name = [&](int i) {
        return i < nv ? g.vars()[i] : g.eqs()[i - nv];
    };
    for (int i = 0; i < total; ++i) members[uf.find(i)].push_back(vertex_name(i));

    // Provisional clusters; exogenous and parameter singletons appended.
    struct ProtoCluster {
        ClusterKind kind;
        std::vector<std::string> mem;
    };
    std::vector<ProtoCluster> proto;
    std::map<std::string, int> cluster_of;
    for (auto& [root, mem] : members) {
        std::sort(mem.begin(), mem.end());
        for (const auto& name : mem) cluster_of[name] = static_cast<int>(proto.size());
        proto.push_back({ClusterKind::endogenous, mem});
    }
    for (const auto& w : model.exogenous) {
        cluster_of[w] = static_cast<int>(proto.size());
        proto.push_back({ClusterKind::exogenous, {w}});
    }
    for (const auto& p : model.parameters) {
        cluster_of[p] = static_cast<int>(proto.size());
        proto.push_back({ClusterKind::parameter, {p}});
    }

    // Step 3 plus singleton edges: vertex -> cluster of an equation it feeds.
    std::set<std::pair<std::string, int>> edge_set;
    for (const auto& [v, f] : g.edges()) {
        if (m.matches(v, f)) continue;
        int target = cluster_of[f];
        if (cluster_of[v] != target) edge_set.insert({v, target});
    }
    for (const auto& [w, f] : model.exo_edges) edge_set.insert({w, cluster_of[f]});
    for (const auto& [p, f] : model.param_edges) edge_set.insert({p, cluster_of[f]});

    // Topological order over clusters for stable naming: Kahn's algorithm,
    // ties broken by the lexicographically smallest member list.
    int nc = static_cast<int>(proto.size());
    std::vector<std::set<int>> succ(nc);
    std::vector<int> indegree(nc, 0);
    for (const auto& [src, dst] : edge_set) {
        int s = cluster_of[src];
        if (s != dst && succ[s].insert(dst).second) indegree[dst]++;
    }
    std::vector<int> order;
    std::vector<char> placed(nc, 0);
    while (static_cast<int>(order.size()) < nc) {
        int best = -1;
        for (int c = 0; c < nc; ++c) {
            if (placed[c] || indegree[c] != 0) continue;
            if (best == -1 || proto[c].mem < proto[best].mem) best = c;
        }
        if (best == -1)
            throw Error("cluster graph is cyclic");  // cannot happen: SCCs contracted
        placed[best] = 1;
        order.push_back(best);
        for (int d : succ[best]) indegree[d]--;
    }

    ClusterGraph co;
    co.variables = model.variables;
    co.equations = model.equations;
    co.exogenous = model.exogenous;
    co.parameters = model.parameters;
    std::vector<int> position(nc);
    for (int i = 0; i < nc; ++i) position[order[i]] = i;
    for (int i = 0; i < nc; ++i) {
        const auto& p = proto[order[i]];
        co.clusters.push_back({"C" + std::to_string(i), p.kind, p.mem});
    }
    for (const auto& [name, c] : cluster_of) co.cluster_of[name] = position[c];
    for (const auto& [src, dst] : edge_set) co.edges.push_back({src, position[dst]});
    std::sort(co.edges.begin(), co.edges.end());
    return co;
}

ClusterGraph causal_ordering(const IncidenceModel& model) {
    BipartiteView g = bipartite_of(model);
    Matching m = maximum_matching(g);
    if (!is_perfect(g, m)) {
        std::vector<std::string> witness;
        if (m.size() < g.eqs().size()) witness = deficiency_witness(g);
        throw NoPerfectMatchingError(
            "model " + model.name + " has no perfect matching between variables and equations",
            witness);
    }
    return causal_ordering_with(model, m);
}

MarkovDag markov_from(const ClusterGraph& co) {
    MarkovDag mo;
    mo.vertices = co.variables;
    for (const auto& w : co.exogenous) mo.vertices.push_back(w);

    std::set<std::string> params(co.parameters.begin(), co.parameters.end());
    for (const auto& [src, cluster] : co.edges) {
        if (params.count(src)) continue;
        for (const auto& member : co.clusters[cluster].members) {
            if (std::find(co.variables.begin(), co.variables.end(), member) !=
                co.variables.end())
                mo.edges.push_back({src, member});
        }
    }
    std::sort(mo.edges.begin(), mo.edges.end());
    mo.edges.erase(std::unique(mo.edges.begin(), mo.edges.end()), mo.edges.end());
    return mo;
}

MarkovDag markov_ordering(const IncidenceModel& model) {
    return markov_from(causal_ordering(model));
}

}  // namespace cord
