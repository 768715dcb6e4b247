#include "cord/query.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "cord/errors.hpp"

namespace cord {

namespace {

// Cluster successor lists: C -> C' when some vertex of C has an edge to C'.
std::vector<std::set<int>> cluster_successors(const ClusterGraph& co) {
    std::vector<std::set<int>> succ(co.clusters.size());
    for (const auto& [src, dst] : co.edges) {
        int s = co.cluster_index(src);
        if (s != dst) succ[s].insert(dst);
    }
    return succ;
}

std::set<int> reachable_clusters(const ClusterGraph& co, int start) {
    auto succ = cluster_successors(co);
    std::set<int> seen{start};
    std::deque<int> queue{start};
    while (!queue.empty()) {
        int c = queue.front();
        queue.pop_front();
        for (int d : succ[c])
            if (seen.insert(d).second) queue.push_back(d);
    }
    return seen;
}

EffectReport partition_effects(const ClusterGraph& co, const std::set<int>& reached,
                               std::string target, std::string kind) {
    EffectReport report;
    report.target = std::move(target);
    report.target_kind = std::move(kind);
    for (const auto& v : co.variables) {
        if (reached.count(co.cluster_index(v)))
            report.generic_affected.push_back(v);
        else
            report.unaffected.push_back(v);
    }
    return report;
}

}  // namespace

nlohmann::json EffectReport::to_json() const {
    return {{"target", target},
            {"target_kind", target_kind},
            {"generic_affected", generic_affected},
            {"unaffected", unaffected}};
}

bool cluster_reachable(const ClusterGraph& co, const std::string& x, const std::string& y) {
    int cx = co.cluster_index(x);
    int cy = co.cluster_index(y);
    if (cx == cy) return true;
    return reachable_clusters(co, cx).count(cy) > 0;
}

EffectReport soft_intervention_effects(const ClusterGraph& co, const std::string& target) {
    int c = co.cluster_index(target);  // throws on unknown target
    bool is_equation = std::find(co.equations.begin(), co.equations.end(), target) !=
                       co.equations.end();
    bool is_exo = std::find(co.exogenous.begin(), co.exogenous.end(), target) !=
                  co.exogenous.end();
    bool is_param = std::find(co.parameters.begin(), co.parameters.end(), target) !=
                    co.parameters.end();
    if (!is_equation && !is_exo && !is_param)
        throw ValidationError("soft intervention target must be an equation, parameter, or "
                              "exogenous variable: " + target);
    std::string kind = is_equation ? "equation" : (is_exo ? "exogenous" : "parameter");
    return partition_effects(co, reachable_clusters(co, c), target, kind);
}

EffectReport perfect_intervention_effects(const ClusterGraph& co, int cluster_index) {
    if (cluster_index < 0 || cluster_index >= static_cast<int>(co.clusters.size()))
        throw ValidationError("cluster index out of range");
    const Cluster& c = co.clusters[cluster_index];
    if (c.kind != ClusterKind::endogenous)
        throw ValidationError("perfect interventions target clusters containing equations; " +
                              c.name + " is a singleton " +
                              (c.kind == ClusterKind::exogenous ? std::string("exogenous")
                                                                : std::string("parameter")) +
                              " cluster");
    return partition_effects(co, reachable_clusters(co, cluster_index), c.name, "cluster");
}

int resolve_cluster(const ClusterGraph& co, const std::string& selector) {
    for (std::size_t i = 0; i < co.clusters.size(); ++i)
        if (co.clusters[i].name == selector) return static_cast<int>(i);
    return co.cluster_index(selector);
}

namespace {

struct DagIndex {
    std::map<std::string, int> id;
    std::vector<std::vector<int>> parents, children;

    explicit DagIndex(const MarkovDag& mo) {
        for (std::size_t i = 0; i < mo.vertices.size(); ++i)
            id[mo.vertices[i]] = static_cast<int>(i);
        parents.assign(mo.vertices.size(), {});
        children.assign(mo.vertices.size(), {});
        for (const auto& [a, b] : mo.edges) {
            parents[id.at(b)].push_back(id.at(a));
            children[id.at(a)].push_back(id.at(b));
        }
    }

    int require(const std::string& v) const {
        auto it = id.find(v);
        if (it == id.end()) throw ValidationError("unknown vertex: " + v);
        return it->second;
    }
};

std::set<int> ancestors_of(const DagIndex& dag, const std::set<int>& seeds) {
    std::set<int> seen = seeds;
    std::deque<int> queue(seeds.begin(), seeds.end());
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int p : dag.parents[v])
            if (seen.insert(p).second) queue.push_back(p);
    }
    return seen;
}

}  // namespace

bool d_separated(const MarkovDag& mo, const std::vector<std::string>& X,
                 const std::vector<std::string>& Y, const std::vector<std::string>& Z) {
    DagIndex dag(mo);
    auto to_ids = [&](const std::vector<std::string>& names) {
        std::set<int> ids;
        for (const auto& n : names) ids.insert(dag.require(n));
        return ids;
    };
    std::set<int> xs = to_ids(X), ys = to_ids(Y), zs = to_ids(Z);
    if (xs.empty() || ys.empty())
        throw ValidationError("d-separation query requires nonempty X and Y");
    for (int x : xs)
        if (ys.count(x) || zs.count(x))
            throw ValidationError("d-separation query sets must be pairwise disjoint");
    for (int y : ys)
        if (zs.count(y))
            throw ValidationError("d-separation query sets must be pairwise disjoint");

    // Ancestral subgraph of X ∪ Y ∪ Z, moralized, with Z removed; X and Y are
    // d-separated given Z iff they are disconnected in that graph.
    std::set<int> relevant;
    relevant.insert(xs.begin(), xs.end());
    relevant.insert(ys.begin(), ys.end());
    relevant.insert(zs.begin(), zs.end());
    std::set<int> anc = ancestors_of(dag, relevant);

    std::map<int, std::set<int>> moral;
    auto connect = [&](int a, int b) {
        moral[a].insert(b);
        moral[b].insert(a);
    };
    for (int v : anc) {
        std::vector<int> ps;
        for (int p : dag.parents[v])
            if (anc.count(p)) ps.push_back(p);
        for (int p : ps) connect(p, v);
        for (std::size_t i = 0; i < ps.size(); ++i)
            for (std::size_t j = i + 1; j < ps.size(); ++j) connect(ps[i], ps[j]);
    }

    std::set<int> seen = xs;
    std::deque<int> queue(xs.begin(), xs.end());
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        if (zs.count(v)) continue;  // conditioning vertices block traversal
        for (int w : moral[v]) {
            if (zs.count(w) || !anc.count(w)) continue;
            if (ys.count(w)) return false;
            if (seen.insert(w).second) queue.push_back(w);
        }
    }
    return true;
}

std::vector<IndependenceRow> implied_independence_table(const MarkovDag& mo,
                                                        int max_conditioning) {
    if (max_conditioning < 0)
        throw ValidationError("max_conditioning must be nonnegative");
    const auto& verts = mo.vertices;
    int n = static_cast<int>(verts.size());

    std::vector<IndependenceRow> rows;
    std::vector<int> rest;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            rest.clear();
            for (int k = 0; k < n; ++k)
                if (k != i && k != j) rest.push_back(k);

            // Conditioning subsets by size, then lexicographically by index.
            for (int size = 0; size <= max_conditioning &&
                               size <= static_cast<int>(rest.size()); ++size) {
                std::vector<int> pick(size);
                std::function<void(int, int)> emit = [&](int from, int depth) {
                    if (depth == size) {
                        IndependenceRow row;
                        row.x = verts[i];
                        row.y = verts[j];
                        for (int k : pick) row.given.push_back(verts[k]);
                        row.separated = d_separated(mo, {row.x}, {row.y}, row.given);
                        rows.push_back(std::move(row));
                        return;
                    }
                    for (int t = from; t < static_cast<int>(rest.size()); ++t) {
                        pick[depth] = rest[t];
                        emit(t + 1, depth + 1);
                    }
                };
                emit(0, 0);
            }
        }
    }
    return rows;
}

nlohmann::json to_json(const std::vector<IndependenceRow>& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table)
        rows.push_back(
            {{"x", r.x}, {"y", r.y}, {"given", r.given}, {"separated", r.separated}});
    return {{"version", 1}, {"rows", rows}};
}

}  // namespace cord
