#include "cord/matching.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>

#include "cord/errors.hpp"

namespace cord {

namespace {

constexpr int kUnmatched = -1;
constexpr int kInf = std::numeric_limits<int>::max();

// Index-level Hopcroft-Karp. match_v[v] = equation index or -1.
struct HopcroftKarp {
    const BipartiteView& g;
    std::vector<int> match_v, match_f, dist;

    explicit HopcroftKarp(const BipartiteView& graph)
        : g(graph),
          match_v(graph.vars().size(), kUnmatched),
          match_f(graph.eqs().size(), kUnmatched),
          dist(graph.vars().size(), 0) {}

    bool bfs() {
        std::deque<int> queue;
        bool found_free_eq = false;
        for (std::size_t v = 0; v < match_v.size(); ++v) {
            if (match_v[v] == kUnmatched) {
                dist[v] = 0;
                queue.push_back(static_cast<int>(v));
            } else {
                dist[v] = kInf;
            }
        }
        int layer_limit = kInf;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            if (dist[v] >= layer_limit) continue;
            for (int f : g.var_adj(v)) {
                int next = match_f[f];
                if (next == kUnmatched) {
                    if (layer_limit == kInf) layer_limit = dist[v] + 1;
                    found_free_eq = true;
                } else if (dist[next] == kInf) {
                    dist[next] = dist[v] + 1;
                    queue.push_back(next);
                }
            }
        }
        return found_free_eq;
    }

    bool dfs(int v) {
        for (int f : g.var_adj(v)) {
            int next = match_f[f];
            if (next == kUnmatched || (dist[next] == dist[v] + 1 && dfs(next))) {
                match_v[v] = f;
                match_f[f] = v;
                return true;
            }
        }
        dist[v] = kInf;
        return false;
    }

    void run() {
        while (bfs()) {
            for (std::size_t v = 0; v < match_v.size(); ++v)
                if (match_v[v] == kUnmatched) dfs(static_cast<int>(v));
        }
    }
};

std::vector<int> match_vector(const BipartiteView& g, const Matching& m) {
    std::vector<int> match_v(g.vars().size(), kUnmatched);
    for (const auto& [v, f] : m.pairs) match_v[g.var_index(v)] = g.eq_index(f);
    return match_v;
}

Matching to_matching(const BipartiteView& g, const std::vector<int>& match_v) {
    Matching m;
    for (std::size_t v = 0; v < match_v.size(); ++v)
        if (match_v[v] != kUnmatched)
            m.pairs.push_back({g.vars()[v], g.eqs()[match_v[v]]});
    return m;
}

// Finds one directed cycle in the orientation induced by a perfect matching
// (f -> v for matched pairs, v -> f otherwise), as a list of matched
// (v, f) index pairs along the cycle. Empty when the orientation is acyclic.
// Every cycle alternates matched and unmatched edges, so it is determined by
// the variable sequence: v -> f' (unmatched incidence), then f' -> match(f').
std::vector<std::pair<int, int>> find_alternating_cycle(const BipartiteView& g,
                                                        const std::vector<int>& match_v,
                                                        const std::vector<int>& match_f) {
    int n = static_cast<int>(g.vars().size());
    std::vector<int> state(n, 0);  // 0 unseen, 1 on stack, 2 done
    std::vector<int> parent(n, -1);
    std::vector<int> iter(n, 0);
    for (int start = 0; start < n; ++start) {
        if (state[start] != 0) continue;
        std::vector<int> stack{start};
        state[start] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            const auto& adj = g.var_adj(v);
            bool pushed = false;
            while (iter[v] < static_cast<int>(adj.size())) {
                int f = adj[iter[v]++];
                if (f == match_v[v]) continue;  // matched edge points back at v
                int w = match_f[f];             // successor variable through f
                if (state[w] == 1) {
                    // Cycle: w .. v, closing back to w. Each cycle variable
                    // contributes its matched edge.
                    std::vector<int> vars_on_cycle{v};
                    for (int cur = v; cur != w;) {
                        cur = parent[cur];
                        vars_on_cycle.push_back(cur);
                    }
                    std::reverse(vars_on_cycle.begin(), vars_on_cycle.end());
                    std::vector<std::pair<int, int>> cycle;
                    for (int u : vars_on_cycle) cycle.push_back({u, match_v[u]});
                    return cycle;
                }
                if (state[w] == 0) {
                    state[w] = 1;
                    parent[w] = v;
                    stack.push_back(w);
                    pushed = true;
                    break;
                }
            }
            if (!pushed && iter[v] >= static_cast<int>(adj.size())) {
                state[v] = 2;
                stack.pop_back();
            }
        }
    }
    return {};
}

struct Enumerator {
    std::size_t limit;
    std::vector<Matching>& out;
    bool truncated = false;

    // Sub-problem: subset of vertices still active plus forbidden edges.
    void recurse(const BipartiteView& g,
                 std::vector<std::pair<std::string, std::string>> forced) {
        if (out.size() >= limit) {
            truncated = true;
            return;
        }
        if (g.vars().empty()) {
            Matching m;
            m.pairs = std::move(forced);
            std::sort(m.pairs.begin(), m.pairs.end());
            out.push_back(std::move(m));
            return;
        }
        HopcroftKarp hk(g);
        hk.run();
        for (int f : hk.match_f)
            if (f == kUnmatched) return;  // no perfect matching here
        for (int v : hk.match_v)
            if (v == kUnmatched) return;

        auto cycle = find_alternating_cycle(g, hk.match_v, hk.match_f);
        if (cycle.empty()) {
            // Unique perfect matching for this sub-problem.
            Matching m = to_matching(g, hk.match_v);
            for (const auto& p : forced) m.pairs.push_back(p);
            std::sort(m.pairs.begin(), m.pairs.end());
            out.push_back(std::move(m));
            return;
        }

        auto [v, f] = *std::min_element(cycle.begin(), cycle.end());
        const std::string var = g.vars()[v];
        const std::string eq = g.eqs()[f];

        // Branch 1: matchings containing (var, eq).
        {
            std::vector<std::string> vars, eqs;
            for (const auto& x : g.vars())
                if (x != var) vars.push_back(x);
            for (const auto& x : g.eqs())
                if (x != eq) eqs.push_back(x);
            std::vector<std::pair<std::string, std::string>> edges;
            for (const auto& e : g.edges())
                if (e.first != var && e.second != eq) edges.push_back(e);
            auto forced2 = forced;
            forced2.push_back({var, eq});
            recurse(BipartiteView(vars, eqs, edges), std::move(forced2));
        }
        // Branch 2: matchings avoiding the edge (var, eq). The alternating
        // cycle guarantees this branch still has a perfect matching.
        {
            std::vector<std::pair<std::string, std::string>> edges;
            for (const auto& e : g.edges())
                if (!(e.first == var && e.second == eq)) edges.push_back(e);
            recurse(BipartiteView(g.vars(), g.eqs(), edges), std::move(forced));
        }
    }
};

}  // namespace

bool Matching::matches(const std::string& var, const std::string& eq) const {
    for (const auto& [v, f] : pairs)
        if (v == var && f == eq) return true;
    return false;
}

std::string Matching::equation_of(const std::string& var) const {
    for (const auto& [v, f] : pairs)
        if (v == var) return f;
    return {};
}

void Matching::validate(const BipartiteView& g) const {
    std::set<std::string> vars, eqs;
    for (const auto& [v, f] : pairs) {
        if (!vars.insert(v).second)
            throw ValidationError("variable matched twice: " + v);
        if (!eqs.insert(f).second)
            throw ValidationError("equation matched twice: " + f);
        int vi = g.var_index(v), fi = g.eq_index(f);
        if (vi < 0 || fi < 0 || !g.has_edge(vi, fi))
            throw ValidationError("matching pair is not a graph edge: (" + v + ", " + f + ")");
    }
}

Matching maximum_matching(const BipartiteView& g) {
    HopcroftKarp hk(g);
    hk.run();
    return to_matching(g, hk.match_v);
}

bool is_perfect(const BipartiteView& g, const Matching& m) {
    m.validate(g);
    return m.size() == g.vars().size() && m.size() == g.eqs().size();
}

MatchingEnumeration enumerate_perfect_matchings(const BipartiteView& g, std::size_t limit) {
    if (limit < 1) throw ValidationError("enumeration limit must be at least 1");
    MatchingEnumeration result;
    if (g.vars().size() != g.eqs().size()) return result;
    Enumerator en{limit, result.matchings};
    en.recurse(g, {});
    result.truncated = en.truncated;
    return result;
}

std::vector<std::string> deficiency_witness(const BipartiteView& g) {
    Matching m = maximum_matching(g);
    if (is_perfect(g, m))
        throw ValidationError("graph has a perfect matching; no deficiency witness exists");

    std::vector<int> match_v = match_vector(g, m);
    std::vector<int> match_f(g.eqs().size(), kUnmatched);
    for (std::size_t v = 0; v < match_v.size(); ++v)
        if (match_v[v] != kUnmatched) match_f[match_v[v]] = static_cast<int>(v);

    int start = kUnmatched;
    for (std::size_t f = 0; f < match_f.size(); ++f)
        if (match_f[f] == kUnmatched) {
            start = static_cast<int>(f);
            break;
        }
    if (start == kUnmatched)
        throw ValidationError(
            "all equations are matched; the deficiency lies on the variable side");

    // Alternating reachability from an unmatched equation: eq -> adjacent
    // variables, variable -> its matched equation. Every reached variable is
    // matched (otherwise an augmenting path would exist), so the reached
    // equations form a Hall violator.
    std::set<int> seen_f{start}, seen_v;
    std::deque<int> queue{start};
    while (!queue.empty()) {
        int f = queue.front();
        queue.pop_front();
        for (int v : g.eq_adj(f)) {
            if (seen_v.insert(v).second) {
                int fm = match_v[v];
                if (fm != kUnmatched && seen_f.insert(fm).second) queue.push_back(fm);
            }
        }
    }
    std::vector<std::string> witness;
    for (int f : seen_f) witness.push_back(g.eqs()[f]);
    std::sort(witness.begin(), witness.end());
    return witness;
}

}  // namespace cord
