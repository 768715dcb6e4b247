#include "cord/extension.hpp"

#include <algorithm>
#include <map>

#include "cord/errors.hpp"
#include "cord/matching.hpp"
#include "cord/query.hpp"

namespace cord {

namespace {

nlohmann::json matching_json(const Matching& m) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [v, f] : m.pairs) pairs.push_back({{"variable", v}, {"equation", f}});
    return {{"matching", pairs}};
}

// Perfect-matchability condition with a matching or witness certificate.
Condition matchability(const std::string& name, const BipartiteView& g) {
    Condition c;
    c.name = name;
    Matching m = maximum_matching(g);
    if (is_perfect(g, m)) {
        c.holds = true;
        c.certificate = matching_json(m);
    } else {
        c.holds = false;
        if (m.size() < g.eqs().size()) {
            c.certificate = {{"deficient_equations", deficiency_witness(g)}};
        } else {
            c.certificate = {{"side_mismatch",
                              {{"variables", g.vars().size()}, {"equations", g.eqs().size()}}}};
        }
    }
    return c;
}

}  // namespace

nlohmann::json RobustnessVerdict::to_json() const {
    nlohmann::json conds = nlohmann::json::array();
    for (const auto& c : conditions)
        conds.push_back({{"name", c.name}, {"holds", c.holds}, {"certificate", c.certificate}});
    return {{"check", check},
            {"conditions", conds},
            {"guarantees", guarantees},
            {"applicable", applicable}};
}

RobustnessVerdict check_presence_preservation(const ExtensionSpec& ext) {
    ext.validate();
    RobustnessVerdict verdict;
    verdict.check = "presence_preservation";
    verdict.conditions.push_back(matchability("base_perfect_matching", bipartite_of(ext.base)));
    verdict.conditions.push_back(
        matchability("extension_perfect_matching", extension_bipartite(ext)));

    verdict.applicable = verdict.conditions[0].holds && verdict.conditions[1].holds;
    if (verdict.applicable) {
        // The union of the two matchings is a perfect matching of the merged
        // graph; recorded as the certificate of the implied conclusion.
        Condition merged = matchability("extended_perfect_matching", bipartite_of(merged_model(ext)));
        if (!merged.holds)
            throw Error("internal error: merged model lost its perfect matching");
        verdict.conditions.push_back(merged);
        verdict.guarantees = {"presence_ancestral", "presence_dconn"};
    }
    return verdict;
}

RobustnessVerdict check_absence_preservation(const ExtensionSpec& ext) {
    ext.validate();
    RobustnessVerdict verdict;
    verdict.check = "absence_preservation";
    verdict.conditions.push_back(matchability("base_perfect_matching", bipartite_of(ext.base)));
    verdict.conditions.push_back(
        matchability("extension_perfect_matching", extension_bipartite(ext)));

    // No added variable may touch a base equation in the merged graph.
    // Promotion rewrites former exogenous/parameter incidences into variable
    // edges, so promoted symbols appearing in base equations show up here.
    IncidenceModel merged = merged_model(ext);
    std::set<std::string> added(ext.added_variables.begin(), ext.added_variables.end());
    std::set<std::string> base_eqs(ext.base.equations.begin(), ext.base.equations.end());
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& [v, f] : merged.var_edges)
        if (added.count(v) && base_eqs.count(f))
            violations.push_back({{"variable", v}, {"equation", f}});
    Condition adjacency;
    adjacency.name = "added_variables_not_adjacent_to_base_equations";
    adjacency.holds = violations.empty();
    adjacency.certificate = {{"adjacent_pairs", violations}};
    verdict.conditions.push_back(adjacency);

    verdict.applicable = std::all_of(verdict.conditions.begin(), verdict.conditions.end(),
                                     [](const Condition& c) { return c.holds; });
    if (verdict.applicable) verdict.guarantees = {"absence_ancestral", "absence_dconn"};
    return verdict;
}

RobustnessVerdict check_self_regulating(const DynamicalModel& base,
                                        const DynamicalModel& ext_dyn) {
    base.validate();
    ext_dyn.validate();
    for (const auto& v : ext_dyn.variables)
        if (std::find(base.variables.begin(), base.variables.end(), v) != base.variables.end())
            throw ValidationError("extension redeclares base variable: " + v);

    RobustnessVerdict verdict;
    verdict.check = "self_regulating";
    auto check_model = [](const std::string& name, const DynamicalModel& dyn) {
        Condition c;
        c.name = name;
        nlohmann::json failing = nlohmann::json::array();
        for (const auto& v : dyn.variables)
            if (!dyn.is_self_regulating(v)) failing.push_back(v);
        c.holds = failing.empty();
        if (c.holds) {
            // Natural labelling: every variable matched to its own
            // equilibrium equation.
            nlohmann::json pairs = nlohmann::json::array();
            for (const auto& v : dyn.variables)
                pairs.push_back({{"variable", v}, {"equation", "f_" + v}});
            c.certificate = {{"natural_matching", pairs}};
        } else {
            c.certificate = {{"non_self_regulating", failing}};
        }
        return c;
    };
    verdict.conditions.push_back(check_model("base_all_self_regulating", base));
    verdict.conditions.push_back(check_model("extension_all_self_regulating", ext_dyn));
    verdict.applicable = verdict.conditions[0].holds && verdict.conditions[1].holds;
    if (verdict.applicable) verdict.guarantees = {"presence_ancestral", "presence_dconn"};
    return verdict;
}

nlohmann::json FeedbackReport::to_json() const {
    return {{"cycles", cycles}, {"truncated", truncated}};
}

namespace {

// Johnson's simple-cycle enumeration, capped.
struct CycleFinder {
    const std::vector<std::vector<int>>& adj;
    std::size_t cap;
    std::vector<std::vector<int>> cycles;
    bool truncated = false;

    std::vector<char> blocked;
    std::vector<std::set<int>> block_map;
    std::vector<int> stack;
    int root = 0;

    CycleFinder(const std::vector<std::vector<int>>& a, std::size_t cap_)
        : adj(a), cap(cap_), blocked(a.size(), 0), block_map(a.size()) {}

    void unblock(int v) {
        blocked[v] = 0;
        for (int w : std::set<int>(block_map[v])) {
            block_map[v].erase(w);
            if (blocked[w]) unblock(w);
        }
    }

    bool circuit(int v) {
        if (truncated) return false;
        bool found = false;
        stack.push_back(v);
        blocked[v] = 1;
        for (int w : adj[v]) {
            if (w < root) continue;  // only consider the subgraph from root up
            if (w == root) {
                if (cycles.size() >= cap) {
                    truncated = true;
                    break;
                }
                cycles.push_back(stack);
                found = true;
            } else if (!blocked[w]) {
                if (circuit(w)) found = true;
                if (truncated) break;
            }
        }
        if (found) {
            unblock(v);
        } else {
            for (int w : adj[v])
                if (w >= root) block_map[w].insert(v);
        }
        stack.pop_back();
        return found;
    }

    void run() {
        int n = static_cast<int>(adj.size());
        for (root = 0; root < n && !truncated; ++root) {
            std::fill(blocked.begin(), blocked.end(), 0);
            for (auto& s : block_map) s.clear();
            circuit(root);
        }
    }
};

}  // namespace

FeedbackReport detect_new_feedback(const DynamicalModel& ext_dyn,
                                   const std::set<std::string>& base_vars,
                                   std::size_t max_cycles) {
    ext_dyn.validate();
    for (const auto& v : base_vars)
        if (std::find(ext_dyn.variables.begin(), ext_dyn.variables.end(), v) ==
            ext_dyn.variables.end())
            throw ValidationError("base variable not present in extended dynamics: " + v);

    // Natural bipartite structure: incidence of every ODE plus the natural
    // labelling edges, oriented by the natural matching.
    int nv = static_cast<int>(ext_dyn.variables.size());
    std::map<std::string, int> var_id;
    for (int i = 0; i < nv; ++i) var_id[ext_dyn.variables[i]] = i;

    std::vector<std::vector<int>> adj(2 * nv);  // vars [0,nv), equations [nv,2nv)
    for (int i = 0; i < nv; ++i) {
        const std::string& v = ext_dyn.variables[i];
        adj[nv + i].push_back(i);  // matched natural edge f_i -> v_i
        for (const auto& dep : ext_dyn.odes.at(v).deps) {
            auto it = var_id.find(dep);
            if (it == var_id.end() || it->second == i) continue;
            adj[it->second].push_back(nv + i);  // unmatched incidence dep -> f_i
        }
    }

    CycleFinder finder(adj, max_cycles);
    finder.run();

    FeedbackReport report;
    report.truncated = finder.truncated;
    for (const auto& cyc : finder.cycles) {
        bool touches_base = false, touches_added = false;
        for (int idx : cyc) {
            if (idx >= nv) continue;
            if (base_vars.count(ext_dyn.variables[idx]))
                touches_base = true;
            else
                touches_added = true;
        }
        if (!(touches_base && touches_added)) continue;
        std::vector<std::string> named;
        for (int idx : cyc)
            named.push_back(idx < nv ? ext_dyn.variables[idx]
                                     : "f_" + ext_dyn.variables[idx - nv]);
        report.cycles.push_back(std::move(named));
    }
    return report;
}

nlohmann::json DiagnosisReport::to_json() const {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& f : findings)
        items.push_back({{"observation",
                          {{"x", f.observation.x},
                           {"y", f.observation.y},
                           {"given", f.observation.given},
                           {"independent", f.observation.independent}}},
                         {"findings", f.findings},
                         {"assumptions", f.assumptions}});
    return {{"version", 1}, {"findings", items}};
}

DiagnosisReport diagnose(const MarkovDag& base_mo,
                         const std::vector<Observation>& observations) {
    DiagnosisReport report;
    for (const auto& obs : observations) {
        bool separated = d_separated(base_mo, {obs.x}, {obs.y}, obs.given);
        if (!obs.independent || separated) continue;
        // An observed independence the submodel cannot produce: any correct
        // extension must break the sufficient conditions for d-connection
        // preservation.
        DiagnosisFinding finding;
        finding.observation = obs;
        finding.findings = {"extension_contains_non_self_regulating_variable",
                            "extension_introduces_new_feedback_loop"};
        finding.assumptions = {"faithfulness", "submodel_correctness"};
        report.findings.push_back(std::move(finding));
    }
    return report;
}

}  // namespace cord
