#include "cord/model.hpp"

#include <algorithm>
#include <set>

#include "cord/errors.hpp"

namespace cord {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

template <typename T>
bool contains(const std::vector<T>& xs, const T& x) {
    return std::find(xs.begin(), xs.end(), x) != xs.end();
}

void check_no_duplicates(const std::vector<std::string>& ids, const std::string& what) {
    std::set<std::string> seen;
    for (const auto& id : ids)
        require(seen.insert(id).second, "duplicate " + what + " identifier: " + id);
}

void check_disjoint(const std::vector<std::string>& a, const std::vector<std::string>& b,
                    const std::string& what) {
    for (const auto& id : a)
        require(!contains(b, id), "identifier declared in two roles (" + what + "): " + id);
}

std::map<std::string, int> index_of(const std::vector<std::string>& ids) {
    std::map<std::string, int> m;
    for (int i = 0; i < static_cast<int>(ids.size()); ++i) m[ids[i]] = i;
    return m;
}

}  // namespace

void Distribution::validate(const std::string& owner) const {
    switch (kind) {
        case Kind::log_normal:
            require(b > 0.0, "LogNormal sigma must be positive for " + owner);
            break;
        case Kind::uniform:
            require(a > 0.0, "Uniform lower bound must be strictly positive for " + owner);
            require(b > a, "Uniform requires lo < hi for " + owner);
            break;
    }
}

bool IncidenceModel::has_variable(const std::string& v) const { return contains(variables, v); }
bool IncidenceModel::has_equation(const std::string& f) const { return contains(equations, f); }

void IncidenceModel::validate() const {
    check_no_duplicates(variables, "variable");
    check_no_duplicates(equations, "equation");
    check_no_duplicates(exogenous, "exogenous");
    check_no_duplicates(parameters, "parameter");
    check_disjoint(variables, exogenous, name);
    check_disjoint(variables, parameters, name);
    check_disjoint(variables, equations, name);
    check_disjoint(exogenous, parameters, name);
    check_disjoint(exogenous, equations, name);
    check_disjoint(parameters, equations, name);

    for (const auto& [v, f] : var_edges) {
        require(contains(variables, v), "edge references undeclared variable: " + v);
        require(contains(equations, f), "edge references undeclared equation: " + f);
    }
    for (const auto& [w, f] : exo_edges) {
        require(contains(exogenous, w), "edge references undeclared exogenous: " + w);
        require(contains(equations, f), "edge references undeclared equation: " + f);
    }
    for (const auto& [p, f] : param_edges) {
        require(contains(parameters, p), "edge references undeclared parameter: " + p);
        require(contains(equations, f), "edge references undeclared equation: " + f);
    }
    for (const auto& [w, dist] : distributions) {
        require(contains(exogenous, w), "distribution on undeclared exogenous: " + w);
        dist.validate(w);
    }
    for (const auto& [p, _] : param_values)
        require(contains(parameters, p), "value for undeclared parameter: " + p);
    for (const auto& v : positive)
        require(contains(variables, v), "positivity flag on undeclared variable: " + v);

    // A residual's free symbols must be exactly the equation's neighborhood.
    for (const auto& [f, expr] : residuals) {
        require(contains(equations, f), "residual for undeclared equation: " + f);
        std::set<std::string> neighbors;
        for (const auto& [v, g] : var_edges)
            if (g == f) neighbors.insert(v);
        for (const auto& [w, g] : exo_edges)
            if (g == f) neighbors.insert(w);
        for (const auto& [p, g] : param_edges)
            if (g == f) neighbors.insert(p);
        require(free_symbols(*expr) == neighbors,
                "residual symbols of " + f + " do not match its declared incidence");
    }
}

bool DynamicalModel::is_self_regulating(const std::string& v) const {
    auto it = self_regulating.find(v);
    return it != self_regulating.end() && it->second;
}

void DynamicalModel::validate() const {
    check_no_duplicates(variables, "variable");
    check_no_duplicates(exogenous, "exogenous");
    check_no_duplicates(parameters, "parameter");
    check_disjoint(variables, exogenous, name);
    check_disjoint(variables, parameters, name);
    check_disjoint(exogenous, parameters, name);

    require(odes.size() == variables.size(),
            "canonical form requires exactly one ODE per variable in " + name);
    for (const auto& v : variables)
        require(odes.count(v) == 1, "missing ODE for variable " + v);
    for (const auto& [v, ode] : odes) {
        require(contains(variables, v), "ODE for undeclared variable: " + v);
        if (ode.rhs) {
            auto syms = free_symbols(*ode.rhs);
            require(std::set<std::string>(ode.deps.begin(), ode.deps.end()) == syms,
                    "dependency set of " + v + " does not match its expression");
        }
        for (const auto& d : ode.deps)
            require(contains(variables, d) || contains(exogenous, d) || contains(parameters, d),
                    "ODE of " + v + " references undeclared symbol: " + d);
    }
    for (const auto& [v, flag] : self_regulating) {
        require(contains(variables, v), "self-regulation flag on undeclared variable: " + v);
        if (flag)
            require(contains(odes.at(v).deps, v),
                    "variable " + v + " flagged self-regulating but absent from its own ODE");
    }
    for (const auto& v : positive)
        require(contains(variables, v), "positivity flag on undeclared variable: " + v);
    for (const auto& [w, dist] : distributions) {
        require(contains(exogenous, w), "distribution on undeclared exogenous: " + w);
        dist.validate(w);
    }
}

void ExtensionSpec::validate() const {
    base.validate();
    check_no_duplicates(added_variables, "added variable");
    check_no_duplicates(added_equations, "added equation");
    for (const auto& v : added_variables)
        require(!base.has_variable(v), "added variable collides with base variable: " + v);
    for (const auto& f : added_equations)
        require(!base.has_equation(f), "added equation collides with base equation: " + f);

    for (const auto& [from, to] : promotions) {
        require(contains(base.exogenous, from) || contains(base.parameters, from),
                "promotion of unknown exogenous/parameter: " + from);
        require(contains(added_variables, to),
                "promoted identifier " + to + " must be a member of the added variables");
    }
    for (const auto& [v, f] : eq_var_edges) {
        require(contains(added_equations, f), "extension edge on unknown equation: " + f);
        require(base.has_variable(v) || contains(added_variables, v),
                "extension equation " + f + " references undeclared variable: " + v);
    }
}

BipartiteView::BipartiteView(std::vector<std::string> vars, std::vector<std::string> eqs,
                             std::vector<std::pair<std::string, std::string>> edges)
    : vars_(std::move(vars)), eqs_(std::move(eqs)) {
    var_index_ = index_of(vars_);
    eq_index_ = index_of(eqs_);
    var_adj_.assign(vars_.size(), {});
    eq_adj_.assign(eqs_.size(), {});

    std::vector<std::pair<int, int>> idx_edges;
    std::set<std::pair<int, int>> seen;
    for (const auto& [v, f] : edges) {
        auto vi = var_index_.find(v);
        auto fi = eq_index_.find(f);
        require(vi != var_index_.end(), "bipartite edge references unknown variable: " + v);
        require(fi != eq_index_.end(), "bipartite edge references unknown equation: " + f);
        if (seen.insert({vi->second, fi->second}).second)
            idx_edges.push_back({vi->second, fi->second});
    }
    std::sort(idx_edges.begin(), idx_edges.end());
    for (const auto& [vi, fi] : idx_edges) {
        edges_.push_back({vars_[vi], eqs_[fi]});
        var_adj_[vi].push_back(fi);
        eq_adj_[fi].push_back(vi);
    }
}

int BipartiteView::var_index(const std::string& v) const {
    auto it = var_index_.find(v);
    return it == var_index_.end() ? -1 : it->second;
}

int BipartiteView::eq_index(const std::string& f) const {
    auto it = eq_index_.find(f);
    return it == eq_index_.end() ? -1 : it->second;
}

bool BipartiteView::has_edge(int v, int f) const {
    const auto& adj = var_adj_[v];
    return std::find(adj.begin(), adj.end(), f) != adj.end();
}

BipartiteView bipartite_of(const IncidenceModel& model) {
    model.validate();
    return BipartiteView(model.variables, model.equations, model.var_edges);
}

BipartiteView extension_bipartite(const ExtensionSpec& ext) {
    ext.validate();
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& [v, f] : ext.eq_var_edges) {
        // Base variables appearing in F+ are treated as exogenous: no vertex.
        if (std::find(ext.added_variables.begin(), ext.added_variables.end(), v) !=
            ext.added_variables.end())
            edges.push_back({v, f});
    }
    return BipartiteView(ext.added_variables, ext.added_equations, edges);
}

IncidenceModel merged_model(const ExtensionSpec& ext) {
    ext.validate();
    const IncidenceModel& base = ext.base;

    std::map<std::string, std::string> renamed;  // base symbol -> endogenous name
    for (const auto& [from, to] : ext.promotions) renamed[from] = to;

    IncidenceModel merged;
    merged.name = ext.name;
    merged.variables = base.variables;
    for (const auto& v : ext.added_variables) merged.variables.push_back(v);
    merged.equations = base.equations;
    for (const auto& f : ext.added_equations) merged.equations.push_back(f);

    for (const auto& w : base.exogenous)
        if (!renamed.count(w)) merged.exogenous.push_back(w);
    for (const auto& w : ext.added_exogenous) merged.exogenous.push_back(w);
    for (const auto& p : base.parameters)
        if (!renamed.count(p)) merged.parameters.push_back(p);
    for (const auto& p : ext.added_parameters) merged.parameters.push_back(p);

    merged.var_edges = base.var_edges;
    for (const auto& [w, f] : base.exo_edges) {
        auto it = renamed.find(w);
        if (it != renamed.end())
            merged.var_edges.push_back({it->second, f});
        else
            merged.exo_edges.push_back({w, f});
    }
    for (const auto& [p, f] : base.param_edges) {
        auto it = renamed.find(p);
        if (it != renamed.end())
            merged.var_edges.push_back({it->second, f});
        else
            merged.param_edges.push_back({p, f});
    }
    for (const auto& e : ext.eq_var_edges) merged.var_edges.push_back(e);
    for (const auto& e : ext.eq_exo_edges) merged.exo_edges.push_back(e);
    for (const auto& e : ext.eq_param_edges) merged.param_edges.push_back(e);

    for (const auto& [f, expr] : base.residuals) {
        ExprPtr r = expr;
        for (const auto& [from, to] : ext.promotions) r = rename_symbol(r, from, to);
        merged.residuals[f] = r;
    }
    for (const auto& [f, expr] : ext.residuals) merged.residuals[f] = expr;

    for (const auto& [w, d] : base.distributions)
        if (!renamed.count(w)) merged.distributions[w] = d;
    for (const auto& [w, d] : ext.distributions) merged.distributions[w] = d;
    for (const auto& [p, v] : base.param_values)
        if (!renamed.count(p)) merged.param_values[p] = v;
    for (const auto& [p, v] : ext.param_values) merged.param_values[p] = v;

    merged.positive = base.positive;
    for (const auto& v : ext.positive)
        if (!contains(merged.positive, v)) merged.positive.push_back(v);

    merged.validate();
    return merged;
}

EquilibriumResult equilibrium_of(const DynamicalModel& dyn,
                                 const std::map<std::string, bool>& positivity) {
    dyn.validate();
    for (const auto& [v, on] : positivity)
        if (on)
            require(contains(dyn.variables, v), "positivity flag on undeclared variable: " + v);

    EquilibriumResult out;
    IncidenceModel& model = out.model;
    model.name = dyn.name + "_equilibrium";
    model.variables = dyn.variables;
    model.exogenous = dyn.exogenous;
    model.parameters = dyn.parameters;
    model.distributions = dyn.distributions;
    model.param_values = dyn.param_values;
    model.positive = dyn.positive;

    for (const auto& v : dyn.variables) {
        const Ode& ode = dyn.odes.at(v);
        std::string f = "f_" + v;
        model.equations.push_back(f);

        std::vector<std::string> deps = ode.deps;
        ExprPtr residual = ode.rhs;
        auto pos = positivity.find(v);
        if (pos != positivity.end() && pos->second) {
            if (!ode.rhs)
                throw ValidationError("positivity for " + v +
                                      " requires an explicit ODE expression");
            auto reduced = remove_linear_factor(ode.rhs, v);
            if (!reduced)
                throw ValidationError("positivity requested for " + v +
                                      " but its ODE is not of the form h(X)*" + v);
            residual = *reduced;
            auto remaining = free_symbols(**reduced);
            std::vector<std::string> kept;
            for (const auto& d : deps)
                if (remaining.count(d)) kept.push_back(d);
            deps = kept;
        }

        for (const auto& d : deps) {
            if (contains(dyn.variables, d))
                model.var_edges.push_back({d, f});
            else if (contains(dyn.exogenous, d))
                model.exo_edges.push_back({d, f});
            else
                model.param_edges.push_back({d, f});
        }
        if (residual) model.residuals[f] = residual;
        if (contains(deps, v)) out.natural_edges.push_back({v, f});
    }

    model.validate();
    return out;
}

}  // namespace cord
