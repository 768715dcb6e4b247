#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cord/expr.hpp"

namespace cord {

/// Distribution of an exogenous random variable. Only strictly-positive
/// support families are admitted.
struct Distribution {
    enum class Kind { log_normal, uniform };
    Kind kind = Kind::log_normal;
    double a = 0.0;  // mu  | lo
    double b = 0.25; // sigma | hi

    void validate(const std::string& owner) const;
};

/// Equation system in equilibrium form: endogenous variables V, equations F,
/// exogenous random variables W, parameters P, and the three incidence edge
/// sets. Residual expressions, distributions and parameter values are
/// optional annotations consumed by the equilibrium lab.
///
/// Identifier order is declaration order and only affects output determinism.
struct IncidenceModel {
    std::string name;
    std::vector<std::string> variables;
    std::vector<std::string> equations;
    std::vector<std::string> exogenous;
    std::vector<std::string> parameters;
    std::vector<std::pair<std::string, std::string>> var_edges;    // (variable, equation)
    std::vector<std::pair<std::string, std::string>> exo_edges;    // (exogenous, equation)
    std::vector<std::pair<std::string, std::string>> param_edges;  // (parameter, equation)
    std::map<std::string, ExprPtr> residuals;                      // equation -> residual
    std::map<std::string, Distribution> distributions;             // exogenous -> law
    std::map<std::string, double> param_values;
    std::vector<std::string> positive;  // variables asserted strictly positive at solutions

    /// Checks identifier disjointness, edge references, and that residual
    /// free symbols equal the equation's neighbors. Throws ValidationError.
    void validate() const;

    bool has_variable(const std::string& v) const;
    bool has_equation(const std::string& f) const;
};

/// One first-order ODE in canonical form, dx/dt = g(X, U, C). Structure-only
/// entries carry the dependency set without an expression.
struct Ode {
    std::vector<std::string> deps;  // all symbols appearing in g
    ExprPtr rhs;                    // null for structure-only
};

/// Dynamical model in canonical first-order form with user-asserted
/// self-regulation flags.
struct DynamicalModel {
    std::string name;
    std::vector<std::string> variables;
    std::map<std::string, Ode> odes;  // exactly one entry per variable
    std::vector<std::string> exogenous;
    std::vector<std::string> parameters;
    std::map<std::string, bool> self_regulating;  // defaults to false
    std::vector<std::string> positive;            // strictly-positive-branch flags
    std::map<std::string, Distribution> distributions;
    std::map<std::string, double> param_values;

    void validate() const;
    bool is_self_regulating(const std::string& v) const;
};

/// Addition of equations F+ (and variables V+, possibly promoting exogenous
/// symbols or parameters of the base model to endogenous) to a base model.
struct ExtensionSpec {
    std::string name;
    IncidenceModel base;
    /// V+ in declaration order; includes the new names of promoted symbols.
    std::vector<std::string> added_variables;
    /// (base exogenous-or-parameter identifier, endogenous name in V+).
    std::vector<std::pair<std::string, std::string>> promotions;
    std::vector<std::string> added_equations;
    std::vector<std::string> added_exogenous;
    std::vector<std::string> added_parameters;
    /// Incidence of F+ over the extended namespace (promotions already renamed).
    std::vector<std::pair<std::string, std::string>> eq_var_edges;
    std::vector<std::pair<std::string, std::string>> eq_exo_edges;
    std::vector<std::pair<std::string, std::string>> eq_param_edges;
    std::map<std::string, ExprPtr> residuals;  // for F+
    std::map<std::string, Distribution> distributions;
    std::map<std::string, double> param_values;
    std::vector<std::string> positive;

    void validate() const;
};

/// Variable/equation bipartite structure with deterministic adjacency,
/// detached from exogenous and parameter incidence.
class BipartiteView {
public:
    BipartiteView() = default;
    BipartiteView(std::vector<std::string> vars, std::vector<std::string> eqs,
                  std::vector<std::pair<std::string, std::string>> edges);

    const std::vector<std::string>& vars() const { return vars_; }
    const std::vector<std::string>& eqs() const { return eqs_; }
    /// Sorted by (variable index, equation index).
    const std::vector<std::pair<std::string, std::string>>& edges() const { return edges_; }

    int var_index(const std::string& v) const;  // -1 when absent
    int eq_index(const std::string& f) const;
    const std::vector<int>& var_adj(int v) const { return var_adj_[v]; }
    const std::vector<int>& eq_adj(int f) const { return eq_adj_[f]; }
    bool has_edge(int v, int f) const;

private:
    std::vector<std::string> vars_, eqs_;
    std::vector<std::pair<std::string, std::string>> edges_;
    std::vector<std::vector<int>> var_adj_, eq_adj_;
    std::map<std::string, int> var_index_, eq_index_;
};

/// The (V, F, E) structure of a model, exogenous/parameters excluded.
BipartiteView bipartite_of(const IncidenceModel& model);

/// Bipartite graph of the extension alone: F+ against V+, base variables
/// treated as exogenous (absent).
BipartiteView extension_bipartite(const ExtensionSpec& ext);

/// The extended model over V ∪ V+ and F ∪ F+. Promoted identifiers move
/// from exogenous/parameters to variables under their new names, and their
/// former incidences become variable edges.
IncidenceModel merged_model(const ExtensionSpec& ext);

struct EquilibriumResult {
    IncidenceModel model;
    /// Natural labelling edges (variable, its equilibrium equation),
    /// restricted to pairs still incident after positivity reduction.
    std::vector<std::pair<std::string, std::string>> natural_edges;
};

/// Equilibrium system of a canonical dynamical model. Each variable v yields
/// equation "f_<v>" with the incidence of its ODE right-hand side. With
/// positivity[v] set, the self-factor of a g = h(X)*x_v form is removed
/// (strictly positive solutions branch).
EquilibriumResult equilibrium_of(const DynamicalModel& dyn,
                                 const std::map<std::string, bool>& positivity);

}  // namespace cord
