#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cord/model.hpp"
#include "cord/ordering.hpp"
#include "cord/query.hpp"

namespace cord {

/// Deterministic per-draw random stream (splitmix64 core, Box-Muller
/// normals). Identical seeds give identical draws on every platform,
/// independent of execution order.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    double uniform01();  // [0, 1)
    double normal();
    double sample(const Distribution& dist);
    /// Uniform integer in [0, n).
    int below(int n);

private:
    std::uint64_t state_;
};

/// Stream for draw `index` under a run seed.
RngStream draw_stream(std::uint64_t seed, std::uint64_t index);

/// Exogenous draws and equilibrium solutions of a model.
struct SampleSet {
    std::vector<std::string> exo_names, var_names;
    std::vector<std::vector<double>> exo_values;  // one row per draw
    std::vector<std::vector<double>> var_values;  // empty row when not converged
    std::vector<bool> converged;
    std::uint64_t seed = 0;
    int n_requested = 0;
    int n_converged = 0;

    /// Column over converged draws only; name may be exogenous or endogenous.
    std::vector<double> column(const std::string& name) const;
};

struct SampleOptions {
    double tolerance = 1e-10;  // absolute residual bound per equation
    int max_iterations = 60;
    /// Positive multi-start scales for the all-ones initial point.
    std::vector<double> start_scales{1.0, 0.5, 2.0, 0.1, 10.0};
    /// Steady-state integration fallback when Newton fails, available when
    /// the model came from an explicit dynamical system.
    const DynamicalModel* dynamics = nullptr;
    /// Hard error when more than this fraction of draws fails to converge.
    double max_failure_fraction = 0.2;
};

/// Draws exogenous values and root-solves the residual system per draw
/// (damped Newton, numerical Jacobian, positive multi-starts). Requires a
/// residual for every equation; exogenous laws default to LogNormal(0, 0.25).
SampleSet sample_equilibria(const IncidenceModel& model, int n, std::uint64_t seed,
                            const SampleOptions& options = {});

std::string to_csv(const SampleSet& s);
nlohmann::json to_json(const SampleSet& s);

enum class IndepMethod { spearman_permutation, partial_correlation };

struct IndependenceVerdict {
    std::string x, y;
    std::vector<std::string> given;
    std::string method;
    double statistic = 0.0;
    double p_value = 1.0;
    double alpha = 0.01;
    bool rejected = false;  // true: dependence detected

    nlohmann::json to_json() const;
};

/// Permutation test of (conditional) independence on sampled columns.
/// Marginal queries use Spearman rank correlation; conditional queries use
/// the rank partial correlation after regressing both sides on the
/// conditioning ranks. P-values are derandomized by `seed`.
IndependenceVerdict test_independence(const SampleSet& s, const std::string& x,
                                      const std::string& y,
                                      const std::vector<std::string>& given,
                                      IndepMethod method, double alpha, std::uint64_t seed,
                                      int permutations = 2000);

struct PatternRow {
    IndependenceRow query;
    bool predicted_independent = false;
    bool observed_independent = false;
    bool agree = false;
    double p_value = 1.0;
};

/// Samples the model and compares every implied-independence query against
/// the data. Disagreements are reported, not fatal: faithfulness is an
/// assumption.
std::vector<PatternRow> pattern_check(const IncidenceModel& model, const MarkovDag& mo,
                                      int n, std::uint64_t seed, double alpha,
                                      int max_conditioning = 1,
                                      const SampleOptions& options = {});

nlohmann::json to_json(const std::vector<PatternRow>& rows);

}  // namespace cord
