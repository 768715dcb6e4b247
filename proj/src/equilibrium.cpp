#include "cord/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "cord/errors.hpp"

namespace cord {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RngStream::next_u64() { return splitmix64(state_); }

double RngStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
    // Box-Muller; u1 kept away from zero.
    double u1 = 1.0 - uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double RngStream::sample(const Distribution& dist) {
    switch (dist.kind) {
        case Distribution::Kind::log_normal: return std::exp(dist.a + dist.b * normal());
        case Distribution::Kind::uniform: return dist.a + (dist.b - dist.a) * uniform01();
    }
    throw Error("unknown distribution kind");
}

int RngStream::below(int n) {
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
}

RngStream draw_stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t state = seed ^ (0xD1B54A32D192ED03ULL * (index + 1));
    splitmix64(state);
    return RngStream(state);
}

std::vector<double> SampleSet::column(const std::string& name) const {
    std::vector<double> out;
    auto pick = [&](const std::vector<std::string>& names,
                    const std::vector<std::vector<double>>& rows) {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) return false;
        std::size_t idx = static_cast<std::size_t>(it - names.begin());
        for (std::size_t d = 0; d < rows.size(); ++d)
            if (converged[d]) out.push_back(rows[d][idx]);
        return true;
    };
    if (!pick(exo_names, exo_values) && !pick(var_names, var_values))
        throw ValidationError("unknown column: " + name);
    return out;
}

// ---------------------------------------------------------------------------
// Newton solver
// ---------------------------------------------------------------------------

namespace {

struct ResidualSystem {
    const IncidenceModel& model;
    Env env;  // exogenous and parameter bindings; variables overwritten per call

    explicit ResidualSystem(const IncidenceModel& m) : model(m) {}

    void eval(const std::vector<double>& x, std::vector<double>& out) {
        for (std::size_t i = 0; i < model.variables.size(); ++i)
            env[model.variables[i]] = x[i];
        out.resize(model.equations.size());
        for (std::size_t i = 0; i < model.equations.size(); ++i)
            out[i] = cord::eval(*model.residuals.at(model.equations[i]), env);
    }

    double max_abs_residual(const std::vector<double>& x) {
        std::vector<double> r;
        eval(x, r);
        double m = 0.0;
        for (double v : r) {
            if (std::isnan(v)) return std::numeric_limits<double>::infinity();
            m = std::max(m, std::fabs(v));
        }
        return m;
    }
};

// In-place LU with partial pivoting; false when singular.
bool lu_solve(std::vector<std::vector<double>>& a, std::vector<double>& b) {
    int n = static_cast<int>(b.size());
    for (int k = 0; k < n; ++k) {
        int pivot = k;
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(a[i][k]) > std::fabs(a[pivot][k])) pivot = i;
        if (!(std::fabs(a[pivot][k]) > 1e-300)) return false;
        std::swap(a[k], a[pivot]);
        std::swap(b[k], b[pivot]);
        for (int i = k + 1; i < n; ++i) {
            double factor = a[i][k] / a[k][k];
            a[i][k] = 0.0;
            for (int j = k + 1; j < n; ++j) a[i][j] -= factor * a[k][j];
            b[i] -= factor * b[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) b[i] -= a[i][j] * b[j];
        b[i] /= a[i][i];
        if (std::isnan(b[i])) return false;
    }
    return true;
}

bool newton(ResidualSystem& system, std::vector<double>& x, const SampleOptions& opts) {
    int n = static_cast<int>(x.size());
    std::vector<double> resid, probe;
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        system.eval(x, resid);
        double norm = 0.0;
        bool bad = false;
        for (double v : resid) {
            if (!std::isfinite(v)) bad = true;
            norm = std::max(norm, std::fabs(v));
        }
        if (bad) return false;
        if (norm <= opts.tolerance) return true;

        // Central-difference Jacobian.
        std::vector<std::vector<double>> jac(n, std::vector<double>(n, 0.0));
        std::vector<double> lo(n), hi(n);
        for (int j = 0; j < n; ++j) {
            double h = 1e-7 * std::max(1.0, std::fabs(x[j]));
            double keep = x[j];
            x[j] = keep + h;
            system.eval(x, hi);
            x[j] = keep - h;
            system.eval(x, lo);
            x[j] = keep;
            for (int i = 0; i < n; ++i) jac[i][j] = (hi[i] - lo[i]) / (2.0 * h);
        }
        std::vector<double> step(resid);
        for (double& v : step) v = -v;
        if (!lu_solve(jac, step)) return false;

        double lambda = 1.0;
        bool accepted = false;
        for (int backtrack = 0; backtrack < 30; ++backtrack) {
            probe = x;
            for (int j = 0; j < n; ++j) probe[j] += lambda * step[j];
            if (system.max_abs_residual(probe) < norm) {
                x = probe;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) return false;
    }
    return system.max_abs_residual(x) <= opts.tolerance;
}

bool positivity_ok(const IncidenceModel& model, const std::vector<double>& x) {
    for (const auto& v : model.positive) {
        auto it = std::find(model.variables.begin(), model.variables.end(), v);
        if (x[it - model.variables.begin()] <= 0.0) return false;
    }
    return true;
}

// Steady-state integration fallback: fourth-order Runge-Kutta until the
// drift is small; callers polish the endpoint with Newton.
std::optional<std::vector<double>> integrate_to_steady_state(const DynamicalModel& dyn,
                                                             const Env& fixed);

std::optional<std::vector<double>> solve_one(const IncidenceModel& model, const Env& fixed,
                                             const SampleOptions& opts) {
    ResidualSystem system(model);
    system.env = fixed;
    int n = static_cast<int>(model.variables.size());
    for (double scale : opts.start_scales) {
        std::vector<double> x(n, scale);
        if (newton(system, x, opts) && positivity_ok(model, x)) return x;
    }
    return std::nullopt;
}

}  // namespace

SampleSet sample_equilibria(const IncidenceModel& model, int n, std::uint64_t seed,
                            const SampleOptions& options) {
    model.validate();
    if (n < 0) throw ValidationError("sample count must be nonnegative");
    if (model.variables.size() != model.equations.size())
        throw ValidationError("equilibrium sampling needs as many equations as variables");
    for (const auto& f : model.equations)
        if (!model.residuals.count(f))
            throw ValidationError("equation " + f +
                                  " has no residual expression; cannot sample equilibria");
    for (const auto& p : model.parameters)
        if (!model.param_values.count(p))
            throw ValidationError("parameter " + p + " has no value");

    SampleSet s;
    s.exo_names = model.exogenous;
    s.var_names = model.variables;
    s.seed = seed;
    s.n_requested = n;

    const Distribution default_law{};  // LogNormal(0, 0.25)
    for (int draw = 0; draw < n; ++draw) {
        RngStream rng = draw_stream(seed, static_cast<std::uint64_t>(draw));
        Env fixed;
        std::vector<double> exo_row;
        for (const auto& w : model.exogenous) {
            auto it = model.distributions.find(w);
            double value = rng.sample(it == model.distributions.end() ? default_law
                                                                      : it->second);
            fixed[w] = value;
            exo_row.push_back(value);
        }
        for (const auto& [p, v] : model.param_values) fixed[p] = v;

        auto solution = solve_one(model, fixed, options);
        if (!solution && options.dynamics &&
            options.dynamics->variables == model.variables) {
            // Integrate the dynamics toward rest, then polish with Newton so
            // the residual bound holds for the reduced equations too.
            auto rest = integrate_to_steady_state(*options.dynamics, fixed);
            if (rest) {
                ResidualSystem system(model);
                system.env = fixed;
                if (newton(system, *rest, options) && positivity_ok(model, *rest))
                    solution = rest;
            }
        }

        s.exo_values.push_back(std::move(exo_row));
        if (solution) {
            s.var_values.push_back(std::move(*solution));
            s.converged.push_back(true);
            ++s.n_converged;
        } else {
            s.var_values.push_back({});
            s.converged.push_back(false);
        }
    }

    if (n > 0) {
        double failure = 1.0 - static_cast<double>(s.n_converged) / n;
        if (failure > options.max_failure_fraction) {
            std::ostringstream os;
            os << "equilibrium solving failed on " << (n - s.n_converged) << " of " << n
               << " draws for model " << model.name;
            throw SolverError(os.str());
        }
    }
    return s;
}

namespace {

std::optional<std::vector<double>> integrate_to_steady_state(const DynamicalModel& dyn,
                                                             const Env& fixed) {
    int n = static_cast<int>(dyn.variables.size());
    for (const auto& v : dyn.variables)
        if (!dyn.odes.at(v).rhs) return std::nullopt;  // structure-only dynamics

    Env env = fixed;
    auto drift = [&](const std::vector<double>& x, std::vector<double>& g) {
        for (int i = 0; i < n; ++i) env[dyn.variables[i]] = x[i];
        for (int i = 0; i < n; ++i) g[i] = eval(*dyn.odes.at(dyn.variables[i]).rhs, env);
    };

    std::vector<double> x(n, 1.0), k1(n), k2(n), k3(n), k4(n), tmp(n);
    double dt = 0.01;
    const int max_steps = 400000;
    for (int step = 0; step < max_steps; ++step) {
        drift(x, k1);
        double norm = 0.0;
        for (double v : k1) {
            if (!std::isfinite(v)) return std::nullopt;
            norm = std::max(norm, std::fabs(v));
        }
        if (norm < 1e-9) return x;

        for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
        drift(tmp, k2);
        for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
        drift(tmp, k3);
        for (int i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
        drift(tmp, k4);
        for (int i = 0; i < n; ++i)
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return std::nullopt;
}

}  // namespace

std::string to_csv(const SampleSet& s) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < s.exo_names.size(); ++i) os << (i ? "," : "") << s.exo_names[i];
    for (const auto& v : s.var_names) os << "," << v;
    os << ",converged\n";
    for (int d = 0; d < s.n_requested; ++d) {
        for (std::size_t i = 0; i < s.exo_values[d].size(); ++i)
            os << (i ? "," : "") << s.exo_values[d][i];
        for (std::size_t i = 0; i < s.var_names.size(); ++i) {
            os << ",";
            if (s.converged[d]) os << s.var_values[d][i];
        }
        os << "," << (s.converged[d] ? 1 : 0) << "\n";
    }
    return os.str();
}

nlohmann::json to_json(const SampleSet& s) {
    nlohmann::json j;
    j["version"] = 1;
    j["seed"] = s.seed;
    j["n_requested"] = s.n_requested;
    j["n_converged"] = s.n_converged;
    j["exogenous"] = s.exo_names;
    j["variables"] = s.var_names;
    auto& draws = j["draws"] = nlohmann::json::array();
    for (int d = 0; d < s.n_requested; ++d) {
        nlohmann::json row;
        row["exogenous"] = s.exo_values[d];
        row["converged"] = static_cast<bool>(s.converged[d]);
        if (s.converged[d]) row["variables"] = s.var_values[d];
        draws.push_back(std::move(row));
    }
    return j;
}

// ---------------------------------------------------------------------------
// Independence testing
// ---------------------------------------------------------------------------

namespace {

std::vector<double> ranks(const std::vector<double>& xs) {
    std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        double avg = 0.5 * (i + j) + 1.0;  // average rank for ties
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

void center(std::vector<double>& xs) {
    double mean = 0.0;
    for (double v : xs) mean += v;
    mean /= xs.size();
    for (double& v : xs) v -= mean;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Least-squares residual of y against columns (1 already removed by
// centering callers must NOT rely on; a constant column is included here).
std::vector<double> regression_residuals(const std::vector<double>& y,
                                         const std::vector<std::vector<double>>& zs) {
    std::size_t n = y.size();
    std::size_t k = zs.size() + 1;  // intercept
    std::vector<std::vector<double>> design;
    design.push_back(std::vector<double>(n, 1.0));
    for (const auto& z : zs) design.push_back(z);

    std::vector<std::vector<double>> gram(k, std::vector<double>(k, 0.0));
    std::vector<double> rhs(k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) gram[a][b] = dot(design[a], design[b]);
        rhs[a] = dot(design[a], y);
    }
    if (!lu_solve(gram, rhs))
        throw ValidationError("conditioning columns are collinear");
    std::vector<double> resid = y;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t i = 0; i < n; ++i) resid[i] -= rhs[a] * design[a][i];
    return resid;
}

}  // namespace

nlohmann::json IndependenceVerdict::to_json() const {
    return {{"x", x},           {"y", y},           {"given", given},
            {"method", method}, {"statistic", statistic}, {"p_value", p_value},
            {"alpha", alpha},   {"rejected", rejected}};
}

IndependenceVerdict test_independence(const SampleSet& s, const std::string& x,
                                      const std::string& y,
                                      const std::vector<std::string>& given,
                                      IndepMethod method, double alpha, std::uint64_t seed,
                                      int permutations) {
    if (permutations < 1) throw ValidationError("need at least one permutation");
    if (given.size() > 2)
        throw ValidationError("conditioning sets of size > 2 are not supported");
    if (method == IndepMethod::spearman_permutation && !given.empty())
        throw ValidationError(
            "spearman-permutation is a marginal test; use partial-correlation when "
            "conditioning");

    std::vector<double> cx = ranks(s.column(x));
    std::vector<double> cy = ranks(s.column(y));
    std::size_t n = cx.size();
    if (n < 8) throw ValidationError("too few converged draws for testing");

    auto is_constant = [](const std::vector<double>& v) {
        for (double a : v)
            if (a != v.front()) return false;
        return true;
    };
    if (is_constant(cx)) throw ValidationError("constant column: " + x);
    if (is_constant(cy)) throw ValidationError("constant column: " + y);

    std::vector<std::vector<double>> zs;
    for (const auto& z : given) {
        auto rz = ranks(s.column(z));
        if (is_constant(rz)) throw ValidationError("constant column: " + z);
        zs.push_back(std::move(rz));
    }

    if (method == IndepMethod::partial_correlation && !zs.empty()) {
        cx = regression_residuals(cx, zs);
        cy = regression_residuals(cy, zs);
    }
    center(cx);
    center(cy);
    double scale = std::sqrt(dot(cx, cx) * dot(cy, cy));
    if (!(scale > 0.0)) throw ValidationError("degenerate columns after conditioning");

    double observed = std::fabs(dot(cx, cy));
    std::uint64_t state = seed ^ 0xA24BAED4963EE407ULL;
    RngStream rng(splitmix64(state));
    int at_least = 0;
    std::vector<double> perm = cy;
    for (int p = 0; p < permutations; ++p) {
        for (std::size_t i = n - 1; i > 0; --i) {
            int j = rng.below(static_cast<int>(i) + 1);
            std::swap(perm[i], perm[j]);
        }
        if (std::fabs(dot(cx, perm)) >= observed) ++at_least;
    }

    IndependenceVerdict verdict;
    verdict.x = x;
    verdict.y = y;
    verdict.given = given;
    verdict.method = method == IndepMethod::spearman_permutation ? "spearman-permutation"
                                                                 : "partial-correlation";
    verdict.statistic = observed / scale;
    verdict.p_value = static_cast<double>(1 + at_least) / (permutations + 1);
    verdict.alpha = alpha;
    verdict.rejected = verdict.p_value < alpha;
    return verdict;
}

std::vector<PatternRow> pattern_check(const IncidenceModel& model, const MarkovDag& mo,
                                      int n, std::uint64_t seed, double alpha,
                                      int max_conditioning, const SampleOptions& options) {
    SampleSet s = sample_equilibria(model, n, seed, options);
    auto table = implied_independence_table(mo, max_conditioning);

    std::vector<PatternRow> rows;
    std::uint64_t row_index = 0;
    for (const auto& q : table) {
        ++row_index;
        IndepMethod method = q.given.empty() ? IndepMethod::spearman_permutation
                                             : IndepMethod::partial_correlation;
        auto verdict = test_independence(s, q.x, q.y, q.given, method, alpha,
                                         seed + 0x9E37 * row_index);
        PatternRow row;
        row.query = q;
        row.predicted_independent = q.separated;
        row.observed_independent = !verdict.rejected;
        row.agree = row.predicted_independent == row.observed_independent;
        row.p_value = verdict.p_value;
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json to_json(const std::vector<PatternRow>& rows) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& r : rows)
        items.push_back({{"x", r.query.x},
                         {"y", r.query.y},
                         {"given", r.query.given},
                         {"predicted_independent", r.predicted_independent},
                         {"observed_independent", r.observed_independent},
                         {"agree", r.agree},
                         {"p_value", r.p_value}});
    return {{"version", 1}, {"rows", items}};
}

}  // namespace cord
