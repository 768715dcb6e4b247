#include <doctest.h>

#include <cmath>

#include "helpers.hpp"

#include "cord/equilibrium.hpp"
#include "cord/errors.hpp"

using namespace cord;

namespace {

constexpr std::uint64_t kSeed = 20250807;

double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(1e-12, std::fabs(want));
}

double max_abs_residual(const IncidenceModel& model, const SampleSet& s, int draw) {
    Env env;
    for (std::size_t i = 0; i < s.exo_names.size(); ++i)
        env[s.exo_names[i]] = s.exo_values[draw][i];
    for (std::size_t i = 0; i < s.var_names.size(); ++i)
        env[s.var_names[i]] = s.var_values[draw][i];
    for (const auto& [p, v] : model.param_values) env[p] = v;
    double worst = 0.0;
    for (const auto& f : model.equations)
        worst = std::max(worst, std::fabs(eval(*model.residuals.at(f), env)));
    return worst;
}

}  // namespace

TEST_CASE("viral basic equilibria match the closed form") {
    auto model = testutil::load_fixture("viral_basic.cmf").models.at(0);
    auto s = sample_equilibria(model, 2000, kSeed);
    REQUIRE(s.n_converged == 2000);
    double d_T = model.param_values.at("d_T");
    double beta = model.param_values.at("beta");
    for (int d = 0; d < s.n_requested; ++d) {
        double u_sigma = s.exo_values[d][0], u_f = s.exo_values[d][1],
               u_delta = s.exo_values[d][2];
        double x_T = u_delta / (u_f * beta);
        double x_I = (u_sigma - d_T * x_T) / (beta * x_T);
        CHECK(rel_err(s.var_values[d][0], x_T) <= 1e-8);
        CHECK(rel_err(s.var_values[d][1], x_I) <= 1e-8);
        CHECK(s.var_values[d][0] > 0.0);
        CHECK(s.var_values[d][1] > 0.0);
        CHECK(max_abs_residual(model, s, d) <= 1e-10);
    }
}

TEST_CASE("intro equilibria match the closed form") {
    auto model = testutil::load_fixture("intro.cmf").models.at(0);
    auto s = sample_equilibria(model, 2000, kSeed + 1);
    REQUIRE(s.n_converged == 2000);
    double c1 = model.param_values.at("C_p1"), c2 = model.param_values.at("C_p2");
    for (int d = 0; d < s.n_requested; ++d) {
        double u1 = s.exo_values[d][0], u2 = s.exo_values[d][1];
        double x1 = u1 / c1;
        double x2 = -(x1 + u2) / c2;
        CHECK(rel_err(s.var_values[d][0], x1) <= 1e-8);
        CHECK(rel_err(s.var_values[d][1], x2) <= 1e-8);
        CHECK(max_abs_residual(model, s, d) <= 1e-10);
    }
}

TEST_CASE("single-response equilibria match the closed form") {
    auto lowered = testutil::load_fixture("viral_single.cmf");
    auto model = merged_model(*lowered.find_extension("viral_single"));
    auto s = sample_equilibria(model, 500, kSeed + 2);
    REQUIRE(s.n_converged == 500);
    double d_T = model.param_values.at("d_T"), beta = model.param_values.at("beta");
    double d_E = model.param_values.at("d_E"), d_I = model.param_values.at("d_I");
    for (int d = 0; d < s.n_requested; ++d) {
        double u_sigma = s.exo_values[d][0], u_f = s.exo_values[d][1],
               u_a = s.exo_values[d][2], u_k = s.exo_values[d][3];
        double x_I = d_E / u_a;
        double x_T = u_sigma / (d_T + beta * x_I);
        double x_delta = u_f * beta * x_T;
        double x_E = (x_delta - d_I) / u_k;
        CHECK(rel_err(s.var_values[d][0], x_T) <= 1e-8);
        CHECK(rel_err(s.var_values[d][1], x_I) <= 1e-8);
        CHECK(rel_err(s.var_values[d][2], x_E) <= 1e-8);
        CHECK(rel_err(s.var_values[d][3], x_delta) <= 1e-8);
    }
}

TEST_CASE("declared positivity holds on every converged draw") {
    auto lowered = testutil::load_fixture("viral_multi.cmf");
    auto model = merged_model(*lowered.find_extension("viral_multi"));
    auto s = sample_equilibria(model, 500, kSeed + 3);
    REQUIRE(s.n_converged == 500);
    for (int d = 0; d < s.n_requested; ++d) {
        for (double v : s.var_values[d]) CHECK(v > 0.0);
        CHECK(max_abs_residual(model, s, d) <= 1e-10);
    }
}

TEST_CASE("identical seeds give bit-identical sample sets") {
    auto model = testutil::load_fixture("viral_basic.cmf").models.at(0);
    auto a = sample_equilibria(model, 64, 99);
    auto b = sample_equilibria(model, 64, 99);
    CHECK(a.exo_values == b.exo_values);
    CHECK(a.var_values == b.var_values);

    // per-draw streams: a shorter run is a prefix of a longer one
    auto prefix = sample_equilibria(model, 8, 99);
    for (int d = 0; d < 8; ++d) {
        CHECK(prefix.exo_values[d] == a.exo_values[d]);
        CHECK(prefix.var_values[d] == a.var_values[d]);
    }

    auto c = sample_equilibria(model, 64, 100);
    CHECK(a.exo_values != c.exo_values);
}

TEST_CASE("empty sample request") {
    auto model = testutil::load_fixture("viral_basic.cmf").models.at(0);
    auto s = sample_equilibria(model, 0, 7);
    CHECK(s.n_requested == 0);
    CHECK(s.n_converged == 0);
    CHECK(s.exo_values.empty());
}

TEST_CASE("insoluble systems raise a solver error") {
    auto lowered = lower(parse(R"(
model impossible {
  var X
  exo U
  eq f: X*X + U = 0
}
)"));
    // X^2 = -U with U > 0 has no real root.
    CHECK_THROWS_AS(sample_equilibria(lowered.models.at(0), 20, 5), SolverError);
}

TEST_CASE("sampling preconditions") {
    auto cyclic = testutil::load_fixture("cyclic.cmf").models.at(0);  // structure-only
    CHECK_THROWS_WITH_AS(sample_equilibria(cyclic, 10, 1),
                         doctest::Contains("no residual"), ValidationError);

    auto lowered = lower(parse(R"(
model unvalued {
  var X
  param c
  eq f: c*X - 1 = 0
}
)"));
    CHECK_THROWS_WITH_AS(sample_equilibria(lowered.models.at(0), 10, 1),
                         doctest::Contains("no value"), ValidationError);
}

TEST_CASE("steady-state integration fallback solves when Newton is disabled") {
    auto lowered = testutil::load_fixture("viral_all.cmf");
    const DynamicalModel& dyn = *lowered.find_dynamics("viral_dyn");
    auto eq = equilibrium_of(dyn, {{"X_I", true}});

    SampleOptions options;
    options.start_scales = {};  // no Newton starts: force the fallback
    options.dynamics = &dyn;
    auto s = sample_equilibria(eq.model, 32, 11, options);
    CHECK(s.n_converged == 32);
    for (int d = 0; d < s.n_requested; ++d)
        CHECK(max_abs_residual(eq.model, s, d) <= 1e-10);

    // without the dynamics the same setup fails
    SampleOptions no_fallback;
    no_fallback.start_scales = {};
    CHECK_THROWS_AS(sample_equilibria(eq.model, 8, 11, no_fallback), SolverError);
}

TEST_CASE("CSV and JSON sample export") {
    auto model = testutil::load_fixture("intro.cmf").models.at(0);
    auto s = sample_equilibria(model, 3, 123);
    std::string csv = to_csv(s);
    CHECK(csv.rfind("U_w1,U_w2,X_v1,X_v2,converged\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rows

    auto j = to_json(s);
    CHECK(j["n_converged"] == 3);
    CHECK(j["draws"].size() == 3);
    CHECK(j["version"] == 1);
}

TEST_CASE("independence testing on sampled data") {
    auto model = testutil::load_fixture("viral_basic.cmf").models.at(0);
    auto s = sample_equilibria(model, 2000, kSeed + 4);

    auto separated = test_independence(s, "U_sigma", "X_T", {},
                                       IndepMethod::spearman_permutation, 0.01, 900);
    CHECK_FALSE(separated.rejected);
    CHECK(separated.p_value >= 0.01);

    auto connected = test_independence(s, "U_sigma", "X_I", {},
                                       IndepMethod::spearman_permutation, 0.01, 901);
    CHECK(connected.rejected);
    CHECK(connected.p_value <= 0.01);
}

TEST_CASE("perfect dependence yields the smallest attainable p-value") {
    auto model = testutil::load_fixture("viral_basic.cmf").models.at(0);
    auto s = sample_equilibria(model, 400, kSeed + 5);
    // a variable against itself: X_T is its own copy
    SampleSet twin = s;
    twin.exo_names.push_back("copy_of_X_T");
    for (int d = 0; d < twin.n_requested; ++d)
        twin.exo_values[d].push_back(twin.var_values[d][0]);
    auto verdict = test_independence(twin, "copy_of_X_T", "X_T", {},
                                     IndepMethod::spearman_permutation, 0.01, 902);
    CHECK(verdict.rejected);
    CHECK(verdict.p_value == doctest::Approx(1.0 / 2001).epsilon(1e-9));
    CHECK(verdict.statistic == doctest::Approx(1.0));
}

TEST_CASE("constant columns are rejected") {
    auto lowered = lower(parse(R"(
model flat {
  var X
  exo U
  param c = 2.0
  eq f: X - c = 0
}
)"));
    auto s = sample_equilibria(lowered.models.at(0), 50, 3);
    CHECK_THROWS_WITH_AS(test_independence(s, "X", "U", {},
                                           IndepMethod::spearman_permutation, 0.01, 1),
                         doctest::Contains("constant column"), ValidationError);
}

TEST_CASE("conditional independence via rank partial correlation") {
    auto lowered = testutil::load_fixture("viral_single.cmf");
    auto model = merged_model(*lowered.find_extension("viral_single"));
    auto s = sample_equilibria(model, 1500, kSeed + 6);

    // X_E depends on U_sigma only through X_delta.
    auto marginal = test_independence(s, "U_sigma", "X_E", {},
                                      IndepMethod::spearman_permutation, 0.01, 903);
    CHECK(marginal.rejected);
    auto conditional = test_independence(s, "U_sigma", "X_E", {"X_delta"},
                                         IndepMethod::partial_correlation, 0.01, 904);
    CHECK_FALSE(conditional.rejected);

    CHECK_THROWS_AS(test_independence(s, "U_sigma", "X_E", {"X_delta"},
                                      IndepMethod::spearman_permutation, 0.01, 905),
                    ValidationError);
    CHECK_THROWS_AS(test_independence(s, "U_sigma", "X_E", {"X_T", "X_I", "X_delta"},
                                      IndepMethod::partial_correlation, 0.01, 906),
                    ValidationError);
}

TEST_CASE("pattern check reproduces the qualitative dependence table") {
    SUBCASE("single response") {
        auto lowered = testutil::load_fixture("viral_single.cmf");
        auto model = merged_model(*lowered.find_extension("viral_single"));
        auto mo = markov_ordering(model);
        auto rows = pattern_check(model, mo, 1200, kSeed + 7, 0.01, 0);
        bool saw_t = false, saw_i = false;
        for (const auto& r : rows) {
            if (r.query.x == "X_T" && r.query.y == "U_sigma") {
                saw_t = true;
                CHECK_FALSE(r.predicted_independent);
                CHECK_FALSE(r.observed_independent);
                CHECK(r.agree);
            }
            if (r.query.x == "X_I" && r.query.y == "U_sigma") {
                saw_i = true;
                CHECK(r.predicted_independent);
                CHECK(r.observed_independent);
                CHECK(r.agree);
            }
        }
        CHECK(saw_t);
        CHECK(saw_i);
    }
    SUBCASE("multiple responses: both pairs dependent") {
        auto lowered = testutil::load_fixture("viral_multi.cmf");
        auto model = merged_model(*lowered.find_extension("viral_multi"));
        auto mo = markov_ordering(model);
        auto rows = pattern_check(model, mo, 1200, kSeed + 8, 0.01, 0);
        for (const auto& r : rows) {
            if ((r.query.x == "X_T" || r.query.x == "X_I") && r.query.y == "U_sigma") {
                CHECK_FALSE(r.predicted_independent);
                CHECK_FALSE(r.observed_independent);
            }
        }
    }
    SUBCASE("cascade: equilibrium concentrations decouple from the input signal") {
        auto lowered = testutil::load_fixture("cascade.cmf");
        const DynamicalModel& dyn = *lowered.find_dynamics("cascade_dyn");
        auto model = equilibrium_of(dyn, {}).model;
        auto mo = markov_ordering(model);
        SampleOptions options;
        options.dynamics = &dyn;
        auto rows = pattern_check(model, mo, 1200, kSeed + 9, 0.01, 0, options);
        int checked = 0;
        for (const auto& r : rows) {
            if (r.query.y != "I") continue;
            if (r.query.x == "X_s" || r.query.x == "X_r" || r.query.x == "X_m") {
                CHECK(r.predicted_independent);
                CHECK(r.observed_independent);
                ++checked;
            }
            if (r.query.x == "X_e") {
                CHECK_FALSE(r.predicted_independent);
                CHECK_FALSE(r.observed_independent);
                ++checked;
            }
        }
        CHECK(checked == 4);
    }
}
