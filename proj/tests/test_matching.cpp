#include <doctest.h>

#include "helpers.hpp"

#include "cord/errors.hpp"
#include "cord/matching.hpp"

using namespace cord;
using testutil::edge_set;

TEST_CASE("maximum matching on the worked examples") {
    auto intro = bipartite_of(testutil::load_fixture("intro.cmf").models.at(0));
    Matching m = maximum_matching(intro);
    CHECK(edge_set(m.pairs) == edge_set({{"X_v1", "f_1"}, {"X_v2", "f_2"}}));
    CHECK(is_perfect(intro, m));

    auto single = testutil::load_fixture("viral_single.cmf");
    auto b_plus = extension_bipartite(*single.find_extension("viral_single"));
    Matching mp = maximum_matching(b_plus);
    CHECK(mp.size() == 1);
    CHECK_FALSE(is_perfect(b_plus, mp));

    BipartiteView empty({"a", "b", "c"}, {"f", "g", "h"}, {});
    CHECK(maximum_matching(empty).size() == 0);
}

TEST_CASE("is_perfect on the extension graphs") {
    auto multi = testutil::load_fixture("viral_multi.cmf");
    auto b_plus = extension_bipartite(*multi.find_extension("viral_multi"));
    Matching claimed;
    claimed.pairs = {{"X_E1", "f_E1"}, {"X_E2", "f_E2"}, {"X_delta", "f_delta"}};
    CHECK(is_perfect(b_plus, claimed));

    BipartiteView empty({}, {}, {});
    CHECK(is_perfect(empty, Matching{}));

    Matching not_an_edge;
    not_an_edge.pairs = {{"X_E1", "f_E2"}};
    CHECK_THROWS_AS(is_perfect(b_plus, not_an_edge), ValidationError);
}

TEST_CASE("maximum matching size equals brute force on random graphs") {
    RngStream rng(42);
    for (int trial = 0; trial < 300; ++trial) {
        int nv = 1 + rng.below(8);
        int nf = 1 + rng.below(8);
        auto g = testutil::random_bipartite(rng, nv, nf, 10 + rng.below(60));
        CHECK(static_cast<int>(maximum_matching(g).size()) ==
              testutil::brute_force_max_matching(g));
    }
}

TEST_CASE("perfect matching enumeration: cyclic fixture has exactly two") {
    auto cyclic = bipartite_of(testutil::load_fixture("cyclic.cmf").models.at(0));
    auto result = enumerate_perfect_matchings(cyclic);
    CHECK_FALSE(result.truncated);
    REQUIRE(result.matchings.size() == 2);

    std::set<std::set<std::pair<std::string, std::string>>> found;
    for (const auto& m : result.matchings) found.insert(edge_set(m.pairs));
    std::set<std::set<std::pair<std::string, std::string>>> expected{
        {{"X_1", "f_1"}, {"X_2", "f_2"}, {"X_3", "f_3"}, {"X_4", "f_4"}, {"X_5", "f_5"}},
        {{"X_1", "f_1"}, {"X_2", "f_3"}, {"X_3", "f_4"}, {"X_4", "f_2"}, {"X_5", "f_5"}}};
    CHECK(found == expected);
}

TEST_CASE("perfect matching enumeration: unique and singleton cases") {
    auto intro = bipartite_of(testutil::load_fixture("intro.cmf").models.at(0));
    auto result = enumerate_perfect_matchings(intro);
    REQUIRE(result.matchings.size() == 1);
    CHECK(edge_set(result.matchings[0].pairs) ==
          edge_set({{"X_v1", "f_1"}, {"X_v2", "f_2"}}));

    BipartiteView one({"v"}, {"f"}, {{"v", "f"}});
    CHECK(enumerate_perfect_matchings(one).matchings.size() == 1);
}

TEST_CASE("enumeration agrees with backtracking and respects the limit") {
    RngStream rng(7);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + rng.below(5);  // up to 6 a side
        auto g = testutil::random_matchable_bipartite(rng, n, 20 + rng.below(40));
        auto enumerated = enumerate_perfect_matchings(g);
        REQUIRE_FALSE(enumerated.truncated);
        std::set<std::set<std::pair<std::string, std::string>>> found;
        for (const auto& m : enumerated.matchings) found.insert(edge_set(m.pairs));
        CHECK(found == testutil::brute_force_perfect_matchings(g));
        checked += static_cast<int>(found.size());

        if (!enumerated.matchings.empty()) {
            auto capped = enumerate_perfect_matchings(g, 1);
            CHECK(capped.matchings.size() == 1);
            CHECK(capped.truncated == (enumerated.matchings.size() > 1));
        }
    }
    CHECK(checked > 200);  // the suite actually saw nontrivial graphs
}

TEST_CASE("enumeration contains the maximum matching when perfect") {
    RngStream rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        auto g = testutil::random_matchable_bipartite(rng, 2 + rng.below(5), 30);
        Matching m = maximum_matching(g);
        REQUIRE(is_perfect(g, m));
        auto enumerated = enumerate_perfect_matchings(g);
        bool contained = false;
        for (const auto& candidate : enumerated.matchings)
            if (edge_set(candidate.pairs) == edge_set(m.pairs)) contained = true;
        CHECK(contained);
    }
}

TEST_CASE("deficiency witness on the worked examples") {
    auto single = testutil::load_fixture("viral_single.cmf");
    auto b_plus = extension_bipartite(*single.find_extension("viral_single"));
    CHECK(deficiency_witness(b_plus) == std::vector<std::string>{"f_E_plus"});

    BipartiteView shared({"x", "y"}, {"f", "g"}, {{"x", "f"}, {"x", "g"}});
    auto witness = deficiency_witness(shared);
    CHECK(witness == std::vector<std::string>{"f", "g"});

    auto intro = bipartite_of(testutil::load_fixture("intro.cmf").models.at(0));
    CHECK_THROWS_AS(deficiency_witness(intro), ValidationError);

    // no equation-side witness exists when the shortage is among variables
    BipartiteView var_deficient({"a", "b", "c"}, {"f", "g"},
                                {{"a", "f"}, {"b", "g"}, {"c", "g"}});
    CHECK_THROWS_WITH_AS(deficiency_witness(var_deficient),
                         doctest::Contains("variable side"), ValidationError);
}

TEST_CASE("enumeration requires a positive limit") {
    BipartiteView one({"v"}, {"f"}, {{"v", "f"}});
    CHECK_THROWS_AS(enumerate_perfect_matchings(one, 0), ValidationError);
}

TEST_CASE("deficiency witnesses satisfy the Hall check on random graphs") {
    RngStream rng(2024);
    int deficient_seen = 0;
    for (int trial = 0; trial < 400; ++trial) {
        int n = 2 + rng.below(7);
        auto g = testutil::random_bipartite(rng, n, n, 5 + rng.below(40));
        Matching m = maximum_matching(g);
        if (is_perfect(g, m)) continue;
        ++deficient_seen;
        auto witness = deficiency_witness(g);
        CHECK(testutil::hall_violated(g, witness));
    }
    CHECK(deficient_seen > 50);
}

TEST_CASE("base and extension matchings union into a merged perfect matching") {
    auto multi = testutil::load_fixture("viral_multi.cmf");
    const ExtensionSpec& ext = *multi.find_extension("viral_multi");
    Matching base_m = maximum_matching(bipartite_of(ext.base));
    Matching plus_m = maximum_matching(extension_bipartite(ext));
    REQUIRE(is_perfect(bipartite_of(ext.base), base_m));
    REQUIRE(is_perfect(extension_bipartite(ext), plus_m));

    Matching unioned;
    unioned.pairs = base_m.pairs;
    for (const auto& p : plus_m.pairs) unioned.pairs.push_back(p);
    CHECK(is_perfect(bipartite_of(merged_model(ext)), unioned));
}
