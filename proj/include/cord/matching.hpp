#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "cord/model.hpp"

namespace cord {

/// Set of (variable, equation) pairs; no endpoint appears twice.
struct Matching {
    std::vector<std::pair<std::string, std::string>> pairs;

    std::size_t size() const { return pairs.size(); }
    bool matches(const std::string& var, const std::string& eq) const;
    /// Equation matched to `var`, or empty string.
    std::string equation_of(const std::string& var) const;

    /// Checks the no-shared-endpoint invariant and that every pair is an
    /// edge of `g`. Throws ValidationError.
    void validate(const BipartiteView& g) const;
};

/// Maximum-cardinality matching via Hopcroft–Karp; deterministic given
/// declaration order.
Matching maximum_matching(const BipartiteView& g);

/// True iff `m` covers every variable and every equation.
bool is_perfect(const BipartiteView& g, const Matching& m);

struct MatchingEnumeration {
    std::vector<Matching> matchings;
    bool truncated = false;
};

/// All perfect matchings, up to `limit`, in a deterministic order.
/// Uses recursive alternating-cycle splitting; intended for graphs with
/// at most ~20 vertices per side.
MatchingEnumeration enumerate_perfect_matchings(const BipartiteView& g,
                                                std::size_t limit = 10000);

/// Hall-condition certificate for a graph without a perfect matching:
/// a set S of equations with |neighbors(S)| < |S|. Throws ValidationError
/// when the graph does have a perfect matching, or when the deficiency is
/// on the variable side only.
std::vector<std::string> deficiency_witness(const BipartiteView& g);

}  // namespace cord
