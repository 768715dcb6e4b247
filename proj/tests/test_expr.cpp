#include <doctest.h>

#include <cctype>

#include "cord/equilibrium.hpp"
#include "cord/errors.hpp"
#include "cord/expr.hpp"
#include "cord/parser.hpp"

using namespace cord;

namespace {

// Parses a bare expression by wrapping it in a throwaway model block.
ExprPtr parse_expr(const std::string& text) {
    auto file = parse("model m {\n eq f: " + text + " = 0\n}\n");
    const auto& block = file.blocks.at(0);
    for (const auto& decl : block.decls)
        if (const auto* d = std::get_if<EqDecl>(&decl)) return d->lhs;
    throw Error("no expression parsed");
}

// Independent free-symbol oracle: scan the serialized text for identifier
// lexemes instead of walking the tree.
std::set<std::string> scan_symbols(const std::string& rendered) {
    std::set<std::string> out;
    std::size_t i = 0;
    while (i < rendered.size()) {
        char c = rendered[i];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i;
            while (i < rendered.size() && (std::isalnum(static_cast<unsigned char>(rendered[i])) ||
                                           rendered[i] == '_'))
                ++i;
            out.insert(rendered.substr(start, i - start));
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            // skip numbers including exponent marker
            while (i < rendered.size() &&
                   (std::isdigit(static_cast<unsigned char>(rendered[i])) ||
                    rendered[i] == '.' || rendered[i] == 'e' || rendered[i] == 'E' ||
                    ((rendered[i] == '+' || rendered[i] == '-') &&
                     (rendered[i - 1] == 'e' || rendered[i - 1] == 'E'))))
                ++i;
        } else {
            ++i;
        }
    }
    return out;
}

ExprPtr random_expr(RngStream& rng, int depth) {
    static const std::vector<std::string> names{"a", "b", "c", "dd", "e2", "x_1"};
    if (depth == 0 || rng.below(5) == 0) {
        if (rng.below(3) == 0) return make_num(rng.below(20) * 0.5);
        return make_sym(names[rng.below(static_cast<int>(names.size()))]);
    }
    switch (rng.below(6)) {
        case 0: return make_bin(ExprOp::add, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 1: return make_bin(ExprOp::sub, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 2: return make_bin(ExprOp::mul, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 3: return make_bin(ExprOp::div, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 4: return make_bin(ExprOp::pow, random_expr(rng, depth - 1), make_num(rng.below(4)));
        default: return make_neg(random_expr(rng, depth - 1));
    }
}

}  // namespace

TEST_CASE("expression evaluation") {
    auto e = parse_expr("U_sigma - d_T*X_T - beta*X_T*X_I");
    Env env{{"U_sigma", 2.0}, {"d_T", 0.1}, {"X_T", 3.0}, {"beta", 0.5}, {"X_I", 4.0}};
    CHECK(eval(*e, env) == doctest::Approx(2.0 - 0.3 - 6.0));

    CHECK(eval(*parse_expr("2^3^2"), {}) == doctest::Approx(512.0));  // right assoc
    CHECK(eval(*parse_expr("-2^2"), {}) == doctest::Approx(-4.0));    // neg binds looser
    CHECK(eval(*parse_expr("(1 + 2)*3 - 4/8"), {}) == doctest::Approx(8.5));
    CHECK_THROWS_AS(eval(*parse_expr("missing + 1"), Env{}), ValidationError);
}

TEST_CASE("free symbols match a text-scan oracle on random expressions") {
    RngStream rng(777);
    for (int trial = 0; trial < 300; ++trial) {
        ExprPtr e = random_expr(rng, 4);
        CHECK(free_symbols(*e) == scan_symbols(to_string(*e)));
    }
}

TEST_CASE("serialization round-trips through the parser") {
    RngStream rng(1234);
    for (int trial = 0; trial < 200; ++trial) {
        ExprPtr e = random_expr(rng, 4);
        ExprPtr reparsed = parse_expr(to_string(*e));
        CHECK(expr_equal(*e, *reparsed));
    }
}

TEST_CASE("symbol renaming") {
    auto e = parse_expr("U_f*beta*X_T - U_delta");
    auto renamed = rename_symbol(e, "U_delta", "X_delta");
    CHECK(free_symbols(*renamed) ==
          std::set<std::string>{"U_f", "beta", "X_T", "X_delta"});
    // untouched tree shares structure
    CHECK(expr_equal(*rename_symbol(e, "nope", "x"), *e));
}

TEST_CASE("removing the positivity factor") {
    auto e = parse_expr("(U_f*beta*X_T - U_delta)*X_I");
    auto reduced = remove_linear_factor(e, "X_I");
    REQUIRE(reduced.has_value());
    CHECK(free_symbols(**reduced) == std::set<std::string>{"U_f", "beta", "X_T", "U_delta"});

    // factored form with the variable still inside the cofactor
    auto sat = parse_expr("(p*a*X_I/(h + X_E + a*X_I) - d)*X_E");
    auto sat_reduced = remove_linear_factor(sat, "X_E");
    REQUIRE(sat_reduced.has_value());
    CHECK(free_symbols(**sat_reduced).count("X_E") == 1);

    CHECK(!remove_linear_factor(parse_expr("a + X_I"), "X_I").has_value());
    CHECK(!remove_linear_factor(parse_expr("a*X_I + b"), "X_I").has_value());
    CHECK(remove_linear_factor(parse_expr("-(a*X_I)"), "X_I").has_value());
    CHECK(remove_linear_factor(parse_expr("a*X_I/b"), "X_I").has_value());
}
