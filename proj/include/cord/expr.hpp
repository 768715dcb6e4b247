#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace cord {

/// Arithmetic expression tree over named symbols. Nodes are immutable and
/// shared; rewrite operations return new trees.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprOp { num, sym, neg, add, sub, mul, div, pow };

struct Expr {
    ExprOp op;
    double value = 0.0;   // num
    std::string name;     // sym
    ExprPtr lhs, rhs;     // neg uses lhs only
};

ExprPtr make_num(double v);
ExprPtr make_sym(std::string name);
ExprPtr make_neg(ExprPtr e);
ExprPtr make_bin(ExprOp op, ExprPtr l, ExprPtr r);

using Env = std::unordered_map<std::string, double>;

/// Evaluate with every symbol bound in `env`; throws ValidationError on an
/// unbound symbol. Division by zero and 0^negative follow IEEE semantics.
double eval(const Expr& e, const Env& env);

/// Every distinct symbol name occurring in the tree.
std::set<std::string> free_symbols(const Expr& e);

/// Replace every occurrence of symbol `from` with symbol `to`.
ExprPtr rename_symbol(const ExprPtr& e, const std::string& from, const std::string& to);

/// Structural equality (same tree up to node identity).
bool expr_equal(const Expr& a, const Expr& b);

/// Render with minimal parentheses; parseable by the model-file grammar.
std::string to_string(const Expr& e);

/// Remove one multiplicative occurrence of the bare symbol `var` from a
/// product chain, i.e. rewrite h(X)*var into h(X). Returns nothing when the
/// expression does not have that factored shape.
std::optional<ExprPtr> remove_linear_factor(const ExprPtr& e, const std::string& var);

}  // namespace cord
