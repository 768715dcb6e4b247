#include "cord/expr.hpp"

#include <cmath>
#include <sstream>

#include "cord/errors.hpp"

namespace cord {

ExprPtr make_num(double v) {
    auto e = std::make_shared<Expr>();
    e->op = ExprOp::num;
    e->value = v;
    return e;
}

ExprPtr make_sym(std::string name) {
    auto e = std::make_shared<Expr>();
    e->op = ExprOp::sym;
    e->name = std::move(name);
    return e;
}

ExprPtr make_neg(ExprPtr inner) {
    auto e = std::make_shared<Expr>();
    e->op = ExprOp::neg;
    e->lhs = std::move(inner);
    return e;
}

ExprPtr make_bin(ExprOp op, ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
}

double eval(const Expr& e, const Env& env) {
    switch (e.op) {
        case ExprOp::num: return e.value;
        case ExprOp::sym: {
            auto it = env.find(e.name);
            if (it == env.end())
                throw ValidationError("unbound symbol in expression: " + e.name);
            return it->second;
        }
        case ExprOp::neg: return -eval(*e.lhs, env);
        case ExprOp::add: return eval(*e.lhs, env) + eval(*e.rhs, env);
        case ExprOp::sub: return eval(*e.lhs, env) - eval(*e.rhs, env);
        case ExprOp::mul: return eval(*e.lhs, env) * eval(*e.rhs, env);
        case ExprOp::div: return eval(*e.lhs, env) / eval(*e.rhs, env);
        case ExprOp::pow: return std::pow(eval(*e.lhs, env), eval(*e.rhs, env));
    }
    throw Error("corrupt expression node");
}

static void collect(const Expr& e, std::set<std::string>& out) {
    switch (e.op) {
        case ExprOp::num: return;
        case ExprOp::sym: out.insert(e.name); return;
        case ExprOp::neg: collect(*e.lhs, out); return;
        default:
            collect(*e.lhs, out);
            collect(*e.rhs, out);
    }
}

std::set<std::string> free_symbols(const Expr& e) {
    std::set<std::string> out;
    collect(e, out);
    return out;
}

ExprPtr rename_symbol(const ExprPtr& e, const std::string& from, const std::string& to) {
    switch (e->op) {
        case ExprOp::num: return e;
        case ExprOp::sym: return e->name == from ? make_sym(to) : e;
        case ExprOp::neg: {
            auto l = rename_symbol(e->lhs, from, to);
            return l == e->lhs ? e : make_neg(l);
        }
        default: {
            auto l = rename_symbol(e->lhs, from, to);
            auto r = rename_symbol(e->rhs, from, to);
            return (l == e->lhs && r == e->rhs) ? e : make_bin(e->op, l, r);
        }
    }
}

bool expr_equal(const Expr& a, const Expr& b) {
    if (a.op != b.op) return false;
    switch (a.op) {
        case ExprOp::num: return a.value == b.value;
        case ExprOp::sym: return a.name == b.name;
        case ExprOp::neg: return expr_equal(*a.lhs, *b.lhs);
        default: return expr_equal(*a.lhs, *b.lhs) && expr_equal(*a.rhs, *b.rhs);
    }
}

namespace {

int precedence(ExprOp op) {
    switch (op) {
        case ExprOp::add:
        case ExprOp::sub: return 1;
        case ExprOp::mul:
        case ExprOp::div: return 2;
        case ExprOp::neg: return 3;
        case ExprOp::pow: return 4;
        default: return 5;
    }
}

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void render(const Expr& e, std::ostringstream& os, int parent_prec, bool right_side) {
    int prec = precedence(e.op);
    // Subtraction/division right operands and pow left operands need extra care.
    bool need_paren = prec < parent_prec || (prec == parent_prec && right_side);
    switch (e.op) {
        case ExprOp::num:
            if (e.value < 0) {
                os << '(' << format_number(e.value) << ')';
            } else {
                os << format_number(e.value);
            }
            return;
        case ExprOp::sym: os << e.name; return;
        case ExprOp::neg:
            if (need_paren) os << '(';
            os << '-';
            render(*e.lhs, os, prec, true);
            if (need_paren) os << ')';
            return;
        default: {
            if (need_paren) os << '(';
            char sym = '?';
            switch (e.op) {
                case ExprOp::add: sym = '+'; break;
                case ExprOp::sub: sym = '-'; break;
                case ExprOp::mul: sym = '*'; break;
                case ExprOp::div: sym = '/'; break;
                case ExprOp::pow: sym = '^'; break;
                default: break;
            }
            // pow is right-associative.
            bool lhs_is_right = (e.op == ExprOp::pow);
            bool rhs_is_right = (e.op != ExprOp::pow);
            render(*e.lhs, os, prec, lhs_is_right);
            os << ' ' << sym << ' ';
            render(*e.rhs, os, prec, rhs_is_right);
            if (need_paren) os << ')';
            return;
        }
    }
}

ExprPtr simplified_mul(ExprPtr l, ExprPtr r) {
    if (l->op == ExprOp::num && l->value == 1.0) return r;
    if (r->op == ExprOp::num && r->value == 1.0) return l;
    return make_bin(ExprOp::mul, std::move(l), std::move(r));
}

}  // namespace

std::string to_string(const Expr& e) {
    std::ostringstream os;
    render(e, os, 0, false);
    return os.str();
}

std::optional<ExprPtr> remove_linear_factor(const ExprPtr& e, const std::string& var) {
    if (e->op == ExprOp::sym && e->name == var) return make_num(1.0);
    if (e->op == ExprOp::mul) {
        if (auto l = remove_linear_factor(e->lhs, var)) return simplified_mul(*l, e->rhs);
        if (auto r = remove_linear_factor(e->rhs, var)) return simplified_mul(e->lhs, *r);
        return std::nullopt;
    }
    if (e->op == ExprOp::div) {
        if (auto l = remove_linear_factor(e->lhs, var))
            return make_bin(ExprOp::div, *l, e->rhs);
        return std::nullopt;
    }
    if (e->op == ExprOp::neg) {
        if (auto l = remove_linear_factor(e->lhs, var)) return make_neg(*l);
        return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace cord
