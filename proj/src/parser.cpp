#include "cord/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace cord {

namespace {

enum class Tok {
    ident, number, lbrace, rbrace, lparen, rparen, comma, colon, equals, tilde,
    plus, minus, star, slash, caret, arrow, newline, eof
};

struct Token {
    Tok kind;
    std::string text;
    double value = 0.0;
    SourceLoc loc;
};

std::vector<Token> tokenize(const std::string& text, const std::string& filename) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto loc = [&]() { return SourceLoc{filename, line, col}; };
    auto push = [&](Tok k, std::string t, SourceLoc l) {
        out.push_back({k, std::move(t), 0.0, std::move(l)});
    };

    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            push(Tok::newline, "\n", loc());
            ++i;
            ++line;
            col = 1;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            ++col;
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') {
                ++i;
                ++col;
            }
            continue;
        }
        SourceLoc at = loc();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i;
            while (i < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
                ++i;
                ++col;
            }
            push(Tok::ident, text.substr(start, i - start), at);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = i;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            if (i < text.size() && text[i] == '.') {
                ++i;
                if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
                    throw ParseError({filename, line, col}, "malformed number");
                while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            }
            if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
                ++i;
                if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
                if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
                    throw ParseError({filename, line, col}, "malformed exponent");
                while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            }
            std::string lexeme = text.substr(start, i - start);
            Token t{Tok::number, lexeme, std::stod(lexeme), at};
            out.push_back(std::move(t));
            col += static_cast<int>(lexeme.size());
            continue;
        }
        auto single = [&](Tok k) {
            push(k, std::string(1, c), at);
            ++i;
            ++col;
        };
        switch (c) {
            case '{': single(Tok::lbrace); break;
            case '}': single(Tok::rbrace); break;
            case '(': single(Tok::lparen); break;
            case ')': single(Tok::rparen); break;
            case ',': single(Tok::comma); break;
            case ':': single(Tok::colon); break;
            case '=': single(Tok::equals); break;
            case '~': single(Tok::tilde); break;
            case '+': single(Tok::plus); break;
            case '*': single(Tok::star); break;
            case '/': single(Tok::slash); break;
            case '^': single(Tok::caret); break;
            case '-':
                if (i + 1 < text.size() && text[i + 1] == '>') {
                    push(Tok::arrow, "->", at);
                    i += 2;
                    col += 2;
                } else {
                    single(Tok::minus);
                }
                break;
            default:
                throw ParseError(at, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Tok::eof, "<eof>", 0.0, {filename, line, col}});
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    ModelFile parse_file(const std::string& filename) {
        ModelFile file;
        file.filename = filename;
        skip_newlines();
        while (!at(Tok::eof)) {
            file.blocks.push_back(parse_block());
            skip_newlines();
        }
        return file;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;

    const Token& peek() const { return toks_[pos_]; }
    bool at(Tok k) const { return peek().kind == k; }
    bool at_word(const char* w) const { return at(Tok::ident) && peek().text == w; }

    Token advance() { return toks_[pos_++]; }

    Token expect(Tok k, const std::string& what) {
        if (!at(k))
            throw ParseError(peek().loc, "expected " + what + ", found '" + peek().text + "'");
        return advance();
    }

    std::string expect_ident(const std::string& what) {
        return expect(Tok::ident, what).text;
    }

    void expect_end_of_decl() {
        if (at(Tok::rbrace) || at(Tok::eof)) return;  // '}' may follow directly
        if (!at(Tok::newline))
            throw ParseError(peek().loc,
                             "expected end of declaration, found '" + peek().text + "'");
        skip_newlines();
    }

    void skip_newlines() {
        while (at(Tok::newline)) advance();
    }

    double signed_number(const std::string& what) {
        bool negative = false;
        if (at(Tok::minus)) {
            advance();
            negative = true;
        }
        Token t = expect(Tok::number, what);
        return negative ? -t.value : t.value;
    }

    Block parse_block() {
        Block block;
        block.loc = peek().loc;
        std::string kw = expect_ident("'model', 'dynamics' or 'extend'");
        if (kw == "model") {
            block.kind = Block::Kind::model;
        } else if (kw == "dynamics") {
            block.kind = Block::Kind::dynamics;
        } else if (kw == "extend") {
            block.kind = Block::Kind::extend;
        } else {
            throw ParseError(block.loc, "expected 'model', 'dynamics' or 'extend', found '" +
                                            kw + "'");
        }
        block.name = expect_ident("block name");
        if (block.kind == Block::Kind::extend) {
            if (!at_word("of"))
                throw ParseError(peek().loc, "expected 'of' after extension name");
            advance();
            block.base = expect_ident("base model name");
        }
        expect(Tok::lbrace, "'{'");
        skip_newlines();
        while (!at(Tok::rbrace)) {
            block.decls.push_back(parse_decl(block.kind));
            skip_newlines();
        }
        expect(Tok::rbrace, "'}'");
        return block;
    }

    Decl parse_decl(Block::Kind context) {
        SourceLoc at_loc = peek().loc;
        std::string kw = expect_ident("declaration keyword");
        auto reject_unless = [&](bool allowed) {
            if (!allowed)
                throw ParseError(at_loc, "'" + kw + "' is not valid in this block");
        };
        if (kw == "var") return finish_names<VarDecl>(at_loc);
        if (kw == "exo") return parse_exo(at_loc);
        if (kw == "param") return parse_param(at_loc);
        if (kw == "eq") {
            reject_unless(context != Block::Kind::dynamics);
            return parse_eq(at_loc);
        }
        if (kw == "ddt") {
            reject_unless(context == Block::Kind::dynamics);
            return parse_ddt(at_loc);
        }
        if (kw == "selfreg") {
            reject_unless(context == Block::Kind::dynamics);
            return finish_names<SelfregDecl>(at_loc);
        }
        if (kw == "positive") return finish_names<PositiveDecl>(at_loc);
        if (kw == "promote") {
            reject_unless(context == Block::Kind::extend);
            return parse_promote(at_loc);
        }
        throw ParseError(at_loc, "unknown declaration '" + kw + "'");
    }

    template <typename DeclT>
    Decl finish_names(SourceLoc loc) {
        DeclT d;
        d.loc = std::move(loc);
        d.names.push_back(expect_ident("identifier"));
        while (at(Tok::comma)) {
            advance();
            d.names.push_back(expect_ident("identifier"));
        }
        expect_end_of_decl();
        return d;
    }

    Decl parse_exo(SourceLoc loc) {
        ExoDecl d;
        d.loc = std::move(loc);
        do {
            ExoDecl::Item item;
            item.name = expect_ident("exogenous identifier");
            if (at(Tok::tilde)) {
                advance();
                SourceLoc dist_loc = peek().loc;
                std::string family = expect_ident("distribution family");
                Distribution dist;
                if (family == "LogNormal") {
                    dist.kind = Distribution::Kind::log_normal;
                } else if (family == "Uniform") {
                    dist.kind = Distribution::Kind::uniform;
                } else {
                    throw ParseError(dist_loc, "unknown distribution '" + family +
                                                   "' (LogNormal and Uniform are supported)");
                }
                expect(Tok::lparen, "'('");
                dist.a = signed_number("distribution parameter");
                expect(Tok::comma, "','");
                dist.b = signed_number("distribution parameter");
                expect(Tok::rparen, "')'");
                item.dist = dist;
            }
            d.items.push_back(std::move(item));
            if (!at(Tok::comma)) break;
            advance();
        } while (true);
        expect_end_of_decl();
        return d;
    }

    Decl parse_param(SourceLoc loc) {
        ParamDecl d;
        d.loc = std::move(loc);
        do {
            ParamDecl::Item item;
            item.name = expect_ident("parameter identifier");
            if (at(Tok::equals)) {
                advance();
                item.value = signed_number("parameter value");
            }
            d.items.push_back(std::move(item));
            if (!at(Tok::comma)) break;
            advance();
        } while (true);
        expect_end_of_decl();
        return d;
    }

    Decl parse_eq(SourceLoc loc) {
        EqDecl d;
        d.loc = std::move(loc);
        d.name = expect_ident("equation name");
        expect(Tok::colon, "':'");
        if (at_word("depends")) {
            advance();
            expect(Tok::lparen, "'('");
            d.depends.push_back(expect_ident("identifier"));
            while (at(Tok::comma)) {
                advance();
                d.depends.push_back(expect_ident("identifier"));
            }
            expect(Tok::rparen, "')'");
        } else {
            d.lhs = parse_expr();
            expect(Tok::equals, "'='");
            d.rhs = parse_expr();
        }
        expect_end_of_decl();
        return d;
    }

    Decl parse_ddt(SourceLoc loc) {
        DdtDecl d;
        d.loc = std::move(loc);
        d.var = expect_ident("variable name");
        expect(Tok::colon, "':'");
        if (at_word("depends")) {
            advance();
            expect(Tok::lparen, "'('");
            d.depends.push_back(expect_ident("identifier"));
            while (at(Tok::comma)) {
                advance();
                d.depends.push_back(expect_ident("identifier"));
            }
            expect(Tok::rparen, "')'");
        } else {
            d.rhs = parse_expr();
        }
        expect_end_of_decl();
        return d;
    }

    Decl parse_promote(SourceLoc loc) {
        PromoteDecl d;
        d.loc = std::move(loc);
        d.from = expect_ident("promoted identifier");
        d.to = d.from;
        if (at(Tok::arrow)) {
            advance();
            d.to = expect_ident("endogenous name");
        }
        expect_end_of_decl();
        return d;
    }

    // expr := term (('+'|'-') term)*
    ExprPtr parse_expr() {
        ExprPtr e = parse_term();
        while (at(Tok::plus) || at(Tok::minus)) {
            Tok op = advance().kind;
            ExprPtr r = parse_term();
            e = make_bin(op == Tok::plus ? ExprOp::add : ExprOp::sub, e, r);
        }
        return e;
    }

    // term := factor (('*'|'/') factor)*
    ExprPtr parse_term() {
        ExprPtr e = parse_factor();
        while (at(Tok::star) || at(Tok::slash)) {
            Tok op = advance().kind;
            ExprPtr r = parse_factor();
            e = make_bin(op == Tok::star ? ExprOp::mul : ExprOp::div, e, r);
        }
        return e;
    }

    // factor := '-' factor | power
    ExprPtr parse_factor() {
        if (at(Tok::minus)) {
            advance();
            return make_neg(parse_factor());
        }
        return parse_power();
    }

    // power := primary ('^' factor)?     (right-associative)
    ExprPtr parse_power() {
        ExprPtr base = parse_primary();
        if (at(Tok::caret)) {
            advance();
            return make_bin(ExprOp::pow, base, parse_factor());
        }
        return base;
    }

    ExprPtr parse_primary() {
        if (at(Tok::number)) return make_num(advance().value);
        if (at(Tok::ident)) return make_sym(advance().text);
        if (at(Tok::lparen)) {
            advance();
            ExprPtr e = parse_expr();
            expect(Tok::rparen, "')'");
            return e;
        }
        throw ParseError(peek().loc,
                         "expected expression, found '" + peek().text + "'");
    }
};

// ---------------------------------------------------------------------------
// Lowering
// ---------------------------------------------------------------------------

struct SymbolTable {
    std::vector<std::string> vars, exo, params;
    std::map<std::string, SourceLoc> declared;

    void declare(const std::string& name, std::vector<std::string>& into,
                 const SourceLoc& loc) {
        if (declared.count(name))
            throw ValidationError(loc, "duplicate declaration of '" + name + "'");
        declared.emplace(name, loc);
        into.push_back(name);
    }

    bool is_var(const std::string& n) const {
        return std::find(vars.begin(), vars.end(), n) != vars.end();
    }
    bool is_exo(const std::string& n) const {
        return std::find(exo.begin(), exo.end(), n) != exo.end();
    }
    bool is_param(const std::string& n) const {
        return std::find(params.begin(), params.end(), n) != params.end();
    }
    bool known(const std::string& n) const { return declared.count(n) > 0; }
};

std::vector<std::string> equation_symbols(const EqDecl& d, ExprPtr residual) {
    if (d.structural()) {
        std::vector<std::string> seen;
        for (const auto& s : d.depends)
            if (std::find(seen.begin(), seen.end(), s) == seen.end()) seen.push_back(s);
        return seen;
    }
    auto syms = free_symbols(*residual);
    return {syms.begin(), syms.end()};
}

ExprPtr residual_of(const EqDecl& d) {
    if (d.structural()) return nullptr;
    if (d.rhs->op == ExprOp::num && d.rhs->value == 0.0) return d.lhs;
    return make_bin(ExprOp::sub, d.lhs, d.rhs);
}

void classify_and_connect(const SymbolTable& table, const std::string& eq,
                          const std::vector<std::string>& symbols, const SourceLoc& loc,
                          std::vector<std::pair<std::string, std::string>>& var_edges,
                          std::vector<std::pair<std::string, std::string>>& exo_edges,
                          std::vector<std::pair<std::string, std::string>>& param_edges) {
    // Deterministic edge order: declaration order within each role.
    std::set<std::string> wanted(symbols.begin(), symbols.end());
    for (const auto& s : symbols)
        if (!table.known(s))
            throw ValidationError(loc, "equation " + eq + " references undeclared symbol '" +
                                           s + "'");
    for (const auto& v : table.vars)
        if (wanted.count(v)) var_edges.push_back({v, eq});
    for (const auto& w : table.exo)
        if (wanted.count(w)) exo_edges.push_back({w, eq});
    for (const auto& p : table.params)
        if (wanted.count(p)) param_edges.push_back({p, eq});
}

IncidenceModel lower_model(const Block& block) {
    IncidenceModel model;
    model.name = block.name;
    SymbolTable table;
    std::vector<const EqDecl*> eqs;

    for (const auto& decl : block.decls) {
        if (const auto* d = std::get_if<VarDecl>(&decl)) {
            for (const auto& n : d->names) table.declare(n, table.vars, d->loc);
        } else if (const auto* d = std::get_if<ExoDecl>(&decl)) {
            for (const auto& item : d->items) {
                table.declare(item.name, table.exo, d->loc);
                if (item.dist) {
                    item.dist->validate(item.name);
                    model.distributions[item.name] = *item.dist;
                }
            }
        } else if (const auto* d = std::get_if<ParamDecl>(&decl)) {
            for (const auto& item : d->items) {
                table.declare(item.name, table.params, d->loc);
                if (item.value) model.param_values[item.name] = *item.value;
            }
        }
    }
    for (const auto& decl : block.decls) {
        if (const auto* d = std::get_if<EqDecl>(&decl)) {
            if (table.known(d->name) ||
                std::find(model.equations.begin(), model.equations.end(), d->name) !=
                    model.equations.end())
                throw ValidationError(d->loc, "duplicate declaration of '" + d->name + "'");
            model.equations.push_back(d->name);
            eqs.push_back(d);
        } else if (const auto* d = std::get_if<PositiveDecl>(&decl)) {
            for (const auto& n : d->names) {
                if (!table.is_var(n))
                    throw ValidationError(d->loc,
                                          "positivity flag on non-variable '" + n + "'");
                model.positive.push_back(n);
            }
        }
    }
    model.variables = table.vars;
    model.exogenous = table.exo;
    model.parameters = table.params;
    for (const EqDecl* d : eqs) {
        ExprPtr residual = residual_of(*d);
        classify_and_connect(table, d->name, equation_symbols(*d, residual), d->loc,
                             model.var_edges, model.exo_edges, model.param_edges);
        if (residual) model.residuals[d->name] = residual;
    }
    model.validate();
    return model;
}

DynamicalModel lower_dynamics(const Block& block) {
    DynamicalModel dyn;
    dyn.name = block.name;
    SymbolTable table;

    for (const auto& decl : block.decls) {
        if (const auto* d = std::get_if<VarDecl>(&decl)) {
            for (const auto& n : d->names) table.declare(n, table.vars, d->loc);
        } else if (const auto* d = std::get_if<ExoDecl>(&decl)) {
            for (const auto& item : d->items) {
                table.declare(item.name, table.exo, d->loc);
                if (item.dist) {
                    item.dist->validate(item.name);
                    dyn.distributions[item.name] = *item.dist;
                }
            }
        } else if (const auto* d = std::get_if<ParamDecl>(&decl)) {
            for (const auto& item : d->items) {
                table.declare(item.name, table.params, d->loc);
                if (item.value) dyn.param_values[item.name] = *item.value;
            }
        }
    }
    dyn.variables = table.vars;
    dyn.exogenous = table.exo;
    dyn.parameters = table.params;

    for (const auto& decl : block.decls) {
        if (const auto* d = std::get_if<DdtDecl>(&decl)) {
            if (!table.is_var(d->var))
                throw ValidationError(d->loc, "'ddt' for undeclared variable '" + d->var + "'");
            if (dyn.odes.count(d->var))
                throw ValidationError(d->loc, "duplicate 'ddt' for variable '" + d->var + "'");
            Ode ode;
            if (d->structural()) {
                std::set<std::string> seen;
                for (const auto& s : d->depends) {
                    if (!table.known(s))
                        throw ValidationError(
                            d->loc, "'ddt' of " + d->var + " references undeclared symbol '" +
                                        s + "'");
                    if (seen.insert(s).second) ode.deps.push_back(s);
                }
            } else {
                ode.rhs = d->rhs;
                for (const auto& s : free_symbols(*d->rhs)) {
                    if (!table.known(s))
                        throw ValidationError(
                            d->loc, "'ddt' of " + d->var + " references undeclared symbol '" +
                                        s + "'");
                    ode.deps.push_back(s);
                }
            }
            dyn.odes[d->var] = std::move(ode);
        } else if (const auto* d = std::get_if<SelfregDecl>(&decl)) {
            for (const auto& n : d->names) {
                if (!table.is_var(n))
                    throw ValidationError(d->loc, "'selfreg' on non-variable '" + n + "'");
                dyn.self_regulating[n] = true;
            }
        } else if (const auto* d = std::get_if<PositiveDecl>(&decl)) {
            for (const auto& n : d->names) {
                if (!table.is_var(n))
                    throw ValidationError(d->loc, "'positive' on non-variable '" + n + "'");
                dyn.positive.push_back(n);
            }
        }
    }
    for (const auto& v : dyn.variables)
        if (!dyn.odes.count(v))
            throw ValidationError(block.loc, "variable " + v + " in dynamics block '" +
                                                 block.name + "' has no 'ddt' entry");
    for (const auto& [v, flag] : dyn.self_regulating) {
        if (!flag) continue;
        const Ode& ode = dyn.odes.at(v);
        if (std::find(ode.deps.begin(), ode.deps.end(), v) == ode.deps.end())
            throw ValidationError(block.loc, "'selfreg' on variable '" + v +
                                                 "' that is absent from its own ODE");
    }
    dyn.validate();
    return dyn;
}

ExtensionSpec lower_extend(const Block& block, const IncidenceModel& base) {
    ExtensionSpec ext;
    ext.name = block.name;
    ext.base = base;

    SymbolTable table;  // extension-local declarations
    std::map<std::string, std::string> promoted;  // new name -> base symbol

    for (const auto& decl : block.decls) {
        if (const auto* d = std::get_if<VarDecl>(&decl)) {
            for (const auto& n : d->names) {
                table.declare(n, table.vars, d->loc);
                ext.added_variables.push_back(n);
            }
        } else if (const auto* d = std::get_if<PromoteDecl>(&decl)) {
            bool in_base = std::find(base.exogenous.begin(), base.exogenous.end(), d->from) !=
                               base.exogenous.end() ||
                           std::find(base.parameters.begin(), base.parameters.end(),
                                     d->from) != base.parameters.end();
            if (!in_base)
                throw ValidationError(
                    d->loc, "promotion of '" + d->from +
                                "' which is not an exogenous variable or parameter of '" +
                                base.name + "'");
            table.declare(d->to, table.vars, d->loc);
            ext.added_variables.push_back(d->to);
            ext.promotions.push_back({d->from, d->to});
            promoted[d->to] = d->from;
        } else if (const auto* d = std::get_if<ExoDecl>(&decl)) {
            for (const auto& item : d->items) {
                table.declare(item.name, table.exo, d->loc);
                ext.added_exogenous.push_back(item.name);
                if (item.dist) {
                    item.dist->validate(item.name);
                    ext.distributions[item.name] = *item.dist;
                }
            }
        } else if (const auto* d = std::get_if<ParamDecl>(&decl)) {
            for (const auto& item : d->items) {
                table.declare(item.name, table.params, d->loc);
                ext.added_parameters.push_back(item.name);
                if (item.value) ext.param_values[item.name] = *item.value;
            }
        }
    }

    // Classification table for F+ symbols: the extended namespace. Promoted
    // symbols must be referenced by their new endogenous names.
    std::set<std::string> promoted_base;
    for (const auto& [from, to] : ext.promotions) promoted_base.insert(from);

    auto classify = [&](const std::string& eq, const std::vector<std::string>& symbols,
                        const SourceLoc& loc) {
        std::set<std::string> wanted(symbols.begin(), symbols.end());
        for (const auto& s : symbols) {
            if (promoted_base.count(s))
                throw ValidationError(loc, "equation " + eq + " references '" + s +
                                               "' which was promoted; use its endogenous name");
            bool known = table.known(s) || base.has_variable(s) ||
                         std::find(base.exogenous.begin(), base.exogenous.end(), s) !=
                             base.exogenous.end() ||
                         std::find(base.parameters.begin(), base.parameters.end(), s) !=
                             base.parameters.end();
            if (!known)
                throw ValidationError(
                    loc, "equation " + eq + " references undeclared symbol '" + s + "'");
        }
        for (const auto& v : base.variables)
            if (wanted.count(v)) ext.eq_var_edges.push_back({v, eq});
        for (const auto& v : table.vars)
            if (wanted.count(v)) ext.eq_var_edges.push_back({v, eq});
        for (const auto& w : base.exogenous)
            if (wanted.count(w)) ext.eq_exo_edges.push_back({w, eq});
        for (const auto& w : table.exo)
            if (wanted.count(w)) ext.eq_exo_edges.push_back({w, eq});
        for (const auto& p : base.parameters)
            if (wanted.count(p)) ext.eq_param_edges.push_back({p, eq});
        for (const auto& p : table.params)
            if (wanted.count(p)) ext.eq_param_edges.push_back({p, eq});
    };

    for (const auto& decl : block.decls) {
        if (const auto* d = std::get_if<EqDecl>(&decl)) {
            if (base.has_equation(d->name) ||
                std::find(ext.added_equations.begin(), ext.added_equations.end(), d->name) !=
                    ext.added_equations.end())
                throw ValidationError(d->loc, "duplicate equation '" + d->name + "'");
            ext.added_equations.push_back(d->name);
            ExprPtr residual = residual_of(*d);
            classify(d->name, equation_symbols(*d, residual), d->loc);
            if (residual) ext.residuals[d->name] = residual;
        } else if (const auto* d = std::get_if<PositiveDecl>(&decl)) {
            for (const auto& n : d->names) {
                if (!table.is_var(n))
                    throw ValidationError(d->loc,
                                          "'positive' on non-variable '" + n + "'");
                ext.positive.push_back(n);
            }
        }
    }
    ext.validate();
    return ext;
}

}  // namespace

const IncidenceModel* LoweredFile::find_model(const std::string& name) const {
    for (const auto& m : models)
        if (m.name == name) return &m;
    return nullptr;
}

const DynamicalModel* LoweredFile::find_dynamics(const std::string& name) const {
    for (const auto& d : dynamics)
        if (d.name == name) return &d;
    return nullptr;
}

const ExtensionSpec* LoweredFile::find_extension(const std::string& name) const {
    for (const auto& e : extensions)
        if (e.name == name) return &e;
    return nullptr;
}

ModelFile parse(const std::string& text, const std::string& filename) {
    Parser parser(tokenize(text, filename));
    return parser.parse_file(filename);
}

LoweredFile lower(const ModelFile& file) {
    std::set<std::string> block_names;
    for (const auto& block : file.blocks)
        if (!block_names.insert(block.name).second)
            throw ValidationError(block.loc, "duplicate block name '" + block.name + "'");

    LoweredFile lowered;
    for (const auto& block : file.blocks) {
        if (block.kind == Block::Kind::model) lowered.models.push_back(lower_model(block));
        if (block.kind == Block::Kind::dynamics)
            lowered.dynamics.push_back(lower_dynamics(block));
    }
    for (const auto& block : file.blocks) {
        if (block.kind != Block::Kind::extend) continue;
        const IncidenceModel* base = lowered.find_model(block.base);
        if (!base)
            throw ValidationError(block.loc, "extension '" + block.name +
                                                 "' references unknown model '" + block.base +
                                                 "'");
        lowered.extensions.push_back(lower_extend(block, *base));
    }
    return lowered;
}

namespace {

std::string dist_text(const Distribution& d) {
    std::ostringstream os;
    os.precision(17);
    os << (d.kind == Distribution::Kind::log_normal ? "LogNormal(" : "Uniform(") << d.a
       << ", " << d.b << ")";
    return os.str();
}

std::string number_text(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

struct DeclPrinter {
    std::ostringstream& os;

    void operator()(const VarDecl& d) { line("var", d.names); }
    void operator()(const SelfregDecl& d) { line("selfreg", d.names); }
    void operator()(const PositiveDecl& d) { line("positive", d.names); }

    void operator()(const ExoDecl& d) {
        os << "  exo ";
        for (std::size_t i = 0; i < d.items.size(); ++i) {
            if (i) os << ", ";
            os << d.items[i].name;
            if (d.items[i].dist) os << " ~ " << dist_text(*d.items[i].dist);
        }
        os << "\n";
    }

    void operator()(const ParamDecl& d) {
        os << "  param ";
        for (std::size_t i = 0; i < d.items.size(); ++i) {
            if (i) os << ", ";
            os << d.items[i].name;
            if (d.items[i].value) os << " = " << number_text(*d.items[i].value);
        }
        os << "\n";
    }

    void operator()(const EqDecl& d) {
        os << "  eq " << d.name << ": ";
        if (d.structural()) {
            os << "depends(";
            for (std::size_t i = 0; i < d.depends.size(); ++i)
                os << (i ? ", " : "") << d.depends[i];
            os << ")";
        } else {
            os << to_string(*d.lhs) << " = " << to_string(*d.rhs);
        }
        os << "\n";
    }

    void operator()(const DdtDecl& d) {
        os << "  ddt " << d.var << ": ";
        if (d.structural()) {
            os << "depends(";
            for (std::size_t i = 0; i < d.depends.size(); ++i)
                os << (i ? ", " : "") << d.depends[i];
            os << ")";
        } else {
            os << to_string(*d.rhs);
        }
        os << "\n";
    }

    void operator()(const PromoteDecl& d) {
        os << "  promote " << d.from;
        if (d.to != d.from) os << " -> " << d.to;
        os << "\n";
    }

    void line(const char* kw, const std::vector<std::string>& names) {
        os << "  " << kw << " ";
        for (std::size_t i = 0; i < names.size(); ++i) os << (i ? ", " : "") << names[i];
        os << "\n";
    }
};

}  // namespace

std::string serialize(const ModelFile& file) {
    std::ostringstream os;
    for (std::size_t b = 0; b < file.blocks.size(); ++b) {
        const Block& block = file.blocks[b];
        if (b) os << "\n";
        switch (block.kind) {
            case Block::Kind::model: os << "model " << block.name; break;
            case Block::Kind::dynamics: os << "dynamics " << block.name; break;
            case Block::Kind::extend:
                os << "extend " << block.name << " of " << block.base;
                break;
        }
        os << " {\n";
        DeclPrinter printer{os};
        for (const auto& decl : block.decls) std::visit(printer, decl);
        os << "}\n";
    }
    return os.str();
}

LoweredFile load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return lower(parse(buffer.str(), path));
}

}  // namespace cord
