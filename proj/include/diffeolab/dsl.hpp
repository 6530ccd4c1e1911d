#pragma once
// dsl.hpp -- text front end.  A document is a sequence of declarations
// (spaces, bundles, gluings, sections) followed or interleaved with query
// commands; parsing resolves declarations eagerly so commands can be checked
// against previously declared names.
//
// Raises: ParseError (syntax, positions are 1-based and point at the start of
// the offending token), Error(BreakLocusUnsupported) when abs is applied to
// anything but a single variable, Error(UnknownName) when a command or
// declaration references a name that has not been declared, and the
// construction errors of the objects themselves (e.g. NotBaseIdentity).

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "diffeolab/bundle.hpp"
#include "diffeolab/dvs.hpp"
#include "diffeolab/errors.hpp"
#include "diffeolab/metric.hpp"
#include "diffeolab/pwpoly.hpp"

namespace diffeolab::dsl {

// ---------------------------------------------------------------------------
// document model

struct SpaceDecl {
    std::string name;
    DVSpace space;
};

struct BundleDecl {
    std::string name;
    PseudoBundle bundle;
};

// Gluings are stored symbolically; materialising the glued bundle runs the
// lift checks, which belong to evaluation rather than parsing.
struct GlueDecl {
    std::string name;
    std::string left, right;
    GluingSpec spec;
};

struct SectionDecl {
    std::string name;
    std::string bundle;  // a declared generated/pullback bundle
    StratifiedSection section;
};

// One query.  `kind` is the command keyword; `sub` is the commute variant
// ("dual", "product", "tensor"); `names` are the referenced declarations in
// source order; point / plot / matrix carry the inline argument when the
// command has one.
struct Command {
    std::string kind;
    std::string sub;
    std::vector<std::string> names;
    Point point;
    PlotMap plot;
    Mat matrix;
    int line = 0, column = 0;
};

struct Document {
    std::vector<SpaceDecl> spaces;
    std::vector<BundleDecl> bundles;
    std::vector<GlueDecl> glues;
    std::vector<SectionDecl> sections;
    std::vector<Command> commands;

    const SpaceDecl* find_space(const std::string& n) const {
        for (const auto& d : spaces)
            if (d.name == n) return &d;
        return nullptr;
    }
    const BundleDecl* find_bundle(const std::string& n) const {
        for (const auto& d : bundles)
            if (d.name == n) return &d;
        return nullptr;
    }
    const GlueDecl* find_glue(const std::string& n) const {
        for (const auto& d : glues)
            if (d.name == n) return &d;
        return nullptr;
    }
    const SectionDecl* find_section(const std::string& n) const {
        for (const auto& d : sections)
            if (d.name == n) return &d;
        return nullptr;
    }
};

// ---------------------------------------------------------------------------
// lexer

namespace detail {

struct Token {
    enum Kind { Ident, Int, Punct, End } kind = End;
    std::string text;
    int line = 1, column = 1;
};

inline bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    const size_t n = src.size();
    auto bump = [&](char c) {
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    };
    static const std::string punct = "()[]{},;:=+-*^/";
    while (i < n) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            bump(c);
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < n && src[i] != '\n') {
                bump(src[i]);
                ++i;
            }
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        if (is_ident_start(c)) {
            size_t j = i;
            while (j < n && is_ident_char(src[j])) ++j;
            t.kind = Token::Ident;
            t.text = src.substr(i, j - i);
        } else if (is_digit(c)) {
            size_t j = i;
            while (j < n && is_digit(src[j])) ++j;
            t.kind = Token::Int;
            t.text = src.substr(i, j - i);
        } else if (punct.find(c) != std::string::npos) {
            t.kind = Token::Punct;
            t.text = std::string(1, c);
        } else {
            throw ParseError(line, col, "a token (unexpected character '" + std::string(1, c) + "')");
        }
        for (char ch : t.text) bump(ch);
        i += t.text.size();
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Token::End;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

// ---------------------------------------------------------------------------
// expression syntax tree (built before the domain dimension is known)

struct Expr {
    enum Kind { Num, Var, AbsVar, Add, Sub, Mul, Neg, Pow } kind = Num;
    Rat num;
    bool y_var = false;  // Var / AbsVar: x-family or y-family
    int index = 0;       // Var / AbsVar: 1-based
    int power = 0;       // Pow
    std::vector<Expr> kids;
    int line = 0, column = 0;
};

// Recognise x<digits> / y<digits> with no leading zero.
inline bool classify_var(const std::string& s, bool& y_var, int& index) {
    if (s.size() < 2 || (s[0] != 'x' && s[0] != 'y')) return false;
    if (s[1] == '0') return false;
    for (size_t i = 1; i < s.size(); ++i)
        if (!is_digit(s[i])) return false;
    y_var = s[0] == 'y';
    index = std::stoi(s.substr(1));
    return true;
}

inline void expr_max_indices(const Expr& e, int& max_x, int& max_y) {
    if (e.kind == Expr::Var || e.kind == Expr::AbsVar) {
        (e.y_var ? max_y : max_x) = std::max(e.y_var ? max_y : max_x, e.index);
    }
    for (const Expr& k : e.kids) expr_max_indices(k, max_x, max_y);
}

// Lower to a piecewise polynomial over `dim` variables: x_i -> slot i-1
// (requires i <= split), y_j -> slot split + j - 1.
inline OrthantPoly expr_to_poly(const Expr& e, int dim, int split, bool allow_y) {
    switch (e.kind) {
        case Expr::Num:
            return OrthantPoly::constant(dim, e.num);
        case Expr::Var:
        case Expr::AbsVar: {
            int slot;
            if (e.y_var) {
                if (!allow_y)
                    throw ParseError(e.line, e.column, "a base variable (x-family)");
                slot = split + e.index - 1;
            } else {
                if (e.index > split)
                    throw ParseError(e.line, e.column,
                                     "a variable index at most " + std::to_string(split));
                slot = e.index - 1;
            }
            return e.kind == Expr::Var ? OrthantPoly::var(dim, slot)
                                       : OrthantPoly::absvar(dim, slot);
        }
        case Expr::Add:
            return add(expr_to_poly(e.kids[0], dim, split, allow_y),
                       expr_to_poly(e.kids[1], dim, split, allow_y));
        case Expr::Sub:
            return sub(expr_to_poly(e.kids[0], dim, split, allow_y),
                       expr_to_poly(e.kids[1], dim, split, allow_y));
        case Expr::Mul:
            return mul(expr_to_poly(e.kids[0], dim, split, allow_y),
                       expr_to_poly(e.kids[1], dim, split, allow_y));
        case Expr::Neg:
            return neg(expr_to_poly(e.kids[0], dim, split, allow_y));
        case Expr::Pow: {
            OrthantPoly base = expr_to_poly(e.kids[0], dim, split, allow_y);
            OrthantPoly acc = OrthantPoly::constant(dim, Rat(1));
            for (int i = 0; i < e.power; ++i) acc = mul(acc, base);
            return acc;
        }
    }
    return OrthantPoly::zero(dim);
}

// ---------------------------------------------------------------------------
// parser

struct Parser {
    std::vector<Token> toks;
    size_t pos = 0;
    Document doc;
    std::set<std::string> names;  // one namespace for all declarations

    const Token& peek(int ahead = 0) const {
        size_t i = pos + static_cast<size_t>(ahead);
        return i < toks.size() ? toks[i] : toks.back();
    }
    const Token& advance() { return toks[pos < toks.size() - 1 ? pos++ : pos]; }

    [[noreturn]] void fail(const Token& t, const std::string& expected) const {
        throw ParseError(t.line, t.column, expected);
    }

    bool at_punct(const std::string& p) const {
        return peek().kind == Token::Punct && peek().text == p;
    }
    bool at_ident(const std::string& s) const {
        return peek().kind == Token::Ident && peek().text == s;
    }
    void expect_punct(const std::string& p) {
        if (!at_punct(p)) fail(peek(), "'" + p + "'");
        advance();
    }
    std::string expect_ident(const std::string& what) {
        if (peek().kind != Token::Ident) fail(peek(), what);
        return advance().text;
    }
    long expect_int(const std::string& what) {
        if (peek().kind != Token::Int) fail(peek(), what);
        return std::stol(advance().text);
    }

    static const std::set<std::string>& keywords() {
        static const std::set<std::string> kw = {
            "space",        "bundle",     "glue",       "section",      "on",
            "standard",     "coarse",     "generated",  "pullback_coarse",
            "at",           "default",    "abs",        "dual",         "forms",
            "pseudometric", "fibre",      "dual_profile", "member",     "smoothmap",
            "check_metric", "find_metric", "compatible", "commute",     "product",
            "tensor"};
        return kw;
    }

    std::string fresh_name() {
        const Token& t = peek();
        std::string n = expect_ident("a name");
        bool yv;
        int idx;
        if (keywords().count(n) || classify_var(n, yv, idx))
            fail(t, "a name (not a keyword or variable)");
        if (names.count(n)) fail(t, "an undeclared name ('" + n + "' is already declared)");
        names.insert(n);
        return n;
    }

    std::string declared_name(const std::string& what) {
        const Token& t = peek();
        std::string n = expect_ident(what);
        if (!names.count(n))
            throw Error(Err::UnknownName, "line " + std::to_string(t.line) + ", column " +
                                              std::to_string(t.column) + ": '" + n +
                                              "' has not been declared");
        return n;
    }

    // rational with optional sign, for points and numeric matrices
    Rat parse_rat() {
        bool negate = false;
        if (at_punct("-")) {
            advance();
            negate = true;
        }
        const Token& t = peek();
        if (t.kind != Token::Int) fail(t, "a rational number");
        long num = std::stol(advance().text);
        long den = 1;
        if (at_punct("/")) {
            advance();
            const Token& d = peek();
            if (d.kind != Token::Int) fail(d, "a denominator");
            den = std::stol(advance().text);
            if (den == 0) fail(d, "a nonzero denominator");
        }
        Rat r(num, den);
        return negate ? -r : r;
    }

    Point parse_point() {
        expect_punct("(");
        Point p;
        if (!at_punct(")")) {
            p.push_back(parse_rat());
            while (at_punct(",")) {
                advance();
                p.push_back(parse_rat());
            }
        }
        expect_punct(")");
        return p;
    }

    Mat parse_matrix() {
        expect_punct("[");
        Mat m;
        while (true) {
            expect_punct("[");
            Vec row;
            if (!at_punct("]")) {
                row.push_back(parse_rat());
                while (at_punct(",")) {
                    advance();
                    row.push_back(parse_rat());
                }
            }
            expect_punct("]");
            m.push_back(std::move(row));
            if (at_punct(",")) {
                advance();
                continue;
            }
            break;
        }
        expect_punct("]");
        return m;
    }

    // expression grammar: sum of terms, terms are products of powers of atoms
    Expr parse_expr() {
        Expr lhs = parse_term();
        while (at_punct("+") || at_punct("-")) {
            bool plus = peek().text == "+";
            const Token& op = advance();
            Expr node;
            node.kind = plus ? Expr::Add : Expr::Sub;
            node.line = op.line;
            node.column = op.column;
            node.kids.push_back(std::move(lhs));
            node.kids.push_back(parse_term());
            lhs = std::move(node);
        }
        return lhs;
    }

    Expr parse_term() {
        Expr lhs = parse_factor();
        while (at_punct("*")) {
            const Token& op = advance();
            Expr node;
            node.kind = Expr::Mul;
            node.line = op.line;
            node.column = op.column;
            node.kids.push_back(std::move(lhs));
            node.kids.push_back(parse_factor());
            lhs = std::move(node);
        }
        return lhs;
    }

    Expr parse_factor() {
        // unary minus binds looser than '^': -x1^2 means -(x1^2)
        if (at_punct("-")) {
            const Token& t = advance();
            Expr node;
            node.kind = Expr::Neg;
            node.line = t.line;
            node.column = t.column;
            node.kids.push_back(parse_factor());
            return node;
        }
        Expr base = parse_atom();
        if (at_punct("^")) {
            advance();
            const Token& t = peek();
            if (t.kind != Token::Int) fail(t, "an integer exponent");
            Expr node;
            node.kind = Expr::Pow;
            node.power = static_cast<int>(std::stol(advance().text));
            node.line = t.line;
            node.column = t.column;
            node.kids.push_back(std::move(base));
            return node;
        }
        return base;
    }

    Expr parse_atom() {
        const Token& t = peek();
        if (t.kind == Token::Int) {
            Expr node;
            node.kind = Expr::Num;
            node.line = t.line;
            node.column = t.column;
            long num = std::stol(advance().text);
            long den = 1;
            if (at_punct("/") && peek(1).kind == Token::Int) {
                advance();
                const Token& d = peek();
                den = std::stol(advance().text);
                if (den == 0) fail(d, "a nonzero denominator");
            }
            node.num = Rat(num, den);
            return node;
        }
        if (t.kind == Token::Ident) {
            if (t.text == "abs") {
                advance();
                expect_punct("(");
                const Token& arg = peek();
                bool yv = false;
                int idx = 0;
                bool ok = arg.kind == Token::Ident && classify_var(arg.text, yv, idx) &&
                          peek(1).kind == Token::Punct && peek(1).text == ")";
                if (!ok)
                    throw Error(Err::BreakLocusUnsupported,
                                "line " + std::to_string(arg.line) + ", column " +
                                    std::to_string(arg.column) +
                                    ": abs applies to a single variable");
                advance();
                advance();
                Expr node;
                node.kind = Expr::AbsVar;
                node.y_var = yv;
                node.index = idx;
                node.line = arg.line;
                node.column = arg.column;
                return node;
            }
            bool yv = false;
            int idx = 0;
            if (classify_var(t.text, yv, idx)) {
                advance();
                Expr node;
                node.kind = Expr::Var;
                node.y_var = yv;
                node.index = idx;
                node.line = t.line;
                node.column = t.column;
                return node;
            }
            fail(t, "a variable, number, abs(...), or parenthesised expression");
        }
        if (t.kind == Token::Punct && t.text == "(") {
            advance();
            Expr inner = parse_expr();
            expect_punct(")");
            return inner;
        }
        fail(t, "a variable, number, abs(...), or parenthesised expression");
    }

    // one parenthesised component list, e.g. (x1, abs(x1)*abs(y1))
    std::vector<Expr> parse_expr_tuple() {
        expect_punct("(");
        std::vector<Expr> comps;
        comps.push_back(parse_expr());
        while (at_punct(",")) {
            advance();
            comps.push_back(parse_expr());
        }
        expect_punct(")");
        return comps;
    }

    // Space plots use x-variables only; the domain dimension is the largest
    // index mentioned (a constant plot gets a one-dimensional domain).
    PlotMap build_space_plot(const std::vector<Expr>& comps, int codomain) {
        int max_x = 0, max_y = 0;
        for (const Expr& e : comps) expr_max_indices(e, max_x, max_y);
        int d = std::max(max_x, 1);
        std::vector<OrthantPoly> out;
        for (const Expr& e : comps) out.push_back(expr_to_poly(e, d, d, false));
        if (static_cast<int>(out.size()) != codomain)
            throw ParseError(peek().line, peek().column,
                             "a plot with " + std::to_string(codomain) + " components");
        return PlotMap(d, std::move(out));
    }

    // Bundle plots: x1..xk are base coordinates, y-variables are extra
    // parameters appended after them.
    PlotMap build_bundle_plot(const std::vector<Expr>& comps, int total, int base) {
        int max_x = 0, max_y = 0;
        for (const Expr& e : comps) expr_max_indices(e, max_x, max_y);
        int d = base + max_y;
        std::vector<OrthantPoly> out;
        for (const Expr& e : comps) out.push_back(expr_to_poly(e, d, base, true));
        if (static_cast<int>(out.size()) != total)
            throw ParseError(peek().line, peek().column,
                             "a plot with " + std::to_string(total) + " components");
        return PlotMap(d, std::move(out));
    }

    void parse_space_decl() {
        advance();  // "space"
        std::string name = fresh_name();
        expect_punct("=");
        const Token& ctor = peek();
        std::string kind = expect_ident("standard, coarse, or generated");
        if (kind == "standard" || kind == "coarse") {
            expect_punct("(");
            int n = static_cast<int>(expect_int("a dimension"));
            expect_punct(")");
            doc.spaces.push_back(
                {name, kind == "standard" ? DVSpace::standard(n) : DVSpace::coarse(n)});
        } else if (kind == "generated") {
            expect_punct("(");
            int n = static_cast<int>(expect_int("a dimension"));
            expect_punct(";");
            std::vector<PlotMap> gens;
            gens.push_back(build_space_plot(parse_expr_tuple(), n));
            while (at_punct(",")) {
                advance();
                gens.push_back(build_space_plot(parse_expr_tuple(), n));
            }
            expect_punct(")");
            doc.spaces.push_back({name, DVSpace::generated(n, std::move(gens))});
        } else {
            fail(ctor, "standard, coarse, or generated");
        }
    }

    void parse_bundle_decl() {
        advance();  // "bundle"
        std::string name = fresh_name();
        expect_punct("=");
        const Token& ctor = peek();
        std::string kind = expect_ident("generated or pullback_coarse");
        if (kind == "generated") {
            expect_punct("(");
            int n = static_cast<int>(expect_int("a total dimension"));
            expect_punct(",");
            int k = static_cast<int>(expect_int("a base dimension"));
            expect_punct(";");
            std::vector<PlotMap> gens;
            gens.push_back(build_bundle_plot(parse_expr_tuple(), n, k));
            while (at_punct(",")) {
                advance();
                gens.push_back(build_bundle_plot(parse_expr_tuple(), n, k));
            }
            expect_punct(")");
            doc.bundles.push_back({name, make_generated_bundle(n, k, std::move(gens))});
        } else if (kind == "pullback_coarse") {
            expect_punct("(");
            int n = static_cast<int>(expect_int("a total dimension"));
            expect_punct(",");
            int k = static_cast<int>(expect_int("a base dimension"));
            expect_punct(")");
            doc.bundles.push_back({name, make_pullback_coarse_bundle(n, k)});
        } else {
            fail(ctor, "generated or pullback_coarse");
        }
    }

    void parse_glue_decl() {
        advance();  // "glue"
        std::string name = fresh_name();
        expect_punct("=");
        expect_punct("(");
        GlueDecl g;
        g.name = name;
        const Token& lt = peek();
        g.left = declared_name("a bundle name");
        if (!doc.find_bundle(g.left)) fail(lt, "a bundle name");
        expect_punct(",");
        const Token& rt = peek();
        g.right = declared_name("a bundle name");
        if (!doc.find_bundle(g.right)) fail(rt, "a bundle name");
        expect_punct(";");
        if (!at_punct(";")) {
            g.spec.points.push_back(parse_point());
            while (at_punct(",")) {
                advance();
                g.spec.points.push_back(parse_point());
            }
        }
        expect_punct(";");
        if (!at_punct(";")) {
            g.spec.images.push_back(parse_point());
            while (at_punct(",")) {
                advance();
                g.spec.images.push_back(parse_point());
            }
        }
        expect_punct(";");
        if (!at_punct(")")) {
            g.spec.lifts.push_back(parse_matrix());
            while (at_punct(",")) {
                advance();
                g.spec.lifts.push_back(parse_matrix());
            }
        }
        expect_punct(")");
        doc.glues.push_back(std::move(g));
    }

    std::vector<int> parse_sign_list(int k) {
        std::vector<int> signs;
        expect_punct("(");
        while (true) {
            const Token& t = peek();
            if (at_punct("+")) {
                signs.push_back(1);
                advance();
            } else if (at_punct("-")) {
                signs.push_back(-1);
                advance();
            } else if (t.kind == Token::Int && t.text == "0") {
                signs.push_back(0);
                advance();
            } else {
                fail(t, "a sign ('+', '-', or '0')");
            }
            if (at_punct(",")) {
                advance();
                continue;
            }
            break;
        }
        expect_punct(")");
        if (static_cast<int>(signs.size()) != k)
            fail(peek(), std::to_string(k) + " signs");
        return signs;
    }

    SecMat parse_section_matrix(int k, int m) {
        expect_punct("[");
        SecMat g;
        while (true) {
            expect_punct("[");
            std::vector<OrthantPoly> row;
            if (!at_punct("]")) {
                row.push_back(expr_to_poly(parse_expr(), k, k, false));
                while (at_punct(",")) {
                    advance();
                    row.push_back(expr_to_poly(parse_expr(), k, k, false));
                }
            }
            expect_punct("]");
            g.push_back(std::move(row));
            if (at_punct(",")) {
                advance();
                continue;
            }
            break;
        }
        expect_punct("]");
        if (static_cast<int>(g.size()) != m)
            fail(peek(), "a " + std::to_string(m) + "x" + std::to_string(m) + " matrix");
        for (const auto& row : g)
            if (static_cast<int>(row.size()) != m)
                fail(peek(), "a " + std::to_string(m) + "x" + std::to_string(m) + " matrix");
        return g;
    }

    void parse_section_decl() {
        advance();  // "section"
        std::string name = fresh_name();
        if (!at_ident("on")) fail(peek(), "'on'");
        advance();
        const Token& bt = peek();
        std::string bname = declared_name("a bundle name");
        const BundleDecl* bd = doc.find_bundle(bname);
        if (!bd) fail(bt, "a bundle name");
        const int k = bd->bundle.base_dim;
        const int m = bd->bundle.total_dim - k;
        expect_punct("=");

        std::optional<SecMat> deflt;
        std::vector<std::pair<std::vector<int>, SecMat>> overrides;
        bool any = false;
        while (at_ident("at") || at_ident("default")) {
            any = true;
            if (at_ident("default")) {
                const Token& dt = peek();
                advance();
                expect_punct(":");
                if (deflt) fail(dt, "at most one default item");
                deflt = parse_section_matrix(k, m);
            } else {
                advance();
                std::vector<int> signs = parse_sign_list(k);
                expect_punct(":");
                overrides.emplace_back(std::move(signs), parse_section_matrix(k, m));
            }
            expect_punct(";");
        }
        if (!any) fail(peek(), "'at' or 'default'");

        StratifiedSection s =
            deflt ? uniform_section(k, m, *deflt) : make_section(k, m);
        for (auto& [signs, g] : overrides) set_piece(s, signs, g);
        doc.sections.push_back({name, bname, std::move(s)});
    }

    void parse_command() {
        Command c;
        const Token& t = peek();
        c.kind = expect_ident("a command");
        c.line = t.line;
        c.column = t.column;
        if (c.kind == "dual" || c.kind == "forms" || c.kind == "pseudometric" ||
            c.kind == "dual_profile" || c.kind == "check_metric" || c.kind == "find_metric") {
            c.names.push_back(declared_name("a declared name"));
        } else if (c.kind == "fibre") {
            c.point = parse_point();
            c.names.push_back(declared_name("a bundle name"));
        } else if (c.kind == "member") {
            std::vector<Expr> comps = parse_expr_tuple();
            const Token& st = peek();
            std::string sname = declared_name("a space name");
            const SpaceDecl* sd = doc.find_space(sname);
            if (!sd) fail(st, "a space name");
            c.plot = build_space_plot(comps, sd->space.dim);
            c.names.push_back(sname);
        } else if (c.kind == "smoothmap") {
            c.matrix = parse_matrix();
            c.names.push_back(declared_name("a space name"));
            c.names.push_back(declared_name("a space name"));
        } else if (c.kind == "compatible") {
            c.names.push_back(declared_name("a section name"));
            c.names.push_back(declared_name("a section name"));
            c.names.push_back(declared_name("a glue name"));
        } else if (c.kind == "commute") {
            const Token& st = peek();
            c.sub = expect_ident("dual, product, or tensor");
            if (c.sub == "dual") {
                c.names.push_back(declared_name("a glue name"));
            } else if (c.sub == "product" || c.sub == "tensor") {
                c.names.push_back(declared_name("a glue name"));
                c.names.push_back(declared_name("a glue name"));
            } else {
                fail(st, "dual, product, or tensor");
            }
        } else {
            fail(t, "a declaration or command");
        }
        doc.commands.push_back(std::move(c));
    }

    Document parse() {
        while (peek().kind != Token::End) {
            const Token& t = peek();
            if (t.kind != Token::Ident) fail(t, "a declaration or command");
            if (t.text == "space")
                parse_space_decl();
            else if (t.text == "bundle")
                parse_bundle_decl();
            else if (t.text == "glue")
                parse_glue_decl();
            else if (t.text == "section")
                parse_section_decl();
            else
                parse_command();
        }
        return std::move(doc);
    }
};

}  // namespace detail

inline Document parse(const std::string& source) {
    detail::Parser p;
    p.toks = detail::lex(source);
    return p.parse();
}

}  // namespace diffeolab::dsl
