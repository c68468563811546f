#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "folearn/formula.hpp"

namespace folearn {

struct ParseError : std::invalid_argument {
    explicit ParseError(const std::string& what) : std::invalid_argument(what) {}
};

namespace internal {

inline bool is_var_name(const std::string& s) {
    if (s.size() < 2) return false;
    if (s[0] != 'x' && s[0] != 'y' && s[0] != 'z') return false;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

// Grammar, loosest to tightest: implies (right-assoc), or, and, unary.
//   form    := implies
//   implies := or ("->" implies)?
//   or      := and ("|" and)*
//   and     := unary ("&" unary)*
//   unary   := "!" unary | quant | "(" form ")" | "true" | "false" | atom
//   quant   := ("exists" | "forall") zvar "." form
//   atom    := "E" "(" term "," term ")" | name "(" term ")" | term "=" term
// A quantifier body extends as far right as possible.
class FormulaParser {
public:
    explicit FormulaParser(const std::string& text) : text_(text) {}

    FormulaPtr parse() {
        FormulaPtr f = parse_implies();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return f;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError("formula parse error at offset " + std::to_string(pos_) + ": " + msg);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(const std::string& tok) {
        skip_ws();
        if (text_.compare(pos_, tok.size(), tok) == 0) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    bool peek_char(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    std::string read_ident() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ < text_.size() &&
            (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
        }
        if (start == pos_) fail("expected identifier");
        return text_.substr(start, pos_ - start);
    }

    Var to_var(const std::string& s) {
        if (!is_var_name(s)) fail("expected variable (x<N>, y<N> or z<N>), got " + s);
        return Var{s[0], std::stoi(s.substr(1))};
    }

    Var parse_term() { return to_var(read_ident()); }

    FormulaPtr parse_implies() {
        FormulaPtr l = parse_or();
        if (eat("->")) return mk_implies(std::move(l), parse_implies());
        return l;
    }

    FormulaPtr parse_or() {
        FormulaPtr l = parse_and();
        while (true) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '|') {
                ++pos_;
                l = mk_or(std::move(l), parse_and());
            } else {
                return l;
            }
        }
    }

    FormulaPtr parse_and() {
        FormulaPtr l = parse_unary();
        while (true) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '&') {
                ++pos_;
                l = mk_and(std::move(l), parse_unary());
            } else {
                return l;
            }
        }
    }

    FormulaPtr parse_unary() {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '!') {
            ++pos_;
            return mk_not(parse_unary());
        }
        if (pos_ < text_.size() && text_[pos_] == '(') {
            ++pos_;
            FormulaPtr f = parse_implies();
            if (!eat(")")) fail("expected )");
            return f;
        }
        std::string ident = read_ident();
        if (ident == "exists" || ident == "forall") {
            Var v = to_var(read_ident());
            if (v.fam != 'z') fail("quantifier must bind a z* variable, got " + v.str());
            if (!eat(".")) fail("expected . after quantified variable");
            FormulaPtr body = parse_implies();
            return ident == "exists" ? mk_exists(v, std::move(body)) : mk_forall(v, std::move(body));
        }
        if (ident == "true") return mk_true();
        if (ident == "false") return mk_false();
        if (peek_char('(')) {
            ++pos_;  // consume (
            if (ident == "E") {
                Var a = parse_term();
                if (!eat(",")) fail("expected , in edge atom");
                Var b = parse_term();
                if (!eat(")")) fail("expected )");
                return mk_edge(a, b);
            }
            Var a = parse_term();
            if (!eat(")")) fail("expected )");
            return mk_color(ident, a);
        }
        // Equality atom: ident must be a variable.
        Var a = to_var(ident);
        if (!eat("=")) fail("expected = after variable " + a.str());
        Var b = parse_term();
        return mk_eq(a, b);
    }
};

}  // namespace internal

inline FormulaPtr parse_formula(const std::string& text) {
    internal::FormulaParser p(text);
    FormulaPtr f = p.parse();
    for (const Var& v : f->free_vars)
        if (v.fam == 'z') throw ParseError("unbound z* variable " + v.str());
    return f;
}

namespace internal {

inline void format_node(const Node* f, std::string& out) {
    switch (f->kind) {
        case Node::Kind::ConstTrue:
            out += "true";
            return;
        case Node::Kind::ConstFalse:
            out += "false";
            return;
        case Node::Kind::Edge:
            out += "E(" + f->a.str() + "," + f->b.str() + ")";
            return;
        case Node::Kind::Eq:
            out += f->a.str() + "=" + f->b.str();
            return;
        case Node::Kind::Color:
            out += f->color_name + "(" + f->a.str() + ")";
            return;
        case Node::Kind::Not:
            out += "!";
            format_node(f->lhs.get(), out);
            return;
        case Node::Kind::And:
        case Node::Kind::Or:
        case Node::Kind::Implies:
            out += "(";
            format_node(f->lhs.get(), out);
            out += f->kind == Node::Kind::And ? " & " : f->kind == Node::Kind::Or ? " | " : " -> ";
            format_node(f->rhs.get(), out);
            out += ")";
            return;
        case Node::Kind::Exists:
        case Node::Kind::Forall:
            out += f->kind == Node::Kind::Exists ? "(exists " : "(forall ";
            out += f->qvar.str() + ". ";
            format_node(f->lhs.get(), out);
            out += ")";
            return;
    }
    throw std::invalid_argument("format_node: unknown node kind");
}

inline void check_printable(const Node* f) {
    if (f->kind == Node::Kind::Color) {
        const std::string& c = f->color_name;
        if (c == "E" || c == "true" || c == "false" || c == "exists" || c == "forall")
            throw std::invalid_argument("format_formula: color name " + c + " collides with a keyword");
        for (char ch : c)
            if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_')
                throw std::invalid_argument("format_formula: color name " + c + " is not an identifier");
        if (is_var_name(c))
            throw std::invalid_argument("format_formula: color name " + c + " looks like a variable");
    }
    if (f->lhs) check_printable(f->lhs.get());
    if (f->rhs) check_printable(f->rhs.get());
}

}  // namespace internal

// Inverse of parse_formula: binary and quantifier nodes are printed fully
// parenthesized, so the output re-parses to a structurally equal tree.
inline std::string format_formula(const FormulaPtr& f) {
    internal::check_printable(f.get());
    std::string out;
    internal::format_node(f.get(), out);
    return out;
}

}  // namespace folearn
