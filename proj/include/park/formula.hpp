// ============================================================================
// park/formula.hpp — PLTL formula AST, concrete syntax, normal form
// ============================================================================
//
// The temporal fragment used throughout the library:
//
//     F ::= atom | ~F | F & F | F '|' F | F -> F | 'F' F | 'G' F
//
// plus an internal Next operator ('X') that the tableau engine introduces
// when it unfolds G/F across a state boundary.  X is not accepted by the
// parser; render() still prints it so truth trees stay readable.
//
// Formulas are immutable values sharing structure through shared_ptr;
// structural equality is identity everywhere (store dedup, loop checks).
//
// ============================================================================

#pragma once

#include <cctype>
#include <compare>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace park {

// ── Errors ──────────────────────────────────────────────────────────────────

/// Base error for everything this library throws.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax error in formula text; position is a 0-based byte offset.
class parse_error : public error {
public:
    parse_error(const std::string& msg, std::size_t position)
        : error(msg + " (at position " + std::to_string(position) + ")"),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

// ── Formula ─────────────────────────────────────────────────────────────────

enum class FormulaKind : unsigned char {
    Atom,
    Not,
    And,
    Or,
    Implies,
    Eventually,  // F / som
    Always,      // G / alw
    Next         // X, internal only
};

class Formula {
    struct Node {
        FormulaKind kind;
        std::string name;  // Atom only
        std::shared_ptr<const Node> left;
        std::shared_ptr<const Node> right;
    };

public:
    FormulaKind kind() const noexcept { return node_->kind; }

    /// Atom name; valid only for kind() == Atom.
    const std::string& atom_name() const { return node_->name; }

    /// Left child for binary nodes, the only child for unary ones.
    Formula left() const { return Formula(node_->left); }
    Formula right() const { return Formula(node_->right); }
    Formula child() const { return Formula(node_->left); }

    bool is_binary() const noexcept {
        switch (node_->kind) {
            case FormulaKind::And:
            case FormulaKind::Or:
            case FormulaKind::Implies: return true;
            default: return false;
        }
    }

    bool operator==(const Formula& o) const { return compare(*this, o) == 0; }
    bool operator!=(const Formula& o) const { return compare(*this, o) != 0; }
    bool operator<(const Formula& o) const { return compare(*this, o) < 0; }

    /// Structural total order: kind, then atom name, then children.
    static int compare(const Formula& a, const Formula& b) {
        return compare_nodes(a.node_.get(), b.node_.get());
    }

    // Builders live below as free functions (make_atom, make_not, ...).
    static Formula make(FormulaKind kind, std::string name,
                        const Formula* l, const Formula* r) {
        auto n = std::make_shared<Node>();
        n->kind = kind;
        n->name = std::move(name);
        if (l) n->left = l->node_;
        if (r) n->right = r->node_;
        return Formula(std::move(n));
    }

private:
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static int compare_nodes(const Node* a, const Node* b) {
        if (a == b) return 0;
        if (a->kind != b->kind)
            return static_cast<int>(a->kind) < static_cast<int>(b->kind) ? -1 : 1;
        if (a->kind == FormulaKind::Atom) return a->name.compare(b->name);
        if (int c = compare_nodes(a->left.get(), b->left.get()); c != 0) return c;
        if (a->right || b->right) {
            if (!a->right) return -1;
            if (!b->right) return 1;
            return compare_nodes(a->right.get(), b->right.get());
        }
        return 0;
    }

    std::shared_ptr<const Node> node_;
};

// ── Builders ────────────────────────────────────────────────────────────────

/// True when `name` is usable as an atom: [a-zA-Z][a-zA-Z0-9_]* and not one
/// of the reserved operator letters F, G, X.
inline bool is_valid_atom_name(std::string_view name) {
    if (name.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(name[0]))) return false;
    for (char c : name.substr(1))
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    if (name == "F" || name == "G" || name == "X") return false;
    return true;
}

inline Formula make_atom(const std::string& name) {
    if (!is_valid_atom_name(name))
        throw error("invalid atom name: '" + name + "'");
    return Formula::make(FormulaKind::Atom, name, nullptr, nullptr);
}

inline Formula make_not(const Formula& f) {
    return Formula::make(FormulaKind::Not, {}, &f, nullptr);
}
inline Formula make_and(const Formula& l, const Formula& r) {
    return Formula::make(FormulaKind::And, {}, &l, &r);
}
inline Formula make_or(const Formula& l, const Formula& r) {
    return Formula::make(FormulaKind::Or, {}, &l, &r);
}
inline Formula make_implies(const Formula& l, const Formula& r) {
    return Formula::make(FormulaKind::Implies, {}, &l, &r);
}
inline Formula make_eventually(const Formula& f) {
    return Formula::make(FormulaKind::Eventually, {}, &f, nullptr);
}
inline Formula make_always(const Formula& f) {
    return Formula::make(FormulaKind::Always, {}, &f, nullptr);
}
inline Formula make_next(const Formula& f) {
    return Formula::make(FormulaKind::Next, {}, &f, nullptr);
}

// ── Queries ─────────────────────────────────────────────────────────────────

/// Exact set of atom names occurring in f.
inline void collect_atoms(const Formula& f, std::set<std::string>& out) {
    switch (f.kind()) {
        case FormulaKind::Atom: out.insert(f.atom_name()); return;
        case FormulaKind::And:
        case FormulaKind::Or:
        case FormulaKind::Implies:
            collect_atoms(f.left(), out);
            collect_atoms(f.right(), out);
            return;
        default: collect_atoms(f.child(), out); return;
    }
}

inline std::set<std::string> atoms(const Formula& f) {
    std::set<std::string> out;
    collect_atoms(f, out);
    return out;
}

/// Number of AST nodes.
inline std::size_t node_count(const Formula& f) {
    switch (f.kind()) {
        case FormulaKind::Atom: return 1;
        case FormulaKind::And:
        case FormulaKind::Or:
        case FormulaKind::Implies:
            return 1 + node_count(f.left()) + node_count(f.right());
        default: return 1 + node_count(f.child());
    }
}

inline bool is_literal(const Formula& f) {
    return f.kind() == FormulaKind::Atom ||
           (f.kind() == FormulaKind::Not && f.child().kind() == FormulaKind::Atom);
}

// ── Rendering ───────────────────────────────────────────────────────────────

namespace detail {
inline void render_into(const Formula& f, std::string& out) {
    auto wrap = [&out](const Formula& g) {
        if (g.is_binary()) {
            out.push_back('(');
            render_into(g, out);
            out.push_back(')');
        } else {
            render_into(g, out);
        }
    };
    switch (f.kind()) {
        case FormulaKind::Atom:
            out += f.atom_name();
            return;
        case FormulaKind::Not:
            out.push_back('~');
            wrap(f.child());
            return;
        case FormulaKind::Eventually:
            out += "F ";
            wrap(f.child());
            return;
        case FormulaKind::Always:
            out += "G ";
            wrap(f.child());
            return;
        case FormulaKind::Next:
            out += "X ";
            wrap(f.child());
            return;
        case FormulaKind::And:
        case FormulaKind::Or:
        case FormulaKind::Implies: {
            const char* op = f.kind() == FormulaKind::And   ? " & "
                             : f.kind() == FormulaKind::Or  ? " | "
                                                            : " -> ";
            out.push_back('(');
            render_into(f.left(), out);
            out += op;
            render_into(f.right(), out);
            out.push_back(')');
            return;
        }
    }
}
}  // namespace detail

/// Text form that parse() maps back to a structurally equal formula.
/// Next is printed as `X f` for truth-tree display but is not parseable.
inline std::string render(const Formula& f) {
    std::string out;
    detail::render_into(f, out);
    return out;
}

// ── Parsing ─────────────────────────────────────────────────────────────────

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) { advance(); }

    Formula parse_all() {
        Formula f = parse_implies();
        if (tok_ != Tok::End)
            throw parse_error("unexpected trailing input", tok_pos_);
        return f;
    }

private:
    enum class Tok { End, LParen, RParen, AndOp, OrOp, ImpliesOp, NotOp,
                     EvOp, AlwOp, Ident };

    // -> is right-associative and binds loosest.
    Formula parse_implies() {
        Formula l = parse_or();
        if (tok_ == Tok::ImpliesOp) {
            advance();
            Formula r = parse_implies();
            return make_implies(l, r);
        }
        return l;
    }

    Formula parse_or() {
        Formula l = parse_and();
        while (tok_ == Tok::OrOp) {
            advance();
            l = make_or(l, parse_and());
        }
        return l;
    }

    Formula parse_and() {
        Formula l = parse_unary();
        while (tok_ == Tok::AndOp) {
            advance();
            l = make_and(l, parse_unary());
        }
        return l;
    }

    Formula parse_unary() {
        switch (tok_) {
            case Tok::NotOp: advance(); return make_not(parse_unary());
            case Tok::EvOp: advance(); return make_eventually(parse_unary());
            case Tok::AlwOp: advance(); return make_always(parse_unary());
            case Tok::LParen: {
                advance();
                Formula f = parse_implies();
                if (tok_ != Tok::RParen)
                    throw parse_error("expected ')'", tok_pos_);
                advance();
                return f;
            }
            case Tok::Ident: {
                Formula f = make_atom(ident_);
                advance();
                return f;
            }
            case Tok::End:
                throw parse_error("unexpected end of input", tok_pos_);
            default:
                throw parse_error("unexpected token", tok_pos_);
        }
    }

    void advance() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        tok_pos_ = pos_;
        if (pos_ >= text_.size()) {
            tok_ = Tok::End;
            return;
        }
        char c = text_[pos_];
        switch (c) {
            case '(': tok_ = Tok::LParen; ++pos_; return;
            case ')': tok_ = Tok::RParen; ++pos_; return;
            case '&': tok_ = Tok::AndOp; ++pos_; return;
            case '|': tok_ = Tok::OrOp; ++pos_; return;
            case '~': tok_ = Tok::NotOp; ++pos_; return;
            case '-':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
                    tok_ = Tok::ImpliesOp;
                    pos_ += 2;
                    return;
                }
                throw parse_error("stray '-' (did you mean '->'?)", pos_);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            ++pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '_'))
                ++pos_;
            std::string word(text_.substr(start, pos_ - start));
            if (word == "F") { tok_ = Tok::EvOp; return; }
            if (word == "G") { tok_ = Tok::AlwOp; return; }
            if (word == "X")
                throw parse_error("'X' (next) is reserved and not part of the "
                                  "surface syntax", start);
            tok_ = Tok::Ident;
            ident_ = std::move(word);
            return;
        }
        throw parse_error(std::string("unexpected character '") + c + "'", pos_);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t tok_pos_ = 0;
    Tok tok_ = Tok::End;
    std::string ident_;
};

}  // namespace detail

/// Parse the ASCII surface syntax.  Precedence ~,F,G > & > | > -> with ->
/// right-associative; whitespace insignificant.
inline Formula parse(std::string_view text) {
    if (text.empty()) throw parse_error("empty input", 0);
    return detail::Parser(text).parse_all();
}

// ── Negation normal form ────────────────────────────────────────────────────

/// Push negations onto atoms.  Implication is deliberately kept as a
/// first-class connective (the tableau branches on it directly); only a
/// negated implication is rewritten (~(a -> b) => a & ~b).
inline Formula nnf(const Formula& f);

namespace detail {
inline Formula nnf_negated(const Formula& f) {
    switch (f.kind()) {
        case FormulaKind::Atom: return make_not(f);
        case FormulaKind::Not: return nnf(f.child());
        case FormulaKind::And:
            return make_or(nnf_negated(f.left()), nnf_negated(f.right()));
        case FormulaKind::Or:
            return make_and(nnf_negated(f.left()), nnf_negated(f.right()));
        case FormulaKind::Implies:
            return make_and(nnf(f.left()), nnf_negated(f.right()));
        case FormulaKind::Eventually: return make_always(nnf_negated(f.child()));
        case FormulaKind::Always: return make_eventually(nnf_negated(f.child()));
        case FormulaKind::Next: return make_next(nnf_negated(f.child()));
    }
    throw error("unreachable formula kind");
}
}  // namespace detail

inline Formula nnf(const Formula& f) {
    switch (f.kind()) {
        case FormulaKind::Atom: return f;
        case FormulaKind::Not: return detail::nnf_negated(f.child());
        case FormulaKind::And: return make_and(nnf(f.left()), nnf(f.right()));
        case FormulaKind::Or: return make_or(nnf(f.left()), nnf(f.right()));
        case FormulaKind::Implies:
            return make_implies(nnf(f.left()), nnf(f.right()));
        case FormulaKind::Eventually: return make_eventually(nnf(f.child()));
        case FormulaKind::Always: return make_always(nnf(f.child()));
        case FormulaKind::Next: return make_next(nnf(f.child()));
    }
    throw error("unreachable formula kind");
}

}  // namespace park
