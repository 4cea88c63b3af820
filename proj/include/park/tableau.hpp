// ============================================================================
// park/tableau.hpp — semantic-tableaux decision procedure for PLTL
// ============================================================================
//
// decide() expands nnf(f) at state 0 with the usual rules:
//
//   alpha:  a & b   =>  a, b                 G f  =>  f, X G f
//   beta:   a | b   =>  branch a | b         a -> b  =>  branch ~a | b
//           F f     =>  branch f | X F f     (f registered as a pending
//                                             eventuality while postponed)
//
// When a state's non-X formulas are exhausted, one X is stripped from every
// remaining formula and the state index advances.  A branch closes on a
// literal contradiction within one state, or when the set of formulas
// carried into a new state repeats an earlier state's set while some
// eventuality registered at or before that earlier state is still
// unfulfilled.  It is open when nothing is carried at all, or when the
// carried set repeats and every pending eventuality was fulfilled inside
// the repeating segment (the segment then loops forever as a model); a
// repeat with no pending eventualities is the degenerate case of that.
//
// Exploration order is fixed: earliest unexpanded entry, alpha before beta,
// left child first.  One refinement keeps the trees in their familiar
// compact shape: when the fulfil-now child of an eventuality split yields
// an open branch, the postponement child is skipped — it could only add
// more open branches to an already satisfiable node.
//
// oracle_decide() is the independent route: it decides whether any
// ultimately periodic trace u·v^w within the given bounds satisfies f,
// evaluating trace semantics directly (no tableau machinery involved).
//
// ============================================================================

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "park/formula.hpp"

namespace park {

// ── Errors ──────────────────────────────────────────────────────────────────

/// A branch reached the depth bound without closing or looping.  With the
/// default bound this signals a bug, not an expected outcome.
class depth_exceeded : public error {
public:
    explicit depth_exceeded(int bound)
        : error("tableau depth bound of " + std::to_string(bound) +
                " states exceeded"),
          bound_(bound) {}

    int bound() const noexcept { return bound_; }

private:
    int bound_;
};

// ── Result types ────────────────────────────────────────────────────────────

enum class Verdict { Sat, Unsat };

/// A formula together with the temporal state index it is asserted at.
struct PrefixedFormula {
    int state;
    Formula formula;
};

enum class BranchStatus { Unexpanded, Open, Closed };

/// One root-to-leaf path of the truth tree.
struct Branch {
    std::vector<PrefixedFormula> entries;
    /// (registration state, body) of eventualities still awaiting fulfilment.
    std::set<std::pair<int, Formula>> pending_eventualities;
    BranchStatus status = BranchStatus::Unexpanded;
    /// state index -> literals asserted there, as (atom, positive).
    std::map<int, std::set<std::pair<std::string, bool>>> state_labels;
    /// Atoms a whose surrounding eventuality F a was fulfilled on this branch.
    std::set<std::string> fulfilled;
    /// Index of this branch's terminal node in TruthTree::nodes.
    std::size_t leaf = 0;
};

struct TreeNode {
    PrefixedFormula entry;
    std::string rule;  // root | and | alw | or | imp | som | step
    std::vector<std::size_t> children;
    std::optional<BranchStatus> terminal;  // set on leaves only
};

struct TruthTree {
    Formula root;
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::vector<Branch> branches;
};

struct TableauResult {
    Verdict verdict;
    TruthTree tree;
    std::vector<Branch> open_branches;
};

// ── Depth bound ─────────────────────────────────────────────────────────────

namespace detail {
inline void collect_closure(const Formula& f, std::set<Formula>& out) {
    if (!out.insert(f).second) return;
    switch (f.kind()) {
        case FormulaKind::Atom: return;
        case FormulaKind::And:
        case FormulaKind::Or:
        case FormulaKind::Implies:
            collect_closure(f.left(), out);
            collect_closure(f.right(), out);
            return;
        case FormulaKind::Eventually:
        case FormulaKind::Always:
            out.insert(make_next(f));
            collect_closure(f.child(), out);
            return;
        default: collect_closure(f.child(), out); return;
    }
}
}  // namespace detail

/// 2·|closure(nnf(f))| + 2: always enough for the loop check to fire first.
inline int default_depth_bound(const Formula& f) {
    std::set<Formula> closure;
    detail::collect_closure(nnf(f), closure);
    return static_cast<int>(2 * closure.size() + 2);
}

// ── Engine ──────────────────────────────────────────────────────────────────

namespace detail {

class TableauEngine {
public:
    TableauEngine(const Formula& root, int depth_bound)
        : depth_bound_(depth_bound), tree_{root, {}, {}} {
        Formula start = nnf(root);
        tree_.nodes.push_back(
            TreeNode{PrefixedFormula{0, start}, "root", {}, std::nullopt});

        Cursor c{start};
        c.record.entries.push_back(PrefixedFormula{0, start});
        c.carried_history.push_back({start});
        note_literal(c, start);
        explore(std::move(c));
    }

    TableauResult take_result() {
        TableauResult r{Verdict::Unsat, std::move(tree_), {}};
        for (const Branch& b : r.tree.branches)
            if (b.status == BranchStatus::Open) r.open_branches.push_back(b);
        r.verdict = r.open_branches.empty() ? Verdict::Unsat : Verdict::Sat;
        return r;
    }

private:
    struct Cursor {
        explicit Cursor(const Formula& start)
            : agenda{{start, false}}, present{start} {}

        int state = 0;
        std::vector<std::pair<Formula, bool>> agenda;  // (formula, expanded)
        std::set<Formula> present;                     // this state's formulas
        std::map<std::string, std::pair<bool, bool>> literals;  // pos/neg seen
        bool contradiction = false;
        std::map<Formula, int> pending;  // eventuality body -> reg. state
        std::vector<std::set<Formula>> carried_history;  // per state index
        Branch record;
        std::size_t leaf = 0;
    };

    // Adds `f` to the cursor's current state (chained under the leaf).
    // Duplicate formulas at the same state are not re-added.
    void add_entry(Cursor& c, const Formula& f, const char* rule) {
        if (!c.present.insert(f).second) return;
        c.agenda.emplace_back(f, false);
        std::size_t idx = tree_.nodes.size();
        tree_.nodes.push_back(
            TreeNode{PrefixedFormula{c.state, f}, rule, {}, std::nullopt});
        tree_.nodes[c.leaf].children.push_back(idx);
        c.leaf = idx;
        c.record.entries.push_back(PrefixedFormula{c.state, f});
        note_literal(c, f);
    }

    void note_literal(Cursor& c, const Formula& f) {
        if (!is_literal(f)) return;
        bool positive = f.kind() == FormulaKind::Atom;
        const std::string& name =
            positive ? f.atom_name() : f.child().atom_name();
        c.record.state_labels[c.state].insert({name, positive});
        auto& seen = c.literals[name];
        (positive ? seen.first : seen.second) = true;
        if (seen.first && seen.second) c.contradiction = true;
    }

    void finish(Cursor&& c, BranchStatus status) {
        c.record.status = status;
        for (const auto& [body, reg] : c.pending)
            c.record.pending_eventualities.insert({reg, body});
        c.record.leaf = c.leaf;
        tree_.nodes[c.leaf].terminal = status;
        tree_.branches.push_back(std::move(c.record));
    }

    // Explores the branch to all its terminals.  Returns the number of open
    // branches produced in this subtree.
    std::size_t explore(Cursor&& c) {
        for (;;) {
            if (c.contradiction) {
                finish(std::move(c), BranchStatus::Closed);
                return 0;
            }

            // alpha before beta, earliest entry first
            int alpha = -1, beta = -1;
            for (int i = 0; i < static_cast<int>(c.agenda.size()); ++i) {
                if (c.agenda[i].second) continue;
                switch (c.agenda[i].first.kind()) {
                    case FormulaKind::And:
                    case FormulaKind::Always:
                        if (alpha < 0) alpha = i;
                        break;
                    case FormulaKind::Or:
                    case FormulaKind::Implies:
                    case FormulaKind::Eventually:
                        if (beta < 0) beta = i;
                        break;
                    default: break;  // literals and X-formulas
                }
                if (alpha >= 0) break;
            }

            if (alpha >= 0) {
                c.agenda[alpha].second = true;
                Formula f = c.agenda[alpha].first;
                if (f.kind() == FormulaKind::And) {
                    add_entry(c, f.left(), "and");
                    add_entry(c, f.right(), "and");
                } else {  // Always
                    add_entry(c, f.child(), "alw");
                    add_entry(c, make_next(f), "alw");
                }
                continue;
            }

            if (beta >= 0) {
                c.agenda[beta].second = true;
                Formula f = c.agenda[beta].first;
                return split(std::move(c), f);
            }

            // State exhausted: strip one X from everything that remains.
            std::set<Formula> carried;
            for (const auto& [g, expanded] : c.agenda)
                if (g.kind() == FormulaKind::Next) carried.insert(g.child());

            if (carried.empty()) {
                finish(std::move(c), BranchStatus::Open);
                return 1;
            }

            for (int prior = 0;
                 prior < static_cast<int>(c.carried_history.size()); ++prior) {
                if (c.carried_history[prior] != carried) continue;
                // An eventuality registered at or before the matching state
                // was never fulfilled across the whole repeating segment
                // (fulfilment always resets the registration to a younger
                // state), so the branch is a dead deferral loop.  Otherwise
                // every pending eventuality was fulfilled inside the segment
                // and repeating it forever yields a model.
                bool stale = std::any_of(
                    c.pending.begin(), c.pending.end(),
                    [prior](const auto& p) { return p.second <= prior; });
                advance_state(c, carried);
                BranchStatus status =
                    stale ? BranchStatus::Closed : BranchStatus::Open;
                std::size_t open = status == BranchStatus::Open ? 1 : 0;
                finish(std::move(c), status);
                return open;
            }

            if (c.state + 1 >= depth_bound_) throw depth_exceeded(depth_bound_);
            advance_state(c, carried);
        }
    }

    void advance_state(Cursor& c, const std::set<Formula>& carried) {
        ++c.state;
        c.carried_history.push_back(carried);
        c.agenda.clear();
        c.present.clear();
        c.literals.clear();
        for (const Formula& g : carried) add_entry(c, g, "step");
    }

    std::size_t split(Cursor&& c, const Formula& f) {
        const std::size_t parent_leaf = c.leaf;

        if (f.kind() == FormulaKind::Eventually) {
            Formula body = f.child();
            Cursor now = c;
            now.leaf = parent_leaf;
            add_entry(now, body, "som");
            now.pending.erase(body);
            if (body.kind() == FormulaKind::Atom)
                now.record.fulfilled.insert(body.atom_name());
            std::size_t open = explore(std::move(now));
            if (open > 0) return open;  // postponement adds nothing new

            Cursor later = std::move(c);
            later.leaf = parent_leaf;
            add_entry(later, make_next(f), "som");
            later.pending.emplace(body, later.state);  // keep earliest reg.
            return explore(std::move(later));
        }

        Formula first = f.kind() == FormulaKind::Or ? f.left()
                                                    : nnf(make_not(f.left()));
        Formula second = f.right();
        const char* rule = f.kind() == FormulaKind::Or ? "or" : "imp";

        Cursor left = c;
        left.leaf = parent_leaf;
        add_entry(left, first, rule);
        std::size_t open = explore(std::move(left));

        Cursor right = std::move(c);
        right.leaf = parent_leaf;
        add_entry(right, second, rule);
        return open + explore(std::move(right));
    }

    int depth_bound_;
    TruthTree tree_{Formula::make(FormulaKind::Atom, "true_", nullptr, nullptr),
                    {}, {}};
};

}  // namespace detail

/// Decide satisfiability of f, exploring at most depth_bound temporal states
/// per branch.  Throws depth_exceeded when a branch hits the bound.
inline TableauResult decide(const Formula& f, int depth_bound) {
    if (depth_bound < 1) throw error("depth bound must be >= 1");
    detail::TableauEngine engine(f, depth_bound);
    return engine.take_result();
}

inline TableauResult decide(const Formula& f) {
    return decide(f, default_depth_bound(f));
}

/// f is valid iff the tableau for ~f closes.
inline bool is_valid(const Formula& f, int depth_bound) {
    return decide(make_not(f), depth_bound).verdict == Verdict::Unsat;
}

inline bool is_valid(const Formula& f) {
    return is_valid(f, default_depth_bound(make_not(f)));
}

// ── Truth-tree rendering ────────────────────────────────────────────────────

namespace detail {
inline void render_tree_node(const TruthTree& t, std::size_t idx, int indent,
                             std::string& out) {
    const TreeNode* n = &t.nodes[idx];
    for (;;) {
        out.append(static_cast<std::size_t>(indent) * 2, ' ');
        out += "s" + std::to_string(n->entry.state) + ": " +
               render(n->entry.formula) + "\n";
        if (n->terminal) {
            out.append(static_cast<std::size_t>(indent) * 2, ' ');
            out += *n->terminal == BranchStatus::Closed ? "x\n" : "o\n";
            return;
        }
        if (n->children.size() == 1) {  // same branch: keep the indent
            n = &t.nodes[n->children.front()];
            continue;
        }
        for (std::size_t child : n->children)
            render_tree_node(t, child, indent + 1, out);
        return;
    }
}
}  // namespace detail

/// Indented text rendering; closed leaves are marked `x`, open leaves `o`,
/// entries shown as `s<state>: <formula>`.
inline std::string render_tree(const TruthTree& t) {
    std::string out;
    detail::render_tree_node(t, 0, 0, out);
    return out;
}

// ── Bounded-trace oracle ────────────────────────────────────────────────────
//
// Decides whether some ultimately periodic trace u·v^w with |u| <= max_prefix
// and 1 <= |v| <= max_period satisfies f, under standard PLTL semantics.
// Implementation: for every loop assignment the truth vector of all
// subformulas at the loop entry is computed from the loop structure (F/G are
// uniform across a loop, X wraps around); prefixes are then folded backward
// over the achievable-vector sets, which is exactly evaluating every prefix
// assignment without materializing each one.

namespace detail {

struct OracleTable {
    std::vector<Formula> subs;           // children-first
    std::map<Formula, unsigned> index;
    std::vector<std::string> atom_names;
    std::map<std::string, unsigned> atom_index;

    explicit OracleTable(const Formula& f) {
        build(f);
        for (const Formula& g : subs)
            if (g.kind() == FormulaKind::Atom &&
                atom_index.emplace(g.atom_name(), atom_names.size()).second)
                atom_names.push_back(g.atom_name());
    }

    unsigned build(const Formula& f) {
        if (auto it = index.find(f); it != index.end()) return it->second;
        switch (f.kind()) {
            case FormulaKind::Atom: break;
            case FormulaKind::And:
            case FormulaKind::Or:
            case FormulaKind::Implies:
                build(f.left());
                build(f.right());
                break;
            default: build(f.child()); break;
        }
        unsigned id = static_cast<unsigned>(subs.size());
        index.emplace(f, id);
        subs.push_back(f);
        return id;
    }

    unsigned id(const Formula& f) const { return index.at(f); }
};

// Truth vector at position i from the letter at i and the vector at i+1.
inline std::uint64_t oracle_step(const OracleTable& t, unsigned letter,
                                 std::uint64_t next) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < t.subs.size(); ++i) {
        const Formula& f = t.subs[i];
        bool bit = false;
        switch (f.kind()) {
            case FormulaKind::Atom:
                bit = (letter >> t.atom_index.at(f.atom_name())) & 1u;
                break;
            case FormulaKind::Not:
                bit = !((v >> t.id(f.child())) & 1u);
                break;
            case FormulaKind::And:
                bit = ((v >> t.id(f.left())) & 1u) && ((v >> t.id(f.right())) & 1u);
                break;
            case FormulaKind::Or:
                bit = ((v >> t.id(f.left())) & 1u) || ((v >> t.id(f.right())) & 1u);
                break;
            case FormulaKind::Implies:
                bit = !((v >> t.id(f.left())) & 1u) || ((v >> t.id(f.right())) & 1u);
                break;
            case FormulaKind::Next:
                bit = (next >> t.id(f.child())) & 1u;
                break;
            case FormulaKind::Eventually:
                bit = ((v >> t.id(f.child())) & 1u) || ((next >> i) & 1u);
                break;
            case FormulaKind::Always:
                bit = ((v >> t.id(f.child())) & 1u) && ((next >> i) & 1u);
                break;
        }
        if (bit) v |= std::uint64_t{1} << i;
    }
    return v;
}

// Truth vector at the loop entry of the cycle (letters[0..q-1])^w.
inline std::uint64_t oracle_loop_entry(const OracleTable& t,
                                       const std::vector<unsigned>& letters) {
    const std::size_t q = letters.size();
    // bits[i][j] = truth of subformula i at loop position j
    std::vector<std::vector<bool>> bits(t.subs.size(),
                                        std::vector<bool>(q, false));
    for (unsigned i = 0; i < t.subs.size(); ++i) {
        const Formula& f = t.subs[i];
        for (std::size_t j = 0; j < q; ++j) {
            switch (f.kind()) {
                case FormulaKind::Atom:
                    bits[i][j] =
                        (letters[j] >> t.atom_index.at(f.atom_name())) & 1u;
                    break;
                case FormulaKind::Not: bits[i][j] = !bits[t.id(f.child())][j]; break;
                case FormulaKind::And:
                    bits[i][j] = bits[t.id(f.left())][j] && bits[t.id(f.right())][j];
                    break;
                case FormulaKind::Or:
                    bits[i][j] = bits[t.id(f.left())][j] || bits[t.id(f.right())][j];
                    break;
                case FormulaKind::Implies:
                    bits[i][j] = !bits[t.id(f.left())][j] || bits[t.id(f.right())][j];
                    break;
                case FormulaKind::Next:
                    bits[i][j] = bits[t.id(f.child())][(j + 1) % q];
                    break;
                case FormulaKind::Eventually: {
                    // every loop position is visited infinitely often
                    const auto& cb = bits[t.id(f.child())];
                    bool any = std::find(cb.begin(), cb.end(), true) != cb.end();
                    bits[i][j] = any;
                    break;
                }
                case FormulaKind::Always: {
                    const auto& cb = bits[t.id(f.child())];
                    bool all = std::find(cb.begin(), cb.end(), false) == cb.end();
                    bits[i][j] = all;
                    break;
                }
            }
        }
    }
    std::uint64_t v = 0;
    for (unsigned i = 0; i < t.subs.size(); ++i)
        if (bits[i][0]) v |= std::uint64_t{1} << i;
    return v;
}

}  // namespace detail

inline Verdict oracle_decide(const Formula& f, int max_prefix, int max_period) {
    if (max_prefix < 0 || max_period < 1)
        throw error("oracle bounds must satisfy max_prefix >= 0, max_period >= 1");
    detail::OracleTable table(f);
    if (table.atom_names.size() > 4)
        throw error("oracle_decide supports at most 4 distinct atoms, got " +
                    std::to_string(table.atom_names.size()));
    if (table.subs.size() > 63) throw error("formula too large for the oracle");

    const unsigned letter_count = 1u << table.atom_names.size();
    const std::uint64_t goal = std::uint64_t{1} << table.id(f);

    // Distinct loop-entry vectors over all loop assignments.
    std::set<std::uint64_t> entries;
    for (int q = 1; q <= max_period; ++q) {
        std::vector<unsigned> letters(static_cast<std::size_t>(q), 0);
        for (;;) {
            std::uint64_t v = detail::oracle_loop_entry(table, letters);
            if (v & goal) return Verdict::Sat;  // empty prefix suffices
            entries.insert(v);
            // odometer over letter assignments
            int pos = q - 1;
            while (pos >= 0 && ++letters[static_cast<std::size_t>(pos)] ==
                                   letter_count) {
                letters[static_cast<std::size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
    }

    // Fold prefixes backward: the set of truth vectors achievable at
    // position 0 over all prefix assignments of each length.
    std::set<std::uint64_t> frontier = entries;
    std::set<std::uint64_t> seen = entries;
    for (int p = 1; p <= max_prefix && !frontier.empty(); ++p) {
        std::set<std::uint64_t> next;
        for (std::uint64_t v : frontier) {
            for (unsigned letter = 0; letter < letter_count; ++letter) {
                std::uint64_t w = detail::oracle_step(table, letter, v);
                if (w & goal) return Verdict::Sat;
                if (seen.insert(w).second) next.insert(w);
            }
        }
        frontier = std::move(next);
    }
    return Verdict::Unsat;
}

}  // namespace park
