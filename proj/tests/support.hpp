// Shared test helpers: deterministic random generators for formulas and
// stores, plus a naive ultimately-periodic-trace oracle kept deliberately
// independent of the library's satisfiability routines.

#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "park/formula.hpp"
#include "park/knowledge.hpp"
#include "park/tableau.hpp"

namespace parktest {

using park::Formula;
using park::FormulaKind;

// ── Random formulas (surface fragment only: no Next) ────────────────────────

inline Formula gen_formula(std::mt19937& rng, int budget,
                           const std::vector<std::string>& pool) {
    std::uniform_int_distribution<int> kind_dist(0, 6);
    std::uniform_int_distribution<int> atom_dist(0,
                                                 static_cast<int>(pool.size()) - 1);
    if (budget <= 1) return park::make_atom(pool[atom_dist(rng)]);
    switch (kind_dist(rng)) {
        case 0: return park::make_atom(pool[atom_dist(rng)]);
        case 1: return park::make_not(gen_formula(rng, budget - 1, pool));
        case 2: return park::make_eventually(gen_formula(rng, budget - 1, pool));
        case 3: return park::make_always(gen_formula(rng, budget - 1, pool));
        default: {
            int left_max = budget - 2 > 1 ? budget - 2 : 1;
            std::uniform_int_distribution<int> split(1, left_max);
            int ls = split(rng);
            Formula l = gen_formula(rng, ls, pool);
            Formula r = gen_formula(rng, budget - 1 - ls, pool);
            std::uniform_int_distribution<int> op(0, 2);
            switch (op(rng)) {
                case 0: return park::make_and(l, r);
                case 1: return park::make_or(l, r);
                default: return park::make_implies(l, r);
            }
        }
    }
}

/// Every formula of the surface fragment with exactly `size` nodes over the
/// pool, in a deterministic order.
inline void enumerate_formulas(int size, const std::vector<std::string>& pool,
                               std::vector<Formula>& out) {
    if (size <= 0) return;
    if (size == 1) {
        for (const auto& a : pool) out.push_back(park::make_atom(a));
        return;
    }
    std::vector<Formula> sub;
    enumerate_formulas(size - 1, pool, sub);
    for (const Formula& f : sub) {
        out.push_back(park::make_not(f));
        out.push_back(park::make_eventually(f));
        out.push_back(park::make_always(f));
    }
    for (int ls = 1; ls <= size - 2; ++ls) {
        std::vector<Formula> lefts, rights;
        enumerate_formulas(ls, pool, lefts);
        enumerate_formulas(size - 1 - ls, pool, rights);
        for (const Formula& l : lefts)
            for (const Formula& r : rights) {
                out.push_back(park::make_and(l, r));
                out.push_back(park::make_or(l, r));
                out.push_back(park::make_implies(l, r));
            }
    }
}

// ── Naive trace oracle ──────────────────────────────────────────────────────
//
// Enumerates every ultimately periodic trace u·v^w with |u| <= max_prefix,
// 1 <= |v| <= max_period over the alphabet 2^atoms(f), and evaluates f at
// position 0 by direct recursion over the lasso.  Exponential and proud of
// it; only usable at small bounds.

inline bool naive_eval(const Formula& f, const std::vector<unsigned>& w,
                       std::size_t loop_start, std::size_t i,
                       const std::vector<std::string>& atom_pool) {
    std::size_t n = w.size();
    std::size_t wrap_end = i >= loop_start ? i : loop_start;
    switch (f.kind()) {
        case FormulaKind::Atom: {
            std::size_t ai = 0;
            while (atom_pool[ai] != f.atom_name()) ++ai;
            return (w[i] >> ai) & 1u;
        }
        case FormulaKind::Not:
            return !naive_eval(f.child(), w, loop_start, i, atom_pool);
        case FormulaKind::And:
            return naive_eval(f.left(), w, loop_start, i, atom_pool) &&
                   naive_eval(f.right(), w, loop_start, i, atom_pool);
        case FormulaKind::Or:
            return naive_eval(f.left(), w, loop_start, i, atom_pool) ||
                   naive_eval(f.right(), w, loop_start, i, atom_pool);
        case FormulaKind::Implies:
            return !naive_eval(f.left(), w, loop_start, i, atom_pool) ||
                   naive_eval(f.right(), w, loop_start, i, atom_pool);
        case FormulaKind::Next:
            return naive_eval(f.child(), w, loop_start,
                              i + 1 == n ? loop_start : i + 1, atom_pool);
        case FormulaKind::Eventually: {
            for (std::size_t j = i; j < n; ++j)
                if (naive_eval(f.child(), w, loop_start, j, atom_pool))
                    return true;
            for (std::size_t j = loop_start; j < wrap_end; ++j)
                if (naive_eval(f.child(), w, loop_start, j, atom_pool))
                    return true;
            return false;
        }
        case FormulaKind::Always: {
            for (std::size_t j = i; j < n; ++j)
                if (!naive_eval(f.child(), w, loop_start, j, atom_pool))
                    return false;
            for (std::size_t j = loop_start; j < wrap_end; ++j)
                if (!naive_eval(f.child(), w, loop_start, j, atom_pool))
                    return false;
            return true;
        }
    }
    return false;
}

inline park::Verdict naive_decide(const Formula& f, int max_prefix,
                                  int max_period) {
    std::set<std::string> atom_set = park::atoms(f);
    std::vector<std::string> pool(atom_set.begin(), atom_set.end());
    unsigned letters = 1u << pool.size();
    for (int p = 0; p <= max_prefix; ++p)
        for (int q = 1; q <= max_period; ++q) {
            std::vector<unsigned> w(static_cast<std::size_t>(p + q), 0);
            for (;;) {
                if (naive_eval(f, w, static_cast<std::size_t>(p), 0, pool))
                    return park::Verdict::Sat;
                int pos = p + q - 1;
                while (pos >= 0 &&
                       ++w[static_cast<std::size_t>(pos)] == letters) {
                    w[static_cast<std::size_t>(pos)] = 0;
                    --pos;
                }
                if (pos < 0) break;
            }
        }
    return park::Verdict::Unsat;
}

// ── Random stores ───────────────────────────────────────────────────────────

inline park::SpecStore gen_store(std::mt19937& rng, int max_entries) {
    static const std::vector<std::string> users = {"idOla91", "idBob07",
                                                   "idEva3"};
    static const std::vector<std::string> gates = {"g1", "g2", "g3"};
    static const std::vector<std::string> spaces = {"p010", "p015", "p018",
                                                    "p003"};
    park::SpecStore s;
    std::uniform_int_distribution<int> n_dist(0, max_entries);
    std::uniform_int_distribution<int> user_dist(0, 2);
    std::uniform_int_distribution<int> gate_dist(0, 2);
    std::uniform_int_distribution<int> space_dist(0, 3);
    std::uniform_int_distribution<int> shape_dist(0, 3);
    std::uniform_int_distribution<std::int64_t> r_dist(1, 40);
    int n = n_dist(rng);
    for (int i = 0; i < n; ++i) {
        const std::string& user = users[static_cast<std::size_t>(user_dist(rng))];
        const std::string& gate = gates[static_cast<std::size_t>(gate_dist(rng))];
        if (shape_dist(rng) == 0) {
            s.upsert(user, park::make_always(park::make_not(park::make_atom(gate))),
                     r_dist(rng));
        } else {
            const std::string& space =
                spaces[static_cast<std::size_t>(space_dist(rng))];
            s.upsert(user,
                     park::make_implies(park::make_atom(gate),
                                        park::make_eventually(
                                            park::make_atom(space))),
                     r_dist(rng));
        }
    }
    return s;
}

}  // namespace parktest
