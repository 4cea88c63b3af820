#include "park/formula.hpp"

#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace park;

namespace {

TEST(Parse, NeverGateConjunction) {
    Formula f = parse("G ~g3 & g3");
    ASSERT_EQ(f.kind(), FormulaKind::And);
    EXPECT_EQ(f.left().kind(), FormulaKind::Always);
    EXPECT_EQ(f.left().child().kind(), FormulaKind::Not);
    EXPECT_EQ(f.left().child().child().atom_name(), "g3");
    EXPECT_EQ(f.right().atom_name(), "g3");
}

TEST(Parse, SingleAtom) {
    Formula f = parse("p");
    ASSERT_EQ(f.kind(), FormulaKind::Atom);
    EXPECT_EQ(f.atom_name(), "p");
}

TEST(Parse, TwoPreferenceDisjunction) {
    Formula f = parse("g1 & ((g1 -> F p018) | (g1 -> F p015))");
    ASSERT_EQ(f.kind(), FormulaKind::And);
    EXPECT_EQ(f.left().atom_name(), "g1");
    Formula disj = f.right();
    ASSERT_EQ(disj.kind(), FormulaKind::Or);
    ASSERT_EQ(disj.left().kind(), FormulaKind::Implies);
    EXPECT_EQ(disj.left().right().kind(), FormulaKind::Eventually);
    EXPECT_EQ(disj.left().right().child().atom_name(), "p018");
    EXPECT_EQ(disj.right().right().child().atom_name(), "p015");
}

TEST(Parse, Precedence) {
    // ~, F, G bind tightest, then &, then |, then ->; -> right-associative.
    EXPECT_EQ(parse("a | b & c"), make_or(parse("a"), parse("b & c")));
    EXPECT_EQ(parse("a -> b -> c"), make_implies(parse("a"), parse("b -> c")));
    EXPECT_EQ(parse("~a & b"), make_and(make_not(parse("a")), parse("b")));
    EXPECT_EQ(parse("F a & b"), make_and(make_eventually(parse("a")), parse("b")));
    EXPECT_EQ(parse("G a | b -> c"),
              make_implies(make_or(make_always(parse("a")), parse("b")),
                           parse("c")));
    EXPECT_EQ(parse("F F a"), make_eventually(make_eventually(parse("a"))));
    // maximal-munch: Fp is an atom, not F applied to p
    EXPECT_EQ(parse("Fp").kind(), FormulaKind::Atom);
}

TEST(Parse, Errors) {
    EXPECT_THROW(parse(""), parse_error);
    EXPECT_THROW(parse("(p"), parse_error);
    EXPECT_THROW(parse("p q"), parse_error);
    EXPECT_THROW(parse("p &"), parse_error);
    EXPECT_THROW(parse("p # q"), parse_error);
    EXPECT_THROW(parse("-"), parse_error);
    try {
        parse("p & X q");
        FAIL() << "X must be rejected";
    } catch (const parse_error& e) {
        EXPECT_EQ(e.position(), 4u);
    }
    try {
        parse("p &&");
        FAIL();
    } catch (const parse_error& e) {
        EXPECT_EQ(e.position(), 3u);
    }
}

TEST(AtomNames, Validation) {
    EXPECT_TRUE(is_valid_atom_name("p"));
    EXPECT_TRUE(is_valid_atom_name("g2"));
    EXPECT_TRUE(is_valid_atom_name("idOla91"));
    EXPECT_TRUE(is_valid_atom_name("p_1"));
    EXPECT_FALSE(is_valid_atom_name(""));
    EXPECT_FALSE(is_valid_atom_name("9x"));
    EXPECT_FALSE(is_valid_atom_name("a-b"));
    EXPECT_FALSE(is_valid_atom_name("F"));
    EXPECT_FALSE(is_valid_atom_name("G"));
    EXPECT_FALSE(is_valid_atom_name("X"));
    EXPECT_THROW(make_atom("X"), error);
}

TEST(Render, Examples) {
    EXPECT_EQ(render(make_atom("p")), "p");
    Formula never_g3 = make_and(make_always(make_not(make_atom("g3"))),
                             make_atom("g3"));
    EXPECT_EQ(parse(render(never_g3)), never_g3);
    Formula impl = make_implies(make_atom("g2"),
                                make_eventually(make_atom("p010")));
    EXPECT_EQ(parse(render(impl)), impl);
    EXPECT_EQ(render(impl), "(g2 -> F p010)");
}

TEST(Render, ParseRoundTripProperty) {
    std::mt19937 rng(2024);
    const std::vector<std::string> pool = {"p", "q", "r", "g1", "p018"};
    for (int i = 0; i < 1000; ++i) {
        Formula f = parktest::gen_formula(rng, 11, pool);
        EXPECT_EQ(parse(render(f)), f) << render(f);
    }
}

TEST(Nnf, Rewrites) {
    EXPECT_EQ(nnf(parse("~G p")), parse("F ~p"));
    EXPECT_EQ(nnf(parse("~F p")), parse("G ~p"));
    EXPECT_EQ(nnf(parse("~(p -> q)")), parse("p & ~q"));
    EXPECT_EQ(nnf(parse("~(p & q)")), parse("~p | ~q"));
    EXPECT_EQ(nnf(parse("~(p | q)")), parse("~p & ~q"));
    EXPECT_EQ(nnf(parse("~~p")), parse("p"));
    // already in normal form: untouched, implication preserved
    EXPECT_EQ(nnf(parse("G ~g3 & g3")), parse("G ~g3 & g3"));
    EXPECT_EQ(nnf(parse("g2 -> F p010")), parse("g2 -> F p010"));
    // negation normal form of Next distributes through
    EXPECT_EQ(nnf(make_not(make_next(make_atom("p")))),
              make_next(make_not(make_atom("p"))));
}

TEST(Nnf, IdempotentProperty) {
    std::mt19937 rng(77);
    const std::vector<std::string> pool = {"p", "q", "r"};
    for (int i = 0; i < 1000; ++i) {
        Formula f = parktest::gen_formula(rng, 10, pool);
        Formula n = nnf(f);
        EXPECT_EQ(nnf(n), n) << render(f);
    }
}

TEST(Nnf, PreservesAtomsProperty) {
    std::mt19937 rng(78);
    const std::vector<std::string> pool = {"p", "q", "r", "s"};
    for (int i = 0; i < 1000; ++i) {
        Formula f = parktest::gen_formula(rng, 10, pool);
        EXPECT_EQ(atoms(nnf(f)), atoms(f)) << render(f);
    }
}

TEST(Atoms, Examples) {
    EXPECT_EQ(atoms(parse("G ~g3 & g3")), std::set<std::string>{"g3"});
    EXPECT_EQ(atoms(parse("g1 & ((g1 -> F p018) | (g1 -> F p015))")),
              (std::set<std::string>{"g1", "p018", "p015"}));
    EXPECT_EQ(atoms(parse("p")), std::set<std::string>{"p"});
}

TEST(Formula, StructuralOrder) {
    Formula a = parse("p & q");
    Formula b = parse("p & q");
    Formula c = parse("p | q");
    EXPECT_EQ(a, b);
    EXPECT_FALSE(a < b);
    EXPECT_FALSE(b < a);
    EXPECT_TRUE(a < c || c < a);
    std::set<Formula> s{a, b, c};
    EXPECT_EQ(s.size(), 2u);
}

}  // namespace
