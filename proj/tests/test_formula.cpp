#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cstab/formula.hpp"
#include "cstab/parse.hpp"

#include "oracle.hpp"

using namespace cstab;

namespace {
const Formula p = Formula::atom("p");
const Formula q = Formula::atom("q");
const Formula r = Formula::atom("r");
}  // namespace

TEST_CASE("parsing the core grammar") {
  CHECK(parse_formula("[p]q") == Formula::nec(p, q));
  CHECK(parse_formula("<p>q -> <q>true") ==
        Formula::impl(Formula::poss(p, q), Formula::poss(q, Formula::top())));
  CHECK(parse_formula("~(p & q)") == !(p && q));
  CHECK(parse_formula("_|_") == Formula::bottom());
  CHECK(parse_formula("false") == Formula::bottom());
  CHECK(parse_formula("p & q & r") == (p && (q && r)));
  CHECK(parse_formula("p -> q -> r") == Formula::impl(p, Formula::impl(q, r)));
  CHECK(parse_formula("p & q | r") == ((p && q) || r));
  CHECK(parse_formula("[p]q & r") == (Formula::nec(p, q) && r));
  CHECK(parse_formula("[p](q & r)") == Formula::nec(p, q && r));
  CHECK(parse_formula("~[p]~q") == !Formula::nec(p, !q));
}

TEST_CASE("defined connectives desugar at parse time") {
  CHECK(parse_formula("p <-> q") == (Formula::impl(p, q) && Formula::impl(q, p)));
  CHECK(parse_formula("box p") == Formula::nec(!p, Formula::bottom()));
  CHECK(parse_formula("dia p") == Formula::poss(p, Formula::top()));
}

TEST_CASE("lewis arrows parse to the same trees") {
  CHECK(parse_formula("p => q") == parse_formula("[p]q"));
  CHECK(parse_formula("p ~> q") == parse_formula("<p>q"));
  CHECK(parse_formula("p & q => r") == parse_formula("[p & q]r"));
}

TEST_CASE("unicode aliases") {
  CHECK(parse_formula("¬p ∧ q") == (!p && q));
  CHECK(parse_formula("p ⊃ q") == Formula::impl(p, q));
  CHECK(parse_formula("p ∨ q") == (p || q));
  CHECK(parse_formula("p ≡ q") == parse_formula("p <-> q"));
  CHECK(parse_formula("□p") == parse_formula("box p"));
  CHECK(parse_formula("◇p") == parse_formula("dia p"));
}

TEST_CASE("syntax errors carry position and expectations") {
  try {
    parse_formula("p & ");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position == 4);
    CHECK(!e.expected.empty());
  }
  try {
    parse_formula("[p q");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position == 3);
    CHECK(e.expected == std::vector<std::string>{"']'"});
  }
  CHECK_THROWS_AS(parse_formula("p -"), ParseError);
  CHECK_THROWS_AS(parse_formula("(p"), ParseError);
  CHECK_THROWS_AS(parse_formula("p q"), ParseError);
  CHECK_THROWS_AS(parse_formula(""), ParseError);
}

TEST_CASE("printing uses minimal parentheses") {
  CHECK(Formula::nec(p, q && r).to_string() == "[p](q & r)");
  CHECK((Formula::nec(p, q) || Formula::nec(p, !q)).to_string() == "[p]q | [p]~q");
  CHECK(Formula::bottom().to_string() == "_|_");
  CHECK((p && (q || r)).to_string() == "p & (q | r)");
  CHECK(((p && q) && r).to_string() == "(p & q) & r");
  CHECK(Formula::impl(Formula::impl(p, q), r).to_string() == "(p -> q) -> r");
  CHECK((!(p && q)).to_string() == "~(p & q)");
  CHECK((!Formula::nec(p, q)).to_string() == "~[p]q");
}

TEST_CASE("print-parse round trip on random formulas") {
  oracle::Rng rng(0xf0051);
  for (int i = 0; i < 500; ++i) {
    const Formula f = oracle::random_modal(rng, 1 + rng.below(6), 3);
    const Formula back = parse_formula(f.to_string());
    CHECK(back == f);
  }
}

TEST_CASE("subformulas") {
  CHECK(subformulas(p) == std::set<Formula>{p});
  CHECK(subformulas(Formula::nec(p, q)) == std::set<Formula>{Formula::nec(p, q), p, q});

  const Formula s2 = parse_formula("<p>q -> <q>true");
  std::set<Formula> expected{s2,
                             Formula::poss(p, q),
                             Formula::poss(q, Formula::top()),
                             p,
                             q,
                             Formula::top()};
  CHECK(subformulas(s2) == expected);
  std::set<Formula> ref;
  oracle::reference_subterms(s2, ref);
  CHECK(subformulas(s2) == ref);
}

TEST_CASE("subformulas with negations adds exactly the negated members") {
  const Formula f = parse_formula("[p]q | r");
  const auto plain = subformulas(f);
  const auto negged = subformulas(f, true);
  for (const auto& g : plain) {
    CHECK(negged.count(g) == 1);
    CHECK(negged.count(!g) == 1);
  }
}

TEST_CASE("subformulas is monotone and bounded by the node count") {
  oracle::Rng rng(0xf0052);
  for (int i = 0; i < 200; ++i) {
    const Formula f = oracle::random_modal(rng, 1 + rng.below(5), 2);
    const auto subs = subformulas(f);
    CHECK(static_cast<int>(subs.size()) <= f.node_count());
    for (const auto& g : subs) {
      const auto inner = subformulas(g);
      for (const auto& h : inner) CHECK(subs.count(h) == 1);
    }
  }
}

TEST_CASE("structural identity distinguishes equivalent antecedents") {
  CHECK(parse_formula("[p & q]r") != parse_formula("[q & p]r"));
  CHECK(parse_formula("[p]r") == parse_formula("[ p ] r"));
  CHECK(antecedents(parse_formula("[p & q]r | <q>s")) ==
        std::set<Formula>{p && q, q});
}
