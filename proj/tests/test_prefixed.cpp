#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cstab/parse.hpp"
#include "cstab/prefixed.hpp"

#include "oracle.hpp"

using namespace cstab;

namespace {
const Formula p = Formula::atom("p");
const Formula q = Formula::atom("q");

Branch branch_of(std::vector<PrefixedFormula> items) {
  return Branch::from_assumptions(items);
}
}  // namespace

TEST_CASE("closure witnesses") {
  SUBCASE("contradictory pair at one index") {
    const auto w = branch_of({at(1, p), at(1, !p)}).closure_witness();
    REQUIRE(w.has_value());
    CHECK(w->kind == ClosureWitness::Kind::Pair);
    CHECK(w->index.value == 1);
    CHECK(w->formula == p);
  }
  SUBCASE("falsum closes alone") {
    const auto w = branch_of({at(1, Formula::bottom())}).closure_witness();
    REQUIRE(w.has_value());
    CHECK(w->kind == ClosureWitness::Kind::Falsum);
  }
  SUBCASE("negated true closes alone") {
    const auto w = branch_of({at(2, !Formula::top())}).closure_witness();
    REQUIRE(w.has_value());
    CHECK(w->kind == ClosureWitness::Kind::NegTop);
    CHECK(w->index.value == 2);
  }
  SUBCASE("prefixes must match") {
    CHECK(!branch_of({at(1, p), at(2, !p)}).closure_witness().has_value());
    CHECK(!branch_of({at(1, p), at(1, !q)}).closure_witness().has_value());
    CHECK(!branch_of({at(1, Formula::top())}).closure_witness().has_value());
  }
}

TEST_CASE("fresh indices") {
  Branch b = branch_of({at(1, p), rel(1, 2, q)});
  CHECK(b.peek_fresh().value == 3);
  CHECK(b.fresh_index().value == 3);
  CHECK(b.fresh_index().value == 4);

  Branch single = branch_of({at(1, p)});
  CHECK(single.fresh_index().value == 2);
  CHECK(single.fresh_index().value == 3);
}

TEST_CASE("add is idempotent and order-preserving") {
  const Branch b = branch_of({at(1, p)});
  const Branch b2 = b.add(at(1, q));
  CHECK(b2.items().size() == 2);
  CHECK(b2.contains(at(1, q)));
  CHECK(!b.contains(at(1, q)));

  const Branch b3 = b2.add(at(1, p));
  CHECK(b3.items().size() == 2);
  CHECK(b3.items() == b2.items());

  const Branch b4 = Branch().add(rel(1, 2, p));
  CHECK(b4.contains(rel(1, 2, p)));
  CHECK(b4.index_occurs(Index{2}));
}

TEST_CASE("fresh indices never collide with branch content") {
  oracle::Rng rng(0xbeef);
  for (int round = 0; round < 50; ++round) {
    Branch b = branch_of({at(1, p)});
    std::set<int> drawn;
    for (int step = 0; step < 30; ++step) {
      if (rng.coin()) {
        const Index i = b.fresh_index();
        CHECK(!b.index_occurs(i));
        CHECK(drawn.insert(i.value).second);
      } else {
        const int i = 1 + rng.below(6);
        const int j = 1 + rng.below(6);
        b = b.add(rel(i, j, oracle::random_modal(rng, 1, 2)));
        for (int d : drawn) CHECK(d < b.peek_fresh().value);
      }
    }
  }
}

TEST_CASE("a closed branch has no finite model") {
  oracle::Rng rng(0xc105ed);
  int checked = 0;
  for (int round = 0; round < 40; ++round) {
    std::vector<PrefixedFormula> items;
    const Formula f = oracle::random_modal(rng, 1, 2);
    const int i = 1 + rng.below(2);
    items.push_back(at(i, f));
    items.push_back(at(i, !f));
    if (rng.coin()) items.push_back(at(1, oracle::random_atom(rng, 2)));
    const Branch b = branch_of(items);
    REQUIRE(b.closure_witness().has_value());
    try {
      CHECK(!oracle::some_model_satisfies(b.items(), 2));
      ++checked;
    } catch (const std::logic_error&) {
      // vocabulary too rich to enumerate; skip this sample
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("textual form") {
  const Branch b = branch_of({at(1, parse_formula("[p]q")), rel(1, 2, p), at(2, q)});
  CHECK(b.to_text() == "1: [p]q\nr(1,2): p\n2: q\n");
  CHECK(at(3, !p).to_string() == "3: ~p");
  CHECK(rel(1, 2, p && q).to_string() == "r(1,2): p & q");
}
