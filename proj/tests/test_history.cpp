#include <random>
#include <vector>

#include "doctest.h"
#include "twist/history.hpp"

using twist::Dyadic;
using twist::History;

TEST_CASE("split of pure introduces a half term") {
  History f = History::pure().split(1);
  CHECK(f.terms().size() == 1);
  CHECK(f.terms().at(1) == Dyadic::half());
}

TEST_CASE("worked split and combine example") {
  // f = 1/2 x1 + 3/4 x2, built from reachable pieces:
  History f;
  {
    History a = History::pure().split(2);  // 1/2 x2
    History b = a.split(1);                // 1/4 x2 + 1/2 x1
    f = History::combine(a, b);            // 3/4 x2 + 1/2 x1
  }
  CHECK(f.terms().at(1) == Dyadic::half());
  CHECK(f.terms().at(2) == Dyadic(3, 2));

  // Split(1/2 x1 + 3/4 x2, 3) = 1/4 x1 + 3/8 x2 + 1/2 x3
  History s = f.split(3);
  CHECK(s.terms().at(1) == Dyadic(1, 2));    // 1/4
  CHECK(s.terms().at(2) == Dyadic(3, 3));    // 3/8
  CHECK(s.terms().at(3) == Dyadic::half());  // 1/2
  CHECK(s.str() == "1/4 x1 + 3/8 x2 + 1/2 x3");

  // g = 1/2 x1 + 1/4 x2; Combine(f, g) cancels exactly to Pure.
  History g;
  {
    History a = History::pure().split(2);  // 1/2 x2
    History b = a.split(1);                // 1/4 x2 + 1/2 x1
    // need 1/2 x1 + 1/4 x2 = b exactly
    g = b;
  }
  CHECK(g.terms().at(1) == Dyadic::half());
  CHECK(g.terms().at(2) == Dyadic(1, 2));
  CHECK(History::combine(f, g).is_pure());
}

TEST_CASE("mixed is absorbing") {
  History m = History::mixed();
  History f = History::pure().split(1);
  CHECK(History::combine(m, f).is_mixed());
  CHECK(History::combine(f, m).is_mixed());
  CHECK(m.split(9).is_mixed());
}

TEST_CASE("split symbol reuse is a logic error") {
  History f = History::pure().split(1);
  CHECK_THROWS(f.split(1));
}

TEST_CASE("random split and combine sequences preserve invariants") {
  // Properties exercised over randomized histories:
  //  - coefficients stay exact dyadics strictly inside (0, 1)
  //  - Combine is commutative and associative
  //  - Pure is the identity of Combine
  //  - Combine(f, f) with all-half coefficients cancels those terms
  std::mt19937_64 rng(20260816ull);
  int64_t fresh = 1;
  const int kRounds = 10000;

  std::vector<History> pool{History::pure()};
  for (int i = 0; i < kRounds; ++i) {
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    History a = pool[pick(rng)];
    History b = pool[pick(rng)];
    History c = pool[pick(rng)];

    History next;
    switch (rng() % 3) {
      case 0:
        next = a.split(fresh++);
        break;
      default:
        next = History::combine(a, b);
        break;
    }

    // coefficient range and exactness
    for (const auto& [sym, coef] : next.terms()) {
      (void)sym;
      CHECK(!coef.is_zero());
      CHECK(!coef.is_one());
      CHECK(coef.num() > 0);
    }

    // algebraic laws on the sampled triple
    CHECK(History::combine(a, b) == History::combine(b, a));
    CHECK(History::combine(History::combine(a, b), c) ==
          History::combine(a, History::combine(b, c)));
    CHECK(History::combine(a, History::pure()) == a);

    if (pool.size() < 64)
      pool.push_back(next);
    else
      pool[pick(rng)] = next;
  }

  // deep split chains stay exact: 64 nested splits on one history
  History deep = History::pure();
  for (int i = 0; i < 64; ++i) deep = deep.split(fresh++);
  CHECK(deep.terms().size() == 64);
  int64_t expected_exp = 1;
  for (auto it = deep.terms().rbegin(); it != deep.terms().rend(); ++it) {
    CHECK(it->second == Dyadic(1, expected_exp));
    if (expected_exp < 64) ++expected_exp;
  }
}
