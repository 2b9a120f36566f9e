// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qsc/handelman.hpp"
#include "qsc/polynomial.hpp"

using namespace qsc;

TEST_CASE("rationals reduce and compare exactly") {
  Rat a(1, 2), b(2, 4);
  CHECK(a == b);
  CHECK((a + b) == Rat(1));
  CHECK(Rat(-3, 6).to_string() == "-1/2");
  CHECK(Rat(49, 51).pow(2) == Rat(2401, 2601));
  CHECK(Rat(49, 51).pow(-1) == Rat(51, 49));
  CHECK(*Rat::parse("0.51") == Rat(51, 100));
  CHECK(*Rat::parse("-2.5") == Rat(-5, 2));
  CHECK(*Rat::parse("49/51") == Rat(49, 51));
  CHECK(!Rat::parse("1/0"));
  CHECK(Rat(7, 2).floor() == 3);
  CHECK(Rat(7, 2).ceil() == 4);
  CHECK(Rat(-7, 2).floor() == -4);
}

TEST_CASE("rational arithmetic agrees with integer cross-multiplication") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    long an = static_cast<long>(rng() % 2001) - 1000;
    long ad = static_cast<long>(rng() % 999) + 1;
    long bn = static_cast<long>(rng() % 2001) - 1000;
    long bd = static_cast<long>(rng() % 999) + 1;
    Rat a(an, ad), b(bn, bd);
    Rat s = a + b;
    // a/b + c/d = (ad' + cb') / (bd') against exact integer arithmetic.
    mpz_class lhs = s.num() * (mpz_class(ad) * bd);
    mpz_class rhs = (mpz_class(an) * bd + mpz_class(bn) * ad) * s.den();
    CHECK(lhs == rhs);
    Rat m = a * b;
    CHECK(m.num() * (mpz_class(ad) * bd) == mpz_class(an) * bn * m.den());
  }
}

TEST_CASE("evaluate examples") {
  Polynomial p = var("x") * var("x") + Polynomial(Rat(1));
  CHECK(p.evaluate({{sym("x"), Rat(3)}}) == Rat(10));
  Polynomial q = Polynomial(Rat(101)) - var("x");
  CHECK(q.evaluate({{sym("x"), Rat(100)}}) == Rat(1));
  CHECK(Polynomial().evaluate({{sym("x"), Rat(5)}}) == Rat(0));
  CHECK_THROWS(p.evaluate({}));
}

TEST_CASE("substitute examples") {
  Polynomial x = var("x");
  Polynomial sq = x * x;
  Polynomial shifted = sq.substitute({{sym("x"), x + Polynomial(Rat(1))}});
  CHECK(shifted == x * x + Rat(2) * x + Polynomial(Rat(1)));
  Polynomial v1 = Polynomial(Rat(101)) - x;
  CHECK(v1.substitute({{sym("x"), x - Polynomial(Rat(1))}}) == Polynomial(Rat(102)) - x);
  CHECK(x.substitute({{sym("x"), x}}) == x);
}

TEST_CASE("substitute commutes with evaluation") {
  std::mt19937_64 rng(11);
  auto rand_rat = [&]() { return Rat(static_cast<long>(rng() % 21) - 10, static_cast<long>(rng() % 5) + 1); };
  std::vector<Symbol> vars = {sym("x"), sym("y")};
  auto rand_poly = [&]() {
    Polynomial p;
    for (int t = 0; t < 4; ++t) {
      Monomial m;
      unsigned ex = rng() % 3, ey = rng() % 2;
      if (ex) m.factors.emplace_back(sym("x"), ex);
      if (ey) m.factors.emplace_back(sym("y"), ey);
      p += Polynomial::term(rand_rat(), m);
    }
    return p;
  };
  for (int i = 0; i < 200; ++i) {
    Polynomial p = rand_poly();
    std::map<Symbol, Polynomial> binding{{vars[0], rand_poly()}, {vars[1], rand_poly()}};
    std::map<Symbol, Rat> point{{vars[0], rand_rat()}, {vars[1], rand_rat()}};
    std::map<Symbol, Rat> pushed;
    for (auto& [v, b] : binding) pushed[v] = b.evaluate(point);
    CHECK(p.substitute(binding).evaluate(point) == p.evaluate(pushed));
  }
}

TEST_CASE("handelman basis enumeration") {
  Polynomial f1 = var("x") - Polynomial(Rat(9));
  Polynomial f2 = Polynomial(Rat(100)) - var("x");
  auto b1 = handelman_basis(std::vector<Polynomial>{f1, f2}, 1);
  REQUIRE(b1.size() == 3);
  CHECK(b1[0] == Polynomial(Rat(1)));
  CHECK(b1[1] == f1);
  CHECK(b1[2] == f2);
  auto b2 = handelman_basis(std::vector<Polynomial>{f1, f2}, 2);
  REQUIRE(b2.size() == 6);
  CHECK(b2[3] == f1 * f1);
  CHECK(b2[4] == f1 * f2);
  CHECK(b2[5] == f2 * f2);
  auto b3 = handelman_basis(std::vector<Polynomial>{var("x")}, 3);
  REQUIRE(b3.size() == 4);
  CHECK(b3[3] == var("x") * var("x") * var("x"));
}

TEST_CASE("handelman basis members are nonnegative on the region") {
  Polyhedron region;
  region.add(LinearConstraint(var("x") - Polynomial(Rat(9))));
  region.add(LinearConstraint(Polynomial(Rat(100)) - var("x")));
  auto basis = handelman_basis(region, 3);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    Rat x = Rat(9) + Rat(static_cast<long>(rng() % 9101), 100);  // [9, 100]
    for (auto& b : basis) CHECK(b.evaluate({{sym("x"), x}}).sign() >= 0);
  }
}

TEST_CASE("handelman basis rejects empty regions") {
  Polyhedron region;
  region.add(LinearConstraint(var("x") - Polynomial(Rat(10))));
  region.add(LinearConstraint(Polynomial(Rat(5)) - var("x")));
  CHECK_THROWS(handelman_basis(region, 2));
}

TEST_CASE("polyhedron feasibility and implied bounds") {
  Polyhedron p;
  p.add(LinearConstraint(var("x") - Polynomial(Rat(0))));
  p.add(LinearConstraint(Polynomial(Rat(10)) - var("x")));
  p.add(LinearConstraint(var("y") - var("x")));
  p.add(LinearConstraint(Polynomial(Rat(3)) - var("y")));
  CHECK(feasible(p));
  auto bx = implied_bounds(p, sym("x"));
  REQUIRE(bx.lo);
  REQUIRE(bx.hi);
  CHECK(*bx.lo == Rat(0));
  CHECK(*bx.hi == Rat(3));
  p.add(LinearConstraint(var("y") - Polynomial(Rat(5))));
  CHECK(!feasible(p));
  // Strictness matters.
  Polyhedron q;
  q.add(LinearConstraint(var("x"), true));
  q.add(LinearConstraint(-var("x"), false));
  CHECK(!feasible(q));
}

TEST_CASE("polynomial printing is deterministic and parseable") {
  Polynomial p = Rat(3, 2) * var("x") * var("x") - var("x") + Polynomial(Rat(1, 7));
  CHECK(p.to_string() == "1/7 + 3/2*x^2 - x");
}
