#include "doctest.h"
#include "trilog/truth.hpp"

using namespace trilog;

namespace {
constexpr Tv T = Tv::True;
constexpr Tv F = Tv::False;
constexpr Tv W = Tv::Wrong;
}  // namespace

TEST_CASE("conjunction table") {
  CHECK(tv_and(T, T) == T);
  CHECK(tv_and(T, F) == F);
  CHECK(tv_and(T, W) == W);
  CHECK(tv_and(F, T) == F);
  CHECK(tv_and(F, F) == F);
  CHECK(tv_and(F, W) == W);
  CHECK(tv_and(W, T) == W);
  CHECK(tv_and(W, F) == W);
  CHECK(tv_and(W, W) == W);
}

TEST_CASE("disjunction table") {
  CHECK(tv_or(T, T) == T);
  CHECK(tv_or(T, F) == T);
  CHECK(tv_or(T, W) == W);
  CHECK(tv_or(F, T) == T);
  CHECK(tv_or(F, F) == F);
  CHECK(tv_or(F, W) == W);
  CHECK(tv_or(W, T) == W);
  CHECK(tv_or(W, F) == W);
  CHECK(tv_or(W, W) == W);
}

TEST_CASE("negation") {
  CHECK(tv_not(T) == F);
  CHECK(tv_not(F) == T);
  CHECK(tv_not(W) == W);
}

TEST_CASE("implication is derived from negation and disjunction") {
  for (Tv a : kAllTv)
    for (Tv b : kAllTv) CHECK(tv_implies(a, b) == tv_or(tv_not(a), b));
  // not(false) or wrong = true or wrong = wrong
  CHECK(tv_implies(F, W) == W);
  CHECK(tv_implies(W, T) == W);
  CHECK(tv_implies(T, F) == F);
}

TEST_CASE("wrong absorbs every connective") {
  for (Tv a : kAllTv) {
    CHECK(tv_and(a, W) == W);
    CHECK(tv_and(W, a) == W);
    CHECK(tv_or(a, W) == W);
    CHECK(tv_or(W, a) == W);
  }
}

TEST_CASE("restriction to true/false is classical") {
  auto to_bool = [](Tv v) { return v == Tv::True; };
  for (Tv a : {T, F}) {
    CHECK(to_bool(tv_not(a)) == !to_bool(a));
    for (Tv b : {T, F}) {
      CHECK(to_bool(tv_and(a, b)) == (to_bool(a) && to_bool(b)));
      CHECK(to_bool(tv_or(a, b)) == (to_bool(a) || to_bool(b)));
    }
  }
}

TEST_CASE("conjunction and disjunction are commutative, associative, idempotent") {
  for (Tv a : kAllTv) {
    CHECK(tv_and(a, a) == a);
    CHECK(tv_or(a, a) == a);
    for (Tv b : kAllTv) {
      CHECK(tv_and(a, b) == tv_and(b, a));
      CHECK(tv_or(a, b) == tv_or(b, a));
      for (Tv c : kAllTv) {
        CHECK(tv_and(tv_and(a, b), c) == tv_and(a, tv_and(b, c)));
        CHECK(tv_or(tv_or(a, b), c) == tv_or(a, tv_or(b, c)));
      }
    }
  }
}
