#include <doctest.h>

#include <cmath>
#include <random>

#include "relcheck/scalar.hpp"

using relcheck::Scalar;
using relcheck::parse_scalar;
using relcheck::sqrt_nonneg;

namespace {
Scalar q(long n, long d = 1) { return Scalar::rational(n, d); }
}

TEST_CASE("rational arithmetic and normal form") {
  CHECK(q(2, 4) == q(1, 2));
  CHECK((q(1, 3) + q(1, 6)).str() == "1/2");
  CHECK((q(-3, 4) * q(4, 3)).str() == "-1");
  CHECK_THROWS_AS(q(1) / q(0), relcheck::DivisionByZero);
  CHECK(q(-1, 2) < q(1, 3));
}

TEST_CASE("square roots of rationals") {
  CHECK(sqrt_nonneg(q(9, 4)) == q(3, 2));
  Scalar s2 = sqrt_nonneg(q(2));
  CHECK_FALSE(s2.is_rational());
  CHECK(s2 * s2 == q(2));
  CHECK(s2.str() == "0 + 1*sqrt(2)");
  CHECK(sqrt_nonneg(q(8)) == q(2) * s2);
  CHECK(sqrt_nonneg(q(1, 2)) == s2 / q(2));
  CHECK_THROWS_AS(sqrt_nonneg(q(-1)), relcheck::DomainError);
}

TEST_CASE("mixed towers multiply and cancel") {
  Scalar s2 = sqrt_nonneg(q(2)), s3 = sqrt_nonneg(q(3)), s6 = sqrt_nonneg(q(6));
  CHECK(s2 * s3 == s6);
  CHECK((s2 * s3 - s6).is_zero());
  CHECK(s6 / s2 == s3);
  Scalar x = q(1) + s2 + s3;
  Scalar y = x * x;
  CHECK(sqrt_nonneg(y) == x);
  CHECK(std::abs(y.to_double() - std::pow(1 + std::sqrt(2.0) + std::sqrt(3.0), 2)) < 1e-9);
}

TEST_CASE("denested roots are found inside the tower") {
  Scalar s2 = sqrt_nonneg(q(2));
  // 3 + 2 sqrt2 = (1 + sqrt2)^2
  Scalar r = sqrt_nonneg(q(3) + q(2) * s2);
  CHECK(r == q(1) + s2);
  CHECK(relcheck::nesting_depth(r) == 1);
  // sqrt(2 + sqrt2) is genuinely nested
  Scalar n = sqrt_nonneg(q(2) + s2);
  CHECK(relcheck::nesting_depth(n) == 2);
  CHECK(n * n == q(2) + s2);
  CHECK(std::abs(n.to_double() - std::sqrt(2 + std::sqrt(2.0))) < 1e-12);
}

TEST_CASE("sign of nearly cancelling expressions") {
  Scalar s2 = sqrt_nonneg(q(2)), s3 = sqrt_nonneg(q(3));
  // 99/70 is a convergent of sqrt2; the difference is tiny but positive.
  CHECK((q(99, 70) - s2).sign() > 0);
  CHECK((q(140, 99) - s2).sign() < 0);
  CHECK((s2 + s3 - sqrt_nonneg(q(5) + q(2) * sqrt_nonneg(q(6)))).is_zero());
  CHECK((s3 - s2).sign() > 0);
}

TEST_CASE("render and parse round trip") {
  for (const char* text : {"0", "-7/3", "1/2 + 3/4*sqrt(5)", "0 - 1*sqrt(3)",
                           "(1 + 1*sqrt(2)) + (0 + 1*sqrt(2))*sqrt(3)",
                           "0 + 1*sqrt(2 + 1*sqrt(2))"}) {
    Scalar v = parse_scalar(text);
    CHECK(parse_scalar(v.str()) == v);
    CHECK(parse_scalar(v.str()).str() == v.str());
  }
  CHECK(parse_scalar("1/2 + 3/4*sqrt(5)").str() == "1/2 + 3/4*sqrt(5)");
  CHECK_THROWS_AS(parse_scalar("1 + "), relcheck::ScalarParseError);
  CHECK_THROWS_AS(parse_scalar("abc"), relcheck::ScalarParseError);
}

TEST_CASE("capacity limits are enforced") {
  auto saved = relcheck::tower_limits();
  relcheck::set_tower_limits({2, 3});
  Scalar x = q(2);
  bool threw = false;
  try {
    for (int i = 0; i < 4; ++i) x = sqrt_nonneg(x + q(1));
  } catch (const relcheck::CapacityError&) {
    threw = true;
  }
  CHECK(threw);
  relcheck::set_tower_limits(saved);
}

TEST_CASE("field identities on random tower elements") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> c(-5, 5);
  Scalar g[3] = {sqrt_nonneg(q(2)), sqrt_nonneg(q(3)), sqrt_nonneg(q(2) + sqrt_nonneg(q(2)))};
  auto pick = [&] {
    Scalar v = q(c(rng), 1 + (c(rng) + 5));
    for (auto& gi : g) v += q(c(rng)) * gi;
    return v;
  };
  for (int i = 0; i < 60; ++i) {
    Scalar a = pick(), b = pick(), d = pick();
    CHECK(a * (b + d) == a * b + a * d);
    CHECK((a + b) - b == a);
    if (!b.is_zero()) CHECK((a / b) * b == a);
    CHECK(std::abs((a * b).to_double() - a.to_double() * b.to_double()) < 1e-6);
    CHECK(((a - b).sign() < 0) == (a.to_double() < b.to_double()));
  }
}
