#include <gtest/gtest.h>

#include "support.hpp"

using namespace adelikit;

TEST(AbsValue, Examples) {
  EXPECT_EQ(abs_value(Rational(12), Place::prime(2)), Rational(1, 4));
  EXPECT_EQ(abs_value(make_rational(-3, 8), Place::prime(2)), Rational(8));
  EXPECT_EQ(abs_value(make_rational(-3, 8), Place::inf()), Rational(3, 8));
  EXPECT_EQ(abs_value(Rational(0), Place::prime(5)), Rational(0));
}

TEST(AbsValue, BadPlaces) {
  EXPECT_TRUE(bad_places(Rational(1)).empty());
  std::vector<Place> want{Place::prime(2), Place::prime(3)};
  EXPECT_EQ(bad_places(Rational(12)), want);
  EXPECT_EQ(bad_places(make_rational(-3, 8)), want);
  EXPECT_THROW(bad_places(Rational(0)), DomainError);
}

TEST(AbsValue, ProductFormula) {
  testkit::Rng rng(11);
  for (int it = 0; it < 500; ++it) {
    Rational q = make_rational(testkit::uniform(rng, -100000, 100000), testkit::uniform(rng, 1, 100000));
    if (q == 0) continue;
    Rational prod = abs_value(q, Place::inf());
    for (auto& v : bad_places(q)) prod *= abs_value(q, v);
    EXPECT_EQ(prod, 1) << q;
  }
}

TEST(AbsValue, MultiplicativeAndUltrametric) {
  testkit::Rng rng(12);
  auto primes = testkit::small_primes(30);
  for (int it = 0; it < 1000; ++it) {
    Rational a = testkit::small_rational(rng, 600), b = testkit::small_rational(rng, 600);
    Place v = Place::prime(primes[testkit::uniform(rng, 0, static_cast<long>(primes.size()) - 1)]);
    EXPECT_EQ(abs_value(a * b, v), abs_value(a, v) * abs_value(b, v));
    EXPECT_EQ(abs_value(a * b, Place::inf()), abs_value(a, Place::inf()) * abs_value(b, Place::inf()));
    Rational s = abs_value(a + b, v), ma = abs_value(a, v), mb = abs_value(b, v);
    EXPECT_LE(s, std::max(ma, mb));
    if (ma != mb) EXPECT_EQ(s, std::max(ma, mb));
  }
}

TEST(Rationals, ParseAndPrint) {
  EXPECT_EQ(parse_rational("6/4"), Rational(3, 2));
  EXPECT_EQ(to_string(parse_rational("-10/5")), "-2");
  EXPECT_THROW(parse_rational("1/0"), DomainError);
  EXPECT_THROW(parse_rational("x"), DomainError);
}

TEST(Rationals, Factorization) {
  std::vector<Integer> want{2, 3, 7};
  EXPECT_EQ(prime_divisors(Integer(2 * 2 * 3 * 7 * 7)), want);
  // a product of two 7-digit primes goes through the rho path
  Integer p, q, base("1000000");
  mpz_nextprime(p.get_mpz_t(), base.get_mpz_t());
  mpz_nextprime(q.get_mpz_t(), p.get_mpz_t());
  std::vector<Integer> pq{p, q};
  EXPECT_EQ(prime_divisors(p * q), pq);
  EXPECT_EQ(valuation(Integer(48), Integer(2)), 4);
  EXPECT_EQ(valuation(make_rational(9, 16), Integer(2)), -4);
}

TEST(Places, ParseAndOrder) {
  EXPECT_EQ(Place::parse("p:7"), Place::prime(7));
  EXPECT_TRUE(Place::parse("inf").infinite);
  EXPECT_THROW(Place::parse("p:9"), DomainError);
  EXPECT_THROW(Place::parse("seven"), DomainError);
  EXPECT_LT(Place::prime(3), Place::prime(5));
  EXPECT_LT(Place::prime(101), Place::inf());
}

TEST(Places, LogAbsValue) {
  EXPECT_NEAR(log_abs_value(Rational(8), Place::prime(2)), -3 * std::log(2.0), 1e-12);
  EXPECT_NEAR(log_abs_value(make_rational(1, 3), Place::inf()), -std::log(3.0), 1e-12);
  Rational huge(ipow(10, 400));
  EXPECT_NEAR(log_abs(huge), 400 * std::log(10.0), 1e-9);
}
