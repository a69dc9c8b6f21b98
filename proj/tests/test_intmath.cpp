#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ndcorr/intmath.hpp"

#include <random>
#include <set>

using namespace ndcorr;

TEST_CASE("powmod agrees with repeated multiplication") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; trial++) {
    Int m = uniform_int(rng, Int(2), Int(5000));
    Int base = uniform_int(rng, Int(0), m - 1);
    Int e = uniform_int(rng, Int(0), Int(40));
    Int slow = 1 % m;
    for (Int i = 0; i < e; i++) slow = slow * base % m;
    CHECK(powmod(base, e, m) == slow);
  }
  CHECK(powmod(Int(0), Int(0), Int(7)) == 1);
}

TEST_CASE("integer roots") {
  CHECK(root_floor(Int(26), 3) == 2);
  CHECK(root_floor(Int(27), 3) == 3);
  CHECK(root_floor(Int(28), 3) == 3);
  CHECK(root_floor(Int(0), 2) == 0);
  CHECK(root_floor(Int("17363069361"), 4) == 363);
  CHECK(is_perfect_square(Int(0)));
  CHECK(is_perfect_square(Int(121)));
  CHECK_FALSE(is_perfect_square(Int(122)));
}

TEST_CASE("primality on known values") {
  CHECK(is_probable_prime(Int(2)));
  CHECK(is_probable_prime(Int(104729)));
  CHECK(is_probable_prime(Int(10007)));
  CHECK_FALSE(is_probable_prime(Int(1)));
  CHECK_FALSE(is_probable_prime(Int(561)));    // Carmichael
  CHECK_FALSE(is_probable_prime(Int(41041)));  // Carmichael
  Int m61 = pow_ui(Int(2), 61) - 1;
  CHECK(is_probable_prime(m61));
  CHECK_FALSE(is_probable_prime(m61 - 2));
  CHECK(next_prime_at_least(Int(4096)) == 4099);
  CHECK(next_prime_at_least(Int(11)) == 11);
  CHECK(next_prime_at_least(Int(14641)) == 14653);
}

TEST_CASE("factorization recombines and flags out-of-reach inputs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 120; trial++) {
    Int n = uniform_int(rng, Int(1), Int(1000000));
    Factorization f = factorize(n);
    Int prod = 1;
    for (const auto& pp : f.factors) {
      CHECK(is_probable_prime(pp.p));
      prod *= pow_ui(pp.p, pp.e);
    }
    CHECK(prod == n);
  }
  Factorization big = factorize(Int("112211"));
  REQUIRE(big.factors.size() == 2);
  CHECK(big.factors[0].p == 11);
  CHECK(big.factors[1].p == 101);
  CHECK(big.factors[1].e == 2);

  // two primes just past the trial-division horizon, no small cofactor to peel
  Int hard = Int("1000000000039") * Int("1000000000061");
  CHECK_THROWS_AS(factorize(hard * Int("1000000000063")), std::domain_error);
}

TEST_CASE("uniform_int is deterministic and in range") {
  std::mt19937_64 a(42), b(42);
  std::set<long> seen;
  for (int i = 0; i < 400; i++) {
    Int x = uniform_int(a, Int(3), Int(17));
    CHECK(x == uniform_int(b, Int(3), Int(17)));
    CHECK(x >= 3);
    CHECK(x <= 17);
    seen.insert(x.get_si());
  }
  CHECK(seen.size() == 15);  // every value of a small span shows up
}

TEST_CASE("rational parsing and printing") {
  CHECK(parse_rational("3/4") == Rat(3, 4));
  CHECK(parse_rational("-3/4") == Rat(-3, 4));
  CHECK(parse_rational("2") == Rat(2));
  CHECK(parse_rational("0.25") == Rat(1, 4));
  CHECK(parse_rational("-1.5") == Rat(-3, 2));
  CHECK(rat_str(Rat(4, 3)) == "4/3");
  CHECK(rat_str(Rat(0)) == "0/1");
  CHECK(rat_str(Rat(-1, 2)) == "-1/2");
  CHECK(parse_rational(rat_str(Rat(22, 7))) == Rat(22, 7));
  CHECK_THROWS_AS(parse_rational("x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
}

TEST_CASE("rational helpers") {
  CHECK(rat_floor(Rat(7, 2)) == 3);
  CHECK(rat_floor(Rat(-7, 2)) == -4);
  CHECK(rat_ceil(Rat(7, 2)) == 4);
  CHECK(rat_ceil(Rat(-7, 2)) == -3);
  CHECK(rat_ceil(Rat(6, 2)) == 3);
  CHECK(rat_abs(Rat(-5, 3)) == Rat(5, 3));
  CHECK(rat_pow_int(Rat(2, 3), 3) == Rat(8, 27));
  CHECK(rat_pow_int(Rat(2, 3), -2) == Rat(9, 4));
  CHECK(rat_pow_int(Rat(5), 0) == Rat(1));
}

TEST_CASE("big_log tracks large arguments") {
  // 64*log(2) = 44.361419555836499803 to twenty digits
  long double got = big_log(pow_ui(Int(2), 64));
  CHECK(std::abs(static_cast<double>(got) - 44.361419555836499803) < 1e-12);
  CHECK(big_log(Int(1)) == doctest::Approx(0.0));
}
