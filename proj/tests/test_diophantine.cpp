#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ndcorr/diophantine.hpp"

#include <random>
#include <sstream>

using namespace ndcorr;

namespace {

Rat value_of(const LadderEntry& e) {
  Rat r(e.b, e.q);
  r.canonicalize();
  return r;
}

}  // namespace

TEST_CASE("continued fraction convergents of the golden section") {
  std::vector<Int> cf{1, 1, 1, 1, 1};
  auto cv = cf_convergents(cf, 5);
  REQUIRE(cv.size() == 5);
  long expect[5][2] = {{1, 1}, {2, 1}, {3, 2}, {5, 3}, {8, 5}};
  for (int i = 0; i < 5; i++) {
    CHECK(cv[i].p == expect[i][0]);
    CHECK(cv[i].q == expect[i][1]);
  }
}

TEST_CASE("convergents of 1/sqrt(2) reach 408/577") {
  std::vector<Int> cf{0, 1, 2, 2, 2, 2, 2, 2, 2};
  auto cv = cf_convergents(cf, 9);
  CHECK(cv[2].p == 2);
  CHECK(cv[2].q == 3);
  CHECK(cv[8].p == 408);
  CHECK(cv[8].q == 577);
}

TEST_CASE("convergent determinant identity") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; trial++) {
    std::vector<Int> cf;
    cf.push_back(uniform_int(rng, Int(0), Int(9)));
    size_t len = 2 + static_cast<size_t>(uniform_int(rng, Int(0), Int(10)).get_ui());
    for (size_t i = 1; i < len; i++) cf.push_back(uniform_int(rng, Int(1), Int(9)));
    auto cv = cf_convergents(cf, cf.size());
    for (size_t n = 1; n < cv.size(); n++) {
      Int det = cv[n].p * cv[n - 1].q - cv[n - 1].p * cv[n].q;
      CHECK(det == ((n % 2 == 1) ? 1 : -1));
    }
  }
}

TEST_CASE("convergent input validation") {
  CHECK_THROWS_AS(cf_convergents({}, 0), std::invalid_argument);
  CHECK_THROWS_AS(cf_convergents({Int(1), Int(2)}, 3), std::invalid_argument);
  CHECK_THROWS_AS(cf_convergents({Int(1), Int(0)}, 2), std::invalid_argument);
}

TEST_CASE("square part extraction") {
  auto d12 = square_decomposition(Int(12));
  CHECK(d12.u == 3);
  CHECK(d12.v == 2);
  CHECK(d12.exponent_one_part == 3);

  auto big = square_decomposition(Int(112211));
  CHECK(big.u == 11);
  CHECK(big.v == 101);
  CHECK(big.exponent_one_part == 11);

  auto sq = square_decomposition(Int(36));
  CHECK(sq.u == 1);
  CHECK(sq.v == 6);
  CHECK(sq.exponent_one_part == 1);

  auto pr = square_decomposition(Int(97));
  CHECK(pr.u == 97);
  CHECK(pr.v == 1);
  CHECK(pr.exponent_one_part == 97);

  auto one = square_decomposition(Int(1));
  CHECK(one.u == 1);
  CHECK(one.v == 1);

  CHECK_THROWS_AS(square_decomposition(Int(0)), std::invalid_argument);
}

TEST_CASE("square part against a smallest-factor sieve") {
  const int lim = 30000;
  std::vector<int> spf(lim + 1, 0);
  for (int i = 2; i <= lim; i++) {
    if (spf[i]) continue;
    for (int j = i; j <= lim; j += i)
      if (!spf[j]) spf[j] = i;
  }
  for (int n = 1; n <= lim; n += 7) {
    long u = 1, v = 1, hat = 1;
    int rest = n;
    while (rest > 1) {
      int p = spf[rest], e = 0;
      while (rest % p == 0) { rest /= p; e++; }
      if (e % 2) u *= p;
      for (int i = 0; i < e / 2; i++) v *= p;
      if (e == 1) hat *= p;
    }
    auto d = square_decomposition(Int(n));
    CHECK(d.u == u);
    CHECK(d.v == v);
    CHECK(d.exponent_one_part == hat);
    CHECK(d.u * d.v * d.v == n);
  }
}

TEST_CASE("power ladder with fixed denominators") {
  auto lad = ApproximantLadder::build(Int(2), Int(1), {3, 4}, LadderMode::raw);
  REQUIRE(lad.size() == 3);
  CHECK(lad.certified());
  CHECK(lad.mode() == LadderMode::raw);

  long expect[3][3] = {{1, 2, 3}, {5, 8, 4}, {2559, 4096, 5}};
  for (size_t j = 0; j < 3; j++) {
    CHECK(lad.entry(j).b == expect[j][0]);
    CHECK(lad.entry(j).q == expect[j][1]);
    CHECK(lad.entry(j).k == expect[j][2]);
  }

  CHECK(lad.entry(0).tail_bound == Rat(1, 8));
  CHECK(lad.entry(1).tail_bound == Rat(1, 4096));
  CHECK(lad.entry(2).tail_bound == rat_pow_int(Rat(4096), -5));

  // increments alternate: up by 1/8, down by 1/4096
  CHECK(value_of(lad.entry(1)) - value_of(lad.entry(0)) == Rat(1, 8));
  CHECK(value_of(lad.entry(2)) - value_of(lad.entry(1)) == Rat(-1, 4096));

  // denominator 8 = 2^3 has square part 2^2
  REQUIRE(lad.entry(1).square.has_value());
  CHECK(lad.entry(1).square->u == 2);
  CHECK(lad.entry(1).square->v == 2);
  REQUIRE(lad.entry(2).square.has_value());
  CHECK(lad.entry(2).square->u == 1);
  CHECK(lad.entry(2).square->v == 64);
}

TEST_CASE("prime denominator ladder") {
  auto lad = ApproximantLadder::build(Int(2), Int(1), {3, 4}, LadderMode::prime_denominator);
  REQUIRE(lad.size() == 3);
  CHECK(lad.entry(1).b == 6);
  CHECK(lad.entry(1).q == 11);
  CHECK(lad.entry(2).b == 7992);
  CHECK(lad.entry(2).q == 14653);
  CHECK(lad.entry(2).k == 5);
  CHECK(is_probable_prime(lad.entry(2).q));

  CHECK(lad.entry(0).tail_bound == Rat(1, 22));
  CHECK(lad.entry(1).tail_bound == Rat(6, 161183));
  CHECK(Rat(6, 161183) <= rat_pow_int(Rat(11), -4));

  REQUIRE(lad.entry(2).square.has_value());
  CHECK(lad.entry(2).square->u == lad.entry(2).q);
  CHECK(lad.entry(2).square->v == 1);
}

TEST_CASE("square-rich ladder keeps denominators of the form 3 v^2") {
  auto lad = ApproximantLadder::build(Int(7), Int(1), {3, 4}, LadderMode::square_rich);
  REQUIRE(lad.size() == 3);

  // 7^3 = 343 forces v = 11, q = 363
  CHECK(lad.entry(1).q == 363);
  CHECK(lad.entry(1).b == 52);
  REQUIRE(lad.entry(1).square.has_value());
  CHECK(lad.entry(1).square->u == 3);
  CHECK(lad.entry(1).square->v == 11);
  CHECK(lad.entry(1).square->exponent_one_part == 3);

  // 363^4 = 17363069361 forces v = 76077
  CHECK(lad.entry(2).q == Int("17363129787"));
  CHECK(lad.entry(2).b == Int("2487280300"));
  REQUIRE(lad.entry(2).square.has_value());
  CHECK(lad.entry(2).square->u == 3);
  CHECK(lad.entry(2).square->v == 76077);
  CHECK(lad.entry(2).square->exponent_one_part == 1);  // 3 divides 76077
  CHECK(Int(3) * 76077 * 76077 == lad.entry(2).q);

  CHECK(lad.entry(0).tail_bound == Rat(1, 2541));
  CHECK(lad.entry(1).tail_bound == Rat(8, Int("2100938704227")));
  CHECK(lad.entry(1).tail_bound <= rat_pow_int(Rat(363), -4));
}

TEST_CASE("ladder build rejects bad input") {
  CHECK_THROWS_AS(ApproximantLadder::build(Int(1), Int(0), {3}, LadderMode::raw),
                  std::invalid_argument);
  CHECK_THROWS_WITH_AS(ApproximantLadder::build(Int(4), Int(2), {3}, LadderMode::raw),
                       "gcd violation", std::invalid_argument);
  CHECK_THROWS_AS(ApproximantLadder::build(Int(2), Int(1), {}, LadderMode::raw),
                  std::invalid_argument);
  CHECK_THROWS_AS(ApproximantLadder::build(Int(2), Int(1), {2, 3}, LadderMode::raw),
                  std::invalid_argument);
  CHECK_THROWS_WITH_AS(ApproximantLadder::build(Int(2), Int(1), {3, 3}, LadderMode::raw),
                       "type not unbounded", std::domain_error);
  CHECK_THROWS_WITH_AS(ApproximantLadder::build(Int(2), Int(1), {4, 3}, LadderMode::raw),
                       "type not unbounded", std::domain_error);
}

TEST_CASE("handing over entries that break the certificate chain") {
  // both increments positive: second tail cannot be certified
  std::vector<LadderEntry> bad;
  bad.push_back({Int(1), Int(2), 3, Rat(0), std::nullopt});
  bad.push_back({Int(5), Int(8), 4, Rat(0), std::nullopt});
  bad.push_back({Int(2561), Int(4096), 5, Rat(0), std::nullopt});
  CHECK_THROWS_AS(ApproximantLadder::from_entries(LadderMode::raw, bad, true),
                  std::domain_error);
  auto loose = ApproximantLadder::from_entries(LadderMode::raw, bad, false);
  CHECK_FALSE(loose.certified());
}

TEST_CASE("ladder text round trip") {
  auto lad = ApproximantLadder::build(Int(2), Int(1), {3, 4}, LadderMode::prime_denominator);
  std::ostringstream out;
  lad.save(out);
  CHECK(out.str().rfind("ladder v1 mode=prime_denominator\n", 0) == 0);

  std::istringstream in(out.str());
  auto back = ApproximantLadder::load(in);
  CHECK(back.mode() == lad.mode());
  REQUIRE(back.size() == lad.size());
  for (size_t j = 0; j < lad.size(); j++) {
    CHECK(back.entry(j).b == lad.entry(j).b);
    CHECK(back.entry(j).q == lad.entry(j).q);
    CHECK(back.entry(j).k == lad.entry(j).k);
    CHECK(back.entry(j).tail_bound == lad.entry(j).tail_bound);
  }
  CHECK(back.certified());

  std::ostringstream again;
  back.save(again);
  CHECK(again.str() == out.str());
}

TEST_CASE("ladder load rejects malformed text") {
  std::istringstream empty("");
  CHECK_THROWS_AS(ApproximantLadder::load(empty), std::invalid_argument);
  std::istringstream header("ladder v2 mode=raw\n0 1 2 3\n");
  CHECK_THROWS_AS(ApproximantLadder::load(header), std::invalid_argument);
  std::istringstream rows("ladder v1 mode=raw\n1 1 2 3\n");
  CHECK_THROWS_AS(ApproximantLadder::load(rows), std::invalid_argument);
  std::istringstream junk("ladder v1 mode=raw\n0 one 2 3\n");
  CHECK_THROWS_AS(ApproximantLadder::load(junk), std::invalid_argument);
}

TEST_CASE("square-part ratio per rung") {
  auto prime = ApproximantLadder::build(Int(2), Int(1), {3, 4}, LadderMode::prime_denominator);
  CHECK(diophantine_ratio(prime, 0) == 1.0);  // 2 is prime, exact by construction
  CHECK(diophantine_ratio(prime, 1) == 1.0);
  CHECK(diophantine_ratio(prime, 2) == 1.0);

  auto raw = ApproximantLadder::build(Int(2), Int(1), {3, 4}, LadderMode::raw);
  CHECK(diophantine_ratio(raw, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(diophantine_ratio(raw, 2) == 0.0);  // 4096 is a perfect square

  auto rich = ApproximantLadder::build(Int(7), Int(1), {3, 4}, LadderMode::square_rich);
  // log(3)/log(363) and log(3)/log(17363129787), pinned with 60-digit arithmetic
  CHECK(diophantine_ratio(rich, 1) == doctest::Approx(0.18638228834340069).epsilon(1e-9));
  CHECK(diophantine_ratio(rich, 2) == doctest::Approx(0.046595565208179597).epsilon(1e-9));

  // 112211 = 11 * 101^2, log(11)/log(112211) pinned the same way
  std::vector<LadderEntry> one;
  one.push_back({Int(1), Int(112211), 3, Rat(0), std::nullopt});
  auto single = ApproximantLadder::from_entries(LadderMode::raw, one, false);
  CHECK(diophantine_ratio(single, 0) == doctest::Approx(0.20621492641618884).epsilon(1e-9));

  CHECK_THROWS_AS(diophantine_ratio(single, 5), std::out_of_range);
}

TEST_CASE("scaled distance between rotation sources") {
  auto lad = ApproximantLadder::build(Int(2), Int(1), {3, 4}, LadderMode::raw);
  const Int N = 5;

  SeqDescriptor ladder_src{2, std::nullopt, &lad};
  SeqDescriptor mid{2, Convergent{Int(5), Int(8)}, nullptr};
  SeqDescriptor seed{2, Convergent{Int(1), Int(2)}, nullptr};
  SeqDescriptor last{2, Convergent{Int(2559), Int(4096)}, nullptr};
  SeqDescriptor other{2, Convergent{Int(1), Int(3)}, nullptr};

  // a convergent of the ladder itself: N^(d+1) times its stored tail bound
  CHECK(scaled_distance(mid, ladder_src, N) == Rat(125, 4096));
  CHECK(scaled_distance(ladder_src, mid, N) == Rat(125, 4096));
  CHECK(scaled_distance(seed, ladder_src, N) == Rat(125, 8));

  // two explicit rationals: exact enumeration over n <= N
  CHECK(scaled_distance(mid, last, N) == Rat(125, 4096));

  // unrelated rational: enumeration against the deepest rung plus the tail
  Rat enumerated = scaled_distance(other, last, N);
  CHECK(scaled_distance(other, ladder_src, N) ==
        enumerated + Rat(125) * rat_pow_int(Rat(4096), -5));

  CHECK(scaled_distance(ladder_src, ladder_src, N) == 0);
  auto twin = ApproximantLadder::build(Int(2), Int(1), {3, 4}, LadderMode::raw);
  SeqDescriptor twin_src{2, std::nullopt, &twin};
  CHECK(scaled_distance(ladder_src, twin_src, N) == 0);
}

TEST_CASE("scaled distance refuses uncertified ladders") {
  std::vector<LadderEntry> es;
  es.push_back({Int(1), Int(2), 3, Rat(0), std::nullopt});
  es.push_back({Int(5), Int(8), 4, Rat(0), std::nullopt});
  auto loose = ApproximantLadder::from_entries(LadderMode::raw, es, false);
  SeqDescriptor src{2, std::nullopt, &loose};
  SeqDescriptor r{2, Convergent{Int(1), Int(3)}, nullptr};
  CHECK_THROWS_WITH_AS(scaled_distance(src, r, Int(5)), "no tail certificate",
                       std::domain_error);
}

TEST_CASE("scaled distance guards its enumeration size") {
  SeqDescriptor a{2, Convergent{Int(1), Int(3)}, nullptr};
  SeqDescriptor b{2, Convergent{Int(1), Int(5)}, nullptr};
  CHECK_THROWS_AS(scaled_distance(a, b, Int(3000000)), std::domain_error);
  CHECK_THROWS_AS(scaled_distance(a, b, Int(0)), std::invalid_argument);
}
