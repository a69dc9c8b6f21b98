#pragma once

// Shared exact-arithmetic plumbing: big integers, big rationals, primality,
// guarded factorization.  Every number that feeds a verdict stays exact
// (mpz/mpq); doubles appear only in logarithm ratios and Fourier checks.

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ndcorr {

using Int = mpz_class;
using Rat = mpq_class;

Int powmod(const Int& base, const Int& exp, const Int& mod);
Int pow_ui(const Int& base, unsigned long e);
Int root_floor(const Int& x, unsigned long k);  // floor(x^(1/k)), x >= 0
bool is_perfect_square(const Int& x);

// Deterministic Miller-Rabin below 3.317e24 (first 13 prime bases), BPSW-style
// probable-prime beyond that.
bool is_probable_prime(const Int& n);
Int next_prime_at_least(const Int& n);

Int rat_floor(const Rat& r);
Int rat_ceil(const Rat& r);
Rat rat_abs(const Rat& r);
Rat rat_pow_int(const Rat& base, long e);  // base^e, e may be negative

// ln(n) for n > 0, accurate to ~1e-15 relative regardless of size.
long double big_log(const Int& n);

struct PrimePower {
  Int p;
  unsigned e = 0;
};

struct Factorization {
  Int n;
  std::vector<PrimePower> factors;  // ascending primes, exponents >= 1
};

// Trial division by primes up to 10^7, then probable-prime and perfect-power
// recovery on the cofactor.  Throws std::domain_error("factorization guard
// exceeded") when the cofactor resists; the library targets constructed
// moduli whose factorizations are known or small.
Factorization factorize(const Int& n);

// Uniform draw in [lo, hi] from a seeded engine; deterministic across
// platforms (mt19937_64 output sequence is pinned by the standard).
Int uniform_int(std::mt19937_64& rng, const Int& lo, const Int& hi);

// Accepts "p/q", "p", "-p", and decimal forms like "0.85" (exact base-10).
Rat parse_rational(const std::string& s);
// Canonical "num/den" with den >= 1, e.g. "4/3", "0/1", "-1/25".
std::string rat_str(const Rat& r);

}  // namespace ndcorr
