#include "ndcorr/intmath.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace ndcorr {

Int powmod(const Int& base, const Int& exp, const Int& mod) {
  Int r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return r;
}

Int pow_ui(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

Int root_floor(const Int& x, unsigned long k) {
  if (x < 0) throw std::invalid_argument("root_floor: negative radicand");
  Int r;
  mpz_root(r.get_mpz_t(), x.get_mpz_t(), k);
  return r;
}

bool is_perfect_square(const Int& x) {
  return x >= 0 && mpz_perfect_square_p(x.get_mpz_t()) != 0;
}

namespace {

bool miller_rabin_witness(const Int& n, const Int& a, const Int& d, unsigned long s) {
  Int x = powmod(a, d, n);
  if (x == 1 || x == n - 1) return false;
  for (unsigned long i = 1; i < s; i++) {
    x = (x * x) % n;
    if (x == n - 1) return false;
  }
  return true;  // a witnesses compositeness
}

}  // namespace

bool is_probable_prime(const Int& n) {
  if (n < 2) return false;
  static const unsigned long small_primes[] = {2,  3,  5,  7,  11, 13, 17,
                                               19, 23, 29, 31, 37, 41};
  for (unsigned long p : small_primes) {
    if (n == p) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
  }
  Int d = n - 1;
  unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
  // The first 13 prime bases decide primality for every n < 3.317e24
  // (Sorenson-Webster bound); that covers all moduli this library certifies.
  static const Int det_bound("3317044064679887385961981");
  if (n < det_bound) {
    for (unsigned long a : small_primes) {
      if (miller_rabin_witness(n, Int(a), d, s)) return false;
    }
    return true;
  }
  return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

Int next_prime_at_least(const Int& n) {
  Int c = n < 2 ? Int(2) : n;
  if (c > 2 && mpz_even_p(c.get_mpz_t())) c += 1;
  while (!is_probable_prime(c)) c += 2;
  return c;
}

Int rat_floor(const Rat& r) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

Int rat_ceil(const Rat& r) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

Rat rat_pow_int(const Rat& base, long e) {
  if (e == 0) return Rat(1);
  unsigned long mag = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  Int num = pow_ui(Int(base.get_num()), mag);
  Int den = pow_ui(Int(base.get_den()), mag);
  if (e < 0) std::swap(num, den);
  if (den == 0) throw std::domain_error("rat_pow_int: zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

long double big_log(const Int& n) {
  if (n <= 0) throw std::invalid_argument("big_log: nonpositive argument");
  long exp2 = 0;
  double mant = mpz_get_d_2exp(&exp2, n.get_mpz_t());  // n = mant * 2^exp2, mant in [0.5, 1)
  return std::log(static_cast<long double>(mant)) +
         static_cast<long double>(exp2) * 0.6931471805599453094172321215L;
}

namespace {

// Primes below 10^7 via a lazily built odd sieve, shared by every factorize call.
const std::vector<uint32_t>& trial_primes() {
  static const std::vector<uint32_t> primes = [] {
    const uint32_t limit = 10'000'000;
    std::vector<bool> composite(limit / 2, false);  // odd numbers 3,5,...
    std::vector<uint32_t> out;
    out.push_back(2);
    for (uint32_t i = 0; i < composite.size(); i++) {
      if (composite[i]) continue;
      uint64_t p = 2 * static_cast<uint64_t>(i) + 3;
      out.push_back(static_cast<uint32_t>(p));
      for (uint64_t j = (p * p - 3) / 2; j < composite.size(); j += p) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

}  // namespace

Factorization factorize(const Int& n) {
  if (n < 1) throw std::invalid_argument("factorize: argument must be >= 1");
  Factorization f;
  f.n = n;
  Int rest = n;
  for (uint32_t p : trial_primes()) {
    if (rest == 1) break;
    // stop early once p^2 > rest; the cofactor is then prime
    if (Int(p) * p > rest) break;
    if (!mpz_divisible_ui_p(rest.get_mpz_t(), p)) continue;
    unsigned e = 0;
    do {
      mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
      e++;
    } while (mpz_divisible_ui_p(rest.get_mpz_t(), p));
    f.factors.push_back({Int(p), e});
  }
  if (rest > 1) {
    if (rest < Int(10'000'000) * Int(10'000'000)) {
      // below (10^7)^2 and free of primes <= 10^7: prime cofactor
      f.factors.push_back({rest, 1});
    } else if (is_probable_prime(rest)) {
      f.factors.push_back({rest, 1});
    } else if (mpz_perfect_power_p(rest.get_mpz_t())) {
      // recover p^e cofactors (constructed moduli are often proper powers)
      unsigned long e = 2;
      for (;; e++) {
        Int r = root_floor(rest, e);
        if (r <= 1) throw std::domain_error("factorization guard exceeded");
        if (pow_ui(r, e) == rest && is_probable_prime(r)) {
          f.factors.push_back({r, static_cast<unsigned>(e)});
          break;
        }
        if (pow_ui(r, e) == rest && !is_probable_prime(r)) {
          // power of a composite: factor the root recursively
          Factorization sub = factorize(r);
          for (auto& pp : sub.factors)
            f.factors.push_back({pp.p, static_cast<unsigned>(pp.e * e)});
          break;
        }
      }
    } else {
      throw std::domain_error("factorization guard exceeded");
    }
  }
  std::sort(f.factors.begin(), f.factors.end(),
            [](const PrimePower& a, const PrimePower& b) { return a.p < b.p; });
  return f;
}

Int uniform_int(std::mt19937_64& rng, const Int& lo, const Int& hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
  Int span = hi - lo;
  size_t bits = mpz_sizeinbase(span.get_mpz_t(), 2);
  for (;;) {
    Int draw = 0;
    for (size_t got = 0; got < bits; got += 64) {
      draw <<= 64;
      draw += Int(static_cast<unsigned long>(rng()));
    }
    // keep only `bits` low bits so the acceptance probability stays >= 1/2
    Int mask = (Int(1) << bits) - 1;
    draw &= mask;
    if (draw <= span) return lo + draw;
  }
}

Rat parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("parse_rational: empty string");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rat r;
    if (mpq_set_str(r.get_mpq_t(), s.c_str(), 10) != 0)
      throw std::invalid_argument("parse_rational: bad fraction '" + s + "'");
    if (r.get_den() == 0) throw std::invalid_argument("parse_rational: zero denominator");
    r.canonicalize();
    return r;
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    size_t frac_len = s.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+")
      throw std::invalid_argument("parse_rational: bad decimal '" + s + "'");
    Int num;
    if (mpz_set_str(num.get_mpz_t(), digits.c_str(), 10) != 0)
      throw std::invalid_argument("parse_rational: bad decimal '" + s + "'");
    Rat r(num, pow_ui(Int(10), frac_len));
    r.canonicalize();
    return r;
  }
  Int whole;
  if (mpz_set_str(whole.get_mpz_t(), s.c_str(), 10) != 0)
    throw std::invalid_argument("parse_rational: bad integer '" + s + "'");
  return Rat(whole);
}

std::string rat_str(const Rat& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

}  // namespace ndcorr
