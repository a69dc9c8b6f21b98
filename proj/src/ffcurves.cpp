#include "ndcorr/ffcurves.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ndcorr {

namespace {

constexpr unsigned long kTableLimit = 20'000'000;
constexpr long kBruteLimit = 100'000'000;

unsigned long pow_mod_small(unsigned long x, int d, unsigned long c) {
  unsigned long r = 1 % c;
  unsigned long base = x % c;
  int e = d;
  while (e > 0) {
    if (e & 1) r = r * base % c;
    base = base * base % c;
    e >>= 1;
  }
  return r;
}

unsigned long invert_mod(const Int& b, unsigned long c) {
  Int inv;
  if (mpz_invert(inv.get_mpz_t(), Int(b % c).get_mpz_t(), Int(c).get_mpz_t()) == 0)
    throw std::invalid_argument("b not invertible");
  return inv.get_ui();
}

Int int128_to_int(unsigned __int128 v) {
  Int hi(static_cast<unsigned long>(v >> 64));
  Int lo(static_cast<unsigned long>(v));
  return (hi << 64) + lo;
}

// Scaled suffix sums Ahat_i = (a_i + ... + a_{m-1}) * bbar mod c, Ahat_m = 0.
std::vector<unsigned long> scaled_suffix_sums(const std::vector<Int>& a, const Int& b,
                                              unsigned long c) {
  unsigned long bbar = invert_mod(b, c);
  std::vector<unsigned long> ahat(a.size() + 1, 0);
  unsigned long acc = 0;
  for (size_t i = a.size(); i-- > 0;) {
    acc = (acc + mpz_fdiv_ui(a[i].get_mpz_t(), c)) % c;
    ahat[i] = acc * bbar % c;  // both factors < c <= 2e7, no overflow
  }
  return ahat;
}

Int chain_count(const PowerResidueTable& table, const std::vector<unsigned long>& ahat) {
  const unsigned long c = table.modulus;
  const size_t m = ahat.size();
  if (m <= 4) {
    // counts < 2^25 each, so a product of four stays under 2^100 and the
    // sum of c < 2^25 such terms still fits __int128
    unsigned __int128 total = 0;
    for (unsigned long t = 0; t < c; t++) {
      unsigned __int128 prod = 1;
      for (size_t i = 0; i < m && prod != 0; i++) {
        unsigned long u = t + ahat[i];
        if (u >= c) u -= c;
        prod *= table.counts[u];
      }
      total += prod;
    }
    return int128_to_int(total);
  }
  Int total = 0;
  for (unsigned long t = 0; t < c; t++) {
    Int prod = 1;
    for (size_t i = 0; i < m && prod != 0; i++) {
      unsigned long u = t + ahat[i];
      if (u >= c) u -= c;
      prod *= table.counts[u];
    }
    total += prod;
  }
  return total;
}

unsigned long small_modulus(const Int& pe) {
  if (pe > static_cast<long>(kTableLimit))
    throw std::domain_error("modulus too large for residue table");
  return pe.get_ui();
}

void require_prime_not_dividing_d(const CurveSpec& spec) {
  if (!is_probable_prime(spec.q) ||
      mpz_divisible_p(Int(spec.d).get_mpz_t(), spec.q.get_mpz_t()))
    throw std::domain_error("criterion hypothesis violated");
}

}  // namespace

void validate(const CurveSpec& spec) {
  if (spec.m < 2) throw std::invalid_argument("m must be >= 2");
  if (spec.d < 2) throw std::invalid_argument("d must be >= 2");
  if (spec.q < 2) throw std::invalid_argument("q must be >= 2");
  if (spec.a.size() != static_cast<size_t>(spec.m - 1))
    throw std::invalid_argument("a must have m-1 entries");
  for (const Int& ai : spec.a)
    if (ai < 0 || ai >= spec.q) throw std::invalid_argument("a out of range");
  if (gcd(spec.b, spec.q) != 1) throw std::invalid_argument("b not invertible");
}

PowerResidueTable power_residue_table(unsigned long c, int d) {
  if (c < 2) throw std::invalid_argument("modulus must be >= 2");
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  if (c > kTableLimit) throw std::domain_error("modulus too large for residue table");
  PowerResidueTable t;
  t.modulus = c;
  t.d = d;
  t.counts.assign(c, 0);
  for (unsigned long x = 0; x < c; x++) t.counts[pow_mod_small(x, d, c)]++;
  return t;
}

PointCountResult nu(const CurveSpec& spec) {
  validate(spec);
  Factorization f = factorize(spec.q);
  PointCountResult out;
  out.nu = 1;
  for (const auto& pp : f.factors) {
    Int pe = pow_ui(pp.p, pp.e);
    unsigned long c = small_modulus(pe);
    PowerResidueTable table = power_residue_table(c, spec.d);
    Int nu_c = chain_count(table, scaled_suffix_sums(spec.a, spec.b, c));
    out.crt_factors.push_back({pp.p, pp.e, nu_c, nu_c - pe});
    out.nu *= nu_c;
  }
  out.defect = out.nu - spec.q;
  return out;
}

Int nu_brute(const CurveSpec& spec) {
  validate(spec);
  Int total_space = pow_ui(spec.q, static_cast<unsigned long>(spec.m));
  if (total_space > kBruteLimit) throw std::domain_error("instance too large for oracle");

  const unsigned long q = spec.q.get_ui();
  std::vector<unsigned long> bpow(q);
  for (unsigned long x = 0; x < q; x++) {
    unsigned long xp = pow_mod_small(x, spec.d, q);
    bpow[x] = Int(spec.b * xp % spec.q).get_ui();
  }
  std::vector<unsigned long> rhs(spec.a.size());
  for (size_t i = 0; i < spec.a.size(); i++) rhs[i] = mpz_fdiv_ui(spec.a[i].get_mpz_t(), q);

  std::vector<unsigned long> x(spec.m, 0);
  Int count = 0;
  while (true) {
    bool ok = true;
    for (int i = 0; i + 1 < spec.m && ok; i++) {
      unsigned long diff = (bpow[x[i]] + q - bpow[x[i + 1]]) % q;
      ok = diff == rhs[i];
    }
    if (ok) count += 1;

    int pos = spec.m - 1;
    while (pos >= 0 && ++x[pos] == q) x[pos--] = 0;
    if (pos < 0) break;
  }
  return count;
}

PartialSumProfile partial_sum_profile(const std::vector<Int>& a, const Int& p, const Int& b) {
  if (p < 2) throw std::invalid_argument("modulus must be >= 2");
  const size_t m = a.size() + 1;

  PartialSumProfile out;
  out.sums.assign(m, Int(0));
  for (size_t i = m - 1; i-- > 0;) out.sums[i] = out.sums[i + 1] + a[i];

  out.D = 1;
  for (size_t i = 0; i < m; i++)
    for (size_t j = i + 1; j < m; j++) out.D *= out.sums[i] - out.sums[j];

  Int bbar;
  if (mpz_invert(bbar.get_mpz_t(), Int(b % p).get_mpz_t(), p.get_mpz_t()) == 0)
    throw std::invalid_argument("b not invertible");

  out.reduced.resize(m);
  for (size_t i = 0; i < m; i++) {
    Int r = out.sums[i] * bbar;
    mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), p.get_mpz_t());
    out.reduced[i] = r;
  }

  std::vector<Int> sorted = out.reduced;
  std::sort(sorted.begin(), sorted.end());
  out.r_eff = static_cast<int>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
  return out;
}

bool is_irreducible_criterion(const CurveSpec& spec) {
  validate(spec);
  require_prime_not_dividing_d(spec);
  PartialSumProfile prof = partial_sum_profile(spec.a, spec.q, spec.b);
  return prof.r_eff == spec.m;
}

Rat weil_defect(const CurveSpec& spec) {
  validate(spec);
  require_prime_not_dividing_d(spec);
  PointCountResult count = nu(spec);
  PartialSumProfile prof = partial_sum_profile(spec.a, spec.q, spec.b);
  Int scale = pow_ui(Int(spec.d), static_cast<unsigned long>(spec.m - prof.r_eff));
  Rat B(count.nu, scale);
  B.canonicalize();
  return B - Rat(spec.q);
}

Int zero_sum_check(int d, int m, const Int& c, const Int& b) {
  if (d < 2 || m < 2) throw std::invalid_argument("d and m must be >= 2");
  if (c < 2) throw std::invalid_argument("modulus must be >= 2");
  if (gcd(b, c) != 1) throw std::invalid_argument("b not invertible");
  Int range = pow_ui(c, static_cast<unsigned long>(m - 1));
  if (range > 10'000'000) throw std::domain_error("zero sum range too large");

  Factorization f = factorize(c);
  struct FactorData {
    unsigned long c;
    std::vector<long> defect;  // indexed by the a-vector mod c, odometer order
  };
  std::vector<FactorData> data;

  // Per prime power, tabulate the defect for every a-vector mod p^e once;
  // the outer sweep then reads products off these tables.
  for (const auto& pp : f.factors) {
    unsigned long cj = small_modulus(pow_ui(pp.p, pp.e));
    PowerResidueTable table = power_residue_table(cj, d);
    unsigned long bbar = invert_mod(b, cj);

    FactorData fd;
    fd.c = cj;
    size_t cells = 1;
    for (int i = 0; i + 1 < m; i++) cells *= cj;
    fd.defect.resize(cells);

    std::vector<unsigned long> a(m - 1, 0);
    std::vector<unsigned long> ahat(m, 0);
    for (size_t idx = 0; idx < cells; idx++) {
      unsigned long acc = 0;
      for (size_t i = a.size(); i-- > 0;) {
        acc = (acc + a[i]) % cj;
        ahat[i] = acc * bbar % cj;
      }
      unsigned __int128 nu_c = 0;
      for (unsigned long t = 0; t < cj; t++) {
        unsigned long prod = 1;
        for (int i = 0; i < m && prod; i++) {
          unsigned long u = t + ahat[i];
          if (u >= cj) u -= cj;
          prod *= table.counts[u];
        }
        nu_c += prod;
      }
      fd.defect[idx] = static_cast<long>(nu_c) - static_cast<long>(cj);

      int pos = m - 2;
      while (pos >= 0 && ++a[pos] == cj) a[pos--] = 0;
    }
    data.push_back(std::move(fd));
  }

  // odometer over a mod c, tracking each factor's cell index in lockstep
  const unsigned long cl = c.get_ui();
  std::vector<unsigned long> a(m - 1, 0);
  std::vector<std::vector<unsigned long>> digits(data.size(),
                                                 std::vector<unsigned long>(m - 1, 0));
  Int sum = 0;
  while (true) {
    Int prod = 1;
    for (size_t j = 0; j < data.size(); j++) {
      size_t idx = 0;
      for (int i = 0; i + 1 < m; i++) idx = idx * data[j].c + digits[j][i];
      prod *= Int(data[j].defect[idx]);
    }
    sum += prod;

    int pos = m - 2;
    while (pos >= 0) {
      a[pos]++;
      bool wrapped = a[pos] == cl;
      if (wrapped) a[pos] = 0;
      for (size_t j = 0; j < data.size(); j++) digits[j][pos] = a[pos] % data[j].c;
      if (!wrapped) break;
      pos--;
    }
    if (pos < 0) break;
  }
  return sum;
}

std::complex<double> curve_exponential_sum(const CurveSpec& spec, const std::vector<Int>& r) {
  validate(spec);
  if (r.size() != static_cast<size_t>(spec.m))
    throw std::invalid_argument("r must have m entries");
  Int total_space = pow_ui(spec.q, static_cast<unsigned long>(spec.m));
  if (total_space > kBruteLimit) throw std::domain_error("instance too large for oracle");

  const unsigned long q = spec.q.get_ui();
  unsigned long bbar = invert_mod(spec.b, q);
  std::vector<unsigned long> pw(q);
  for (unsigned long x = 0; x < q; x++) pw[x] = pow_mod_small(x, spec.d, q);
  std::vector<unsigned long> rhs(spec.a.size());
  for (size_t i = 0; i < spec.a.size(); i++)
    rhs[i] = mpz_fdiv_ui(spec.a[i].get_mpz_t(), q) * bbar % q;
  std::vector<unsigned long> rr(r.size());
  for (size_t i = 0; i < r.size(); i++) rr[i] = mpz_fdiv_ui(r[i].get_mpz_t(), q);

  const double tau = 2.0 * std::acos(-1.0);
  std::complex<double> sum(0.0, 0.0);
  std::vector<unsigned long> x(spec.m, 0);
  while (true) {
    bool ok = true;
    for (int i = 0; i + 1 < spec.m && ok; i++)
      ok = (pw[x[i]] + q - pw[x[i + 1]]) % q == rhs[i];
    if (ok) {
      unsigned long dot = 0;
      for (int i = 0; i < spec.m; i++) dot = (dot + rr[i] * x[i]) % q;
      double angle = -tau * static_cast<double>(dot) / static_cast<double>(q);
      sum += std::complex<double>(std::cos(angle), std::sin(angle));
    }
    int pos = spec.m - 1;
    while (pos >= 0 && ++x[pos] == q) x[pos--] = 0;
    if (pos < 0) break;
  }
  return sum;
}

std::string point_count_line(const CurveSpec& spec, const PointCountResult& result) {
  std::ostringstream out;
  out << "nu " << spec.q.get_str() << " " << spec.d << " " << spec.m << " "
      << spec.b.get_str() << " a=";
  for (size_t i = 0; i < spec.a.size(); i++) {
    if (i) out << ",";
    out << spec.a[i].get_str();
  }
  out << " nu=" << result.nu.get_str() << " A=" << result.defect.get_str() << " factors=";
  for (size_t i = 0; i < result.crt_factors.size(); i++) {
    const auto& cf = result.crt_factors[i];
    if (i) out << ";";
    out << cf.p.get_str() << "^" << cf.e << ":" << cf.nu.get_str();
  }
  return out.str();
}

}  // namespace ndcorr
