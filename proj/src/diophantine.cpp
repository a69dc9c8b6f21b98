#include "ndcorr/diophantine.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace ndcorr {

std::vector<Convergent> cf_convergents(const std::vector<Int>& expansion, size_t count) {
  if (expansion.empty()) throw std::invalid_argument("empty expansion");
  if (count > expansion.size())
    throw std::invalid_argument("count exceeds expansion length");
  if (expansion[0] < 0) throw std::invalid_argument("negative leading quotient");
  for (size_t i = 1; i < expansion.size(); i++)
    if (expansion[i] < 1) throw std::invalid_argument("partial quotient must be positive");

  std::vector<Convergent> out;
  out.reserve(count);
  Int p_prev2 = 0, p_prev = 1;  // p_{-2}, p_{-1}
  Int q_prev2 = 1, q_prev = 0;
  for (size_t n = 0; n < count; n++) {
    Int p = expansion[n] * p_prev + p_prev2;
    Int q = expansion[n] * q_prev + q_prev2;
    out.push_back({p, q});
    p_prev2 = p_prev; p_prev = p;
    q_prev2 = q_prev; q_prev = q;
  }
  return out;
}

SquareDecomposition square_decomposition(const Factorization& f) {
  SquareDecomposition d;
  d.q = f.n;
  d.u = 1;
  d.v = 1;
  d.exponent_one_part = 1;
  for (const auto& pp : f.factors) {
    if (pp.e % 2 == 1) d.u *= pp.p;
    d.v *= pow_ui(pp.p, pp.e / 2);
    if (pp.e == 1) d.exponent_one_part *= pp.p;
  }
  return d;
}

SquareDecomposition square_decomposition(const Int& q) {
  if (q < 1) throw std::invalid_argument("square_decomposition: q must be >= 1");
  return square_decomposition(factorize(q));
}

std::string ladder_mode_name(LadderMode m) {
  switch (m) {
    case LadderMode::raw: return "raw";
    case LadderMode::prime_denominator: return "prime_denominator";
    case LadderMode::square_rich: return "square_rich";
  }
  throw std::logic_error("unknown ladder mode");
}

LadderMode ladder_mode_from_name(const std::string& s) {
  if (s == "raw") return LadderMode::raw;
  if (s == "prime_denominator") return LadderMode::prime_denominator;
  if (s == "square_rich") return LadderMode::square_rich;
  throw std::invalid_argument("unknown ladder mode '" + s + "'");
}

namespace {

Rat entry_value(const LadderEntry& e) {
  Rat r(e.b, e.q);
  r.canonicalize();
  return r;
}

// Smallest b with b/q on the required side of x = prev + 0 and |b/q - prev|
// < 1/q: sign > 0 takes floor(q*prev)+1, sign < 0 takes ceil(q*prev)-1.
Int pick_numerator(const Rat& prev, const Int& q, int sign) {
  Int scaled_num = Int(prev.get_num()) * q;
  Int b;
  if (sign > 0) {
    mpz_fdiv_q(b.get_mpz_t(), scaled_num.get_mpz_t(), prev.get_den_mpz_t());
    b += 1;
  } else {
    mpz_cdiv_q(b.get_mpz_t(), scaled_num.get_mpz_t(), prev.get_den_mpz_t());
    b -= 1;
  }
  return b;
}

}  // namespace

ApproximantLadder ApproximantLadder::build(const Int& q0, const Int& b0,
                                           const std::vector<long>& ks, LadderMode mode) {
  if (q0 < 2) throw std::invalid_argument("q0 < 2");
  if (b0 < 1 || b0 >= q0) throw std::invalid_argument("b0 out of range");
  if (gcd(b0, q0) != 1) throw std::invalid_argument("gcd violation");
  if (ks.empty()) throw std::invalid_argument("empty k sequence");
  for (long k : ks)
    if (k < 3) throw std::invalid_argument("k below 3");
  for (size_t i = 1; i < ks.size(); i++)
    if (ks[i] < ks[i - 1]) throw std::domain_error("type not unbounded");
  if (ks.size() >= 2 && ks.back() == ks.front())
    throw std::domain_error("type not unbounded");

  ApproximantLadder lad;
  lad.mode_ = mode;
  lad.entries_.push_back({b0, q0, ks[0], Rat(0), std::nullopt});

  // seed square decomposition (small q0; powers of it stay derivable)
  Factorization seed_fact = factorize(q0);
  lad.entries_[0].square = square_decomposition(seed_fact);
  std::vector<unsigned long> seed_exps;
  for (const auto& pp : seed_fact.factors) seed_exps.push_back(pp.e);

  int sign = +1;  // increment into entry j+1: alternates +, -, +, ...
  for (size_t j = 0; j < ks.size(); j++) {
    const LadderEntry& cur = lad.entries_.back();
    long k = ks[j];
    Int target;
    mpz_pow_ui(target.get_mpz_t(), cur.q.get_mpz_t(), static_cast<unsigned long>(k));
    long next_k = (j + 1 < ks.size()) ? ks[j + 1] : ks.back() + 1;

    LadderEntry next;
    next.k = next_k;
    Rat prev = entry_value(cur);

    if (mode == LadderMode::raw) {
      next.q = target;
      next.b = cur.b * pow_ui(cur.q, static_cast<unsigned long>(k - 1)) + sign;
      // q_{j+1} shares q_j's primes and b = mult*q_j^... +- 1, so gcd stays 1
      Factorization f;
      f.n = next.q;
      unsigned long mult = static_cast<unsigned long>(k);
      for (size_t i = 0; i < seed_fact.factors.size(); i++) {
        seed_exps[i] *= mult;
        f.factors.push_back({seed_fact.factors[i].p, static_cast<unsigned>(seed_exps[i])});
      }
      next.square = square_decomposition(f);
    } else if (mode == LadderMode::prime_denominator) {
      next.q = next_prime_at_least(target);
      for (int attempts = 0;; attempts++) {
        next.b = pick_numerator(prev, next.q, sign);
        if (next.b >= 1 && next.b < next.q && gcd(next.b, next.q) == 1) break;
        if (attempts > 1000) throw std::domain_error("ladder step failed");
        next.q = next_prime_at_least(next.q + 1);
      }
      next.square = SquareDecomposition{next.q, next.q, Int(1), next.q};
    } else {  // square_rich: q = 3*v^2 >= target with v >= 3, so v >= q^(1/3)
      Int v = root_floor((target + 2) / 3, 2);
      while (3 * v * v < target) v += 1;
      if (v < 3) v = 3;
      for (int attempts = 0;; attempts++) {
        next.q = 3 * v * v;
        next.b = pick_numerator(prev, next.q, sign);
        if (next.b >= 1 && next.b < next.q && gcd(next.b, next.q) == 1) break;
        if (attempts > 1000) throw std::domain_error("ladder step failed");
        v += 1;
      }
      next.square = SquareDecomposition{next.q, Int(3), v, Int(0)};
      // exponent-one part of 3*v^2: the prime 3 iff 3 does not divide v
      next.square->exponent_one_part = mpz_divisible_ui_p(v.get_mpz_t(), 3) ? Int(1) : Int(3);
    }

    lad.entries_.push_back(std::move(next));
    sign = -sign;
  }

  lad.verify_and_bound();
  return lad;
}

ApproximantLadder ApproximantLadder::from_entries(LadderMode mode,
                                                  std::vector<LadderEntry> entries,
                                                  bool certify) {
  if (entries.empty()) throw std::invalid_argument("empty ladder");
  ApproximantLadder lad;
  lad.mode_ = mode;
  lad.entries_ = std::move(entries);
  for (size_t j = 0; j < lad.entries_.size(); j++) {
    const auto& e = lad.entries_[j];
    if (e.q < 2) throw std::invalid_argument("ladder q below 2");
    if (e.b < 1 || e.b >= e.q) throw std::invalid_argument("ladder b out of range");
    if (gcd(e.b, e.q) != 1) throw std::invalid_argument("gcd violation");
    if (e.k < 2) throw std::invalid_argument("ladder k below 2");
    if (j > 0 && lad.entries_[j - 1].q >= e.q)
      throw std::invalid_argument("ladder q not increasing");
  }
  if (certify) lad.verify_and_bound();
  return lad;
}

void ApproximantLadder::verify_and_bound() {
  const size_t J = entries_.size() - 1;
  std::vector<Rat> delta(entries_.size());  // delta[i] = value_i - value_{i-1}
  for (size_t i = 1; i <= J; i++) {
    delta[i] = entry_value(entries_[i]) - entry_value(entries_[i - 1]);
    int want = (i % 2 == 1) ? +1 : -1;
    if (sgn(delta[i]) != want) throw std::domain_error("certificate violation: increment sign");
    if (i > 1 && !(rat_abs(delta[i]) < rat_abs(delta[i - 1])))
      throw std::domain_error("certificate violation: increment growth");
  }

  // Alternating increments with shrinking magnitude: for every j the tail
  // |alpha - b_j/q_j| is bounded by the first omitted increment, and any
  // continuation below q_J^-k_J keeps the pattern going.
  Rat last_tail = rat_pow_int(Rat(entries_[J].q), -entries_[J].k);
  if (J >= 1 && !(last_tail < rat_abs(delta[J])))
    throw std::domain_error("certificate violation: final certificate too weak");
  entries_[J].tail_bound = last_tail;

  for (size_t j = 0; j < J; j++) {
    Rat bound = rat_abs(delta[j + 1]);
    Rat budget = rat_pow_int(Rat(entries_[j].q), -entries_[j].k);
    if (!(bound <= budget)) throw std::domain_error("certificate violation: tail exceeds budget");
    // belt and braces: the in-prefix tail must sit inside the budget too
    Rat prefix_tail = rat_abs(entry_value(entries_[J]) - entry_value(entries_[j]));
    if (!(prefix_tail <= budget))
      throw std::domain_error("certificate violation: prefix tail exceeds budget");
    entries_[j].tail_bound = bound;
  }
  certified_ = true;
}

const LadderEntry& ApproximantLadder::entry(size_t j) const {
  if (j >= entries_.size()) throw std::out_of_range("ladder index out of range");
  return entries_[j];
}

void ApproximantLadder::save(std::ostream& out) const {
  out << "ladder v1 mode=" << ladder_mode_name(mode_) << "\n";
  for (size_t j = 0; j < entries_.size(); j++) {
    out << j << " " << entries_[j].b.get_str() << " " << entries_[j].q.get_str() << " "
        << entries_[j].k << "\n";
  }
}

ApproximantLadder ApproximantLadder::load(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("ladder parse error: empty input");
  const std::string prefix = "ladder v1 mode=";
  if (header.rfind(prefix, 0) != 0)
    throw std::invalid_argument("ladder parse error: bad header");
  LadderMode mode = ladder_mode_from_name(header.substr(prefix.size()));

  std::vector<LadderEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    unsigned long j;
    std::string b_s, q_s;
    long k;
    if (!(ls >> j >> b_s >> q_s >> k))
      throw std::invalid_argument("ladder parse error: bad row");
    if (j != entries.size()) throw std::invalid_argument("ladder parse error: row index");
    LadderEntry e;
    e.b = Int(b_s, 10);
    e.q = Int(q_s, 10);
    e.k = k;
    entries.push_back(std::move(e));
  }
  ApproximantLadder lad = from_entries(mode, std::move(entries), /*certify=*/true);

  // Recover square decompositions where the construction left fingerprints;
  // everything else falls back to guarded factorization on demand.
  auto& es = lad.entries_;
  for (size_t j = 0; j < es.size(); j++) {
    if (mode == LadderMode::prime_denominator && is_probable_prime(es[j].q)) {
      es[j].square = SquareDecomposition{es[j].q, es[j].q, Int(1), es[j].q};
    } else if (mode == LadderMode::square_rich && j > 0 &&
               mpz_divisible_ui_p(es[j].q.get_mpz_t(), 3)) {
      Int rest = es[j].q / 3;
      if (is_perfect_square(rest)) {
        Int v = root_floor(rest, 2);
        Int hat = mpz_divisible_ui_p(v.get_mpz_t(), 3) ? Int(1) : Int(3);
        es[j].square = SquareDecomposition{es[j].q, Int(3), v, hat};
      }
    } else if (mode == LadderMode::raw && j > 0 && es[j - 1].square.has_value()) {
      // q_j should be q_{j-1}^{k_{j-1}}; confirm before deriving
      long k = es[j - 1].k;
      if (k >= 2 && pow_ui(es[j - 1].q, static_cast<unsigned long>(k)) == es[j].q) {
        const auto& prev = *es[j - 1].square;
        SquareDecomposition d;
        d.q = es[j].q;
        if (k % 2 == 0) {
          d.u = 1;
          d.v = pow_ui(es[j - 1].q, static_cast<unsigned long>(k / 2));
          d.exponent_one_part = 1;
        } else {
          // (u v^2)^k with k odd: u stays, v -> u^((k-1)/2) v^k
          d.u = prev.u;
          d.v = pow_ui(prev.u, static_cast<unsigned long>((k - 1) / 2)) *
                pow_ui(prev.v, static_cast<unsigned long>(k));
          d.exponent_one_part = (k == 1) ? prev.exponent_one_part : Int(1);
        }
        es[j].square = d;
      }
    }
    if (!es[j].square.has_value()) {
      try {
        es[j].square = square_decomposition(es[j].q);
      } catch (const std::domain_error&) {
        // out of factorization reach; diophantine_ratio will refuse this entry
      }
    }
  }
  return lad;
}

double diophantine_ratio(const ApproximantLadder& ladder, size_t j) {
  const LadderEntry& e = ladder.entry(j);
  SquareDecomposition sq;
  if (e.square.has_value()) {
    sq = *e.square;
  } else {
    sq = square_decomposition(e.q);  // may throw the factorization guard
  }
  if (sq.u == sq.q) return 1.0;
  if (sq.u == 1) return 0.0;
  return static_cast<double>(big_log(sq.u) / big_log(sq.q));
}

namespace {

constexpr unsigned long kDistanceEnumLimit = 2'000'000;

// circle distance between a/qa and b/qb, both reduced to [0,1)
Rat circle_dist(const Rat& x, const Rat& y) {
  Rat t = rat_abs(x - y);
  Rat other = Rat(1) - t;
  return t < other ? t : other;
}

Rat enum_max_dist(int d, const Convergent& A, const Convergent& B, const Int& N) {
  if (N > static_cast<long>(kDistanceEnumLimit))
    throw std::domain_error("enumeration too large");
  unsigned long n_max = N.get_ui();
  Rat best(0);
  for (unsigned long n = 1; n <= n_max; n++) {
    Int nd = pow_ui(Int(n), static_cast<unsigned long>(d));
    Rat xa(A.p * nd % A.q, A.q);
    Rat xb(B.p * nd % B.q, B.q);
    xa.canonicalize();
    xb.canonicalize();
    Rat dist = circle_dist(xa, xb);
    if (dist > best) best = dist;
  }
  return best;
}

const LadderEntry& last_certified_entry(const ApproximantLadder& lad) {
  if (!lad.certified()) throw std::domain_error("no tail certificate");
  return lad.entries().back();
}

// N^(d+1) as exact integer
Int n_power_budget(const Int& N, int d) {
  return pow_ui(N, static_cast<unsigned long>(d + 1));
}

}  // namespace

Rat scaled_distance(const SeqDescriptor& a, const SeqDescriptor& b, const Int& N) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (a.d < 1 || b.d < 1) throw std::invalid_argument("d must be >= 1");
  if (a.d != b.d) throw std::invalid_argument("descriptors disagree on d");
  const int d = a.d;

  const bool a_rat = a.rational.has_value();
  const bool b_rat = b.rational.has_value();
  if (!a_rat && a.ladder == nullptr) throw std::invalid_argument("descriptor lacks a source");
  if (!b_rat && b.ladder == nullptr) throw std::invalid_argument("descriptor lacks a source");

  if (a_rat && b_rat) {
    return Rat(N) * enum_max_dist(d, *a.rational, *b.rational, N);
  }

  if (a_rat != b_rat) {
    const Convergent& r = a_rat ? *a.rational : *b.rational;
    const ApproximantLadder& lad = *(a_rat ? b.ladder : a.ladder);
    if (!lad.certified()) throw std::domain_error("no tail certificate");
    // If r is one of the ladder's own convergents the stored tail bound is
    // sharp and no enumeration is needed: every point sits within
    // n^d * tail_bound_j of the limit.
    for (const auto& e : lad.entries()) {
      if (e.b == r.p && e.q == r.q) return Rat(n_power_budget(N, d)) * e.tail_bound;
    }
    const LadderEntry& last = last_certified_entry(lad);
    Rat enumerated = enum_max_dist(d, r, Convergent{last.b, last.q}, N);
    return Rat(N) * enumerated + Rat(n_power_budget(N, d)) * last.tail_bound;
  }

  // ladder vs ladder
  const ApproximantLadder& la = *a.ladder;
  const ApproximantLadder& lb = *b.ladder;
  if (!la.certified() || !lb.certified()) throw std::domain_error("no tail certificate");
  if (&la == &lb) return Rat(0);
  const LadderEntry& ea = last_certified_entry(la);
  const LadderEntry& eb = last_certified_entry(lb);
  if (ea.b == eb.b && ea.q == eb.q && ea.tail_bound == eb.tail_bound &&
      la.size() == lb.size()) {
    bool same = true;
    for (size_t j = 0; j < la.size(); j++) {
      if (la.entry(j).b != lb.entry(j).b || la.entry(j).q != lb.entry(j).q) { same = false; break; }
    }
    if (same) return Rat(0);
  }
  Rat enumerated = enum_max_dist(d, Convergent{ea.b, ea.q}, Convergent{eb.b, eb.q}, N);
  return Rat(N) * enumerated + Rat(n_power_budget(N, d)) * (ea.tail_bound + eb.tail_bound);
}

}  // namespace ndcorr
