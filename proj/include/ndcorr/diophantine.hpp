#pragma once

// Rational approximation layer: continued-fraction convergents, certified
// approximant ladders (b_j/q_j with exact tail bounds |alpha - b_j/q_j| <=
// q_j^-k_j), square decompositions q = u*v^2 with u squarefree, and the
// squarefree log-ratio that drives classification.  alpha is never a float:
// it exists only as a ladder of exact rationals plus certificates.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ndcorr/intmath.hpp"

namespace ndcorr {

struct Convergent {
  Int p, q;
};

// Convergents of [a0; a1, a2, ...] via p_n = a_n p_{n-1} + p_{n-2}.
// Throws std::invalid_argument("empty expansion") on an empty list; count
// must not exceed the expansion length; partial quotients a_i >= 1 for i >= 1.
std::vector<Convergent> cf_convergents(const std::vector<Int>& expansion, size_t count);

struct SquareDecomposition {
  Int q;
  Int u;                  // squarefree part (primes of odd exponent)
  Int v;                  // q = u * v^2
  Int exponent_one_part;  // product of primes dividing q exactly once
};

SquareDecomposition square_decomposition(const Int& q);
SquareDecomposition square_decomposition(const Factorization& f);

enum class LadderMode { raw, prime_denominator, square_rich };

std::string ladder_mode_name(LadderMode m);
LadderMode ladder_mode_from_name(const std::string& s);

struct LadderEntry {
  Int b;
  Int q;
  long k = 0;      // certificate exponent: |alpha - b/q| <= q^-k
  Rat tail_bound;  // exact certified tail bound, verified <= q^-k
  std::optional<SquareDecomposition> square;  // carried when derivable without factoring
};

// A finite prefix of the approximation scheme that defines alpha.  Every
// entry's certificate is verified with exact rationals at build and load
// time; `certified()` reports whether that verification succeeded.
class ApproximantLadder {
 public:
  // q_{j+1} is driven by q_j^{k_j}: raw takes it literally, prime_denominator
  // takes the least prime >= q_j^{k_j}, square_rich takes 3*v^2 >= q_j^{k_j}
  // with v >= max(3, ceil(sqrt(q_j^{k_j}/3))) so v >= q_{j+1}^(1/3).
  // Increments alternate in sign with strictly shrinking magnitude, which is
  // what makes every tail certificate provable on a finite prefix.
  static ApproximantLadder build(const Int& q0, const Int& b0, const std::vector<long>& ks,
                                 LadderMode mode);

  // `certify` re-verifies the certificate chain; pass false to carry an
  // uncertified ladder (scaled_distance will then refuse it).
  static ApproximantLadder from_entries(LadderMode mode, std::vector<LadderEntry> entries,
                                        bool certify);

  static ApproximantLadder load(std::istream& in);
  void save(std::ostream& out) const;

  const std::vector<LadderEntry>& entries() const { return entries_; }
  const LadderEntry& entry(size_t j) const;
  LadderMode mode() const { return mode_; }
  bool certified() const { return certified_; }
  size_t size() const { return entries_.size(); }

 private:
  ApproximantLadder() = default;
  void verify_and_bound();  // throws on a violated certificate

  LadderMode mode_ = LadderMode::raw;
  std::vector<LadderEntry> entries_;
  bool certified_ = false;
};

// log(u_j) / log(q_j) for entry j, where q_j = u_j * v_j^2 with u_j
// squarefree; error below 1e-9 (exactly 1.0 when q_j is squarefree).
double diophantine_ratio(const ApproximantLadder& ladder, size_t j);

// Descriptor of the sequence {n^d * theta}: theta is either a concrete
// rational b/q or the ladder limit alpha itself.
struct SeqDescriptor {
  int d = 1;
  std::optional<Convergent> rational;         // set: theta = p/q (p=b)
  const ApproximantLadder* ladder = nullptr;  // set: theta = alpha(ladder)
};

// Exact upper bound on eps_N = N * max_{n<=N} dist({n^d a}, {n^d b}) with
// dist the circle metric.  Rational-vs-rational is the exact maximum; a
// ladder limit contributes its certified tail bound (throws
// std::domain_error("no tail certificate") on an uncertified ladder).
Rat scaled_distance(const SeqDescriptor& a, const SeqDescriptor& b, const Int& N);

}  // namespace ndcorr
