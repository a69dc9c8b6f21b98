#pragma once

#include "ndcorr/diophantine.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ndcorr {

// Closed axis-aligned box with rational endpoints.
struct Box {
  std::vector<Rat> lo, hi;
  Rat volume() const;
};

// Finite union of pairwise disjoint boxes in R^dim. Disjoint means disjoint
// as point sets, boundaries included, so membership never double counts.
struct Region {
  int dim = 1;
  std::vector<Box> boxes;

  void validate() const;  // dimensions, lo <= hi, pairwise disjointness
  Rat volume() const;
  Rat width_bound() const;  // smallest W with every box inside [-W, W]^dim
  bool empty_set() const { return boxes.empty(); }
  bool contains(const std::vector<Rat>& x) const;

  Region inflated(const Rat& eps) const;  // grow each box by eps per side
  Region deflated(const Rat& eps) const;  // shrink; emptied boxes drop out
  Region negated() const;                 // pointwise mirror image

  // "lo,hi,lo,hi,..." per box, boxes joined by ';'
  static Region parse(int dim, const std::string& text);
  std::string to_string() const;

  static Region symmetric_box(int dim, const Rat& w);  // [-w, w]^dim
  static Region single_box(std::vector<Rat> lo, std::vector<Rat> hi);
};

struct CorrelationRequest {
  int m = 2;
  int d = 1;
  SeqDescriptor source;  // source.d must agree with d
  Int N = 1;
  Region region;         // dimension m-1

  void validate() const;
};

struct CorrelationResult {
  Rat value;        // tuple_count / N
  Int tuple_count;  // ordered m-tuples of distinct indices inside the region
  std::string method;
  double wall_ms = 0.0;
};

// Counts ordered m-tuples of distinct n <= N whose vector of consecutive
// scaled differences N*{x(n_i) - x(n_{i+1})} lies in the region, each
// difference reduced to (-1/2, 1/2] before scaling. Requires N > 2W so that
// reduction is unambiguous ("wrap ambiguity" otherwise). Ladder sources must
// be certified and tight enough that the inflated and deflated counts agree
// ("sandwich too wide" otherwise).
CorrelationResult correlation(const CorrelationRequest& req);

// Literal enumeration over all ordered tuples; rational sources only.
// Guard: N^m <= 10^7.
CorrelationResult correlation_brute(const CorrelationRequest& req);

// Exact enclosure for a certified ladder source: the correlation of the
// limit lies between the counts over the deflated and inflated regions,
// both taken on the deepest rung, since every scaled difference moves by
// at most eps_N = N^(d+1) * tail_bound.
std::pair<Rat, Rat> correlation_sandwich(const CorrelationRequest& req);

// Both sides of the counting identity N*R = sum over integer vectors a in
// the dilated region (dilate factor q/N) with pairwise distinct nonzero
// partial sums, of the [1,N]-restricted solution count. Exact equality holds
// when the d-th powers of 1..N are pairwise distinct mod q; the tested grids
// are chosen that way. Guard: q <= 200, N <= 60.
std::pair<Rat, Rat> star_sum_identity(int m, int d, const Int& b, const Int& q, const Int& N,
                                      const Region& region);

struct FourierCheck {
  Rat lhs;      // correlation value, exact
  double rhs;   // character-sum evaluation
  double diff;  // |lhs - rhs|
};

// Recomputes the pair correlation through complete character sums over the
// chain curves: q^m * nu(N,...) = sum_r S_a(r) * prod_i sum_{x<=N} e(r_i x/q).
// Tiny instances only (m = 2, q <= 13, N <= 6, N < q).
FourierCheck fourier_identity_check(int d, const Int& b, const Int& q, const Int& N,
                                    const Region& region);

struct GapSummary {
  std::vector<Rat> gaps;  // the N circular gaps, in circle order
  int distinct_count = 0;
};

// Sorts {x(n)}, n <= N, on the circle and returns the N circular gaps.
// Rational sources give exact rational gaps; a ladder source is evaluated at
// its deepest certified rung. Duplicate points raise an error naming a
// colliding pair.
GapSummary consecutive_gaps(int d, const SeqDescriptor& source, const Int& N);

// One JSON object, stable field order: m, d, source, N, region, value,
// tuple_count, method.
std::string correlation_json(const CorrelationRequest& req, const CorrelationResult& result);

}  // namespace ndcorr
