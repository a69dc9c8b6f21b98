#pragma once

#include "ndcorr/intmath.hpp"

#include <complex>
#include <string>
#include <vector>

namespace ndcorr {

// One chain system b*x_i^d - b*x_{i+1}^d = a_i (mod q), i = 1..m-1.
struct CurveSpec {
  int m = 2;           // number of unknowns, >= 2
  int d = 2;           // power, >= 2
  Int q = 2;           // modulus, >= 2
  Int b = 1;           // unit multiplier, gcd(b, q) = 1
  std::vector<Int> a;  // m-1 right-hand sides, canonical residues mod q
};

// Throws std::invalid_argument when fields are out of range or b is not a
// unit ("b not invertible").
void validate(const CurveSpec& spec);

// counts[t] = #{x mod c : x^d = t (mod c)}. Built by one pass over Z_c.
struct PowerResidueTable {
  unsigned long modulus = 0;
  int d = 0;
  std::vector<unsigned> counts;
};

PowerResidueTable power_residue_table(unsigned long c, int d);

struct CrtFactor {
  Int p;
  unsigned e = 1;
  Int nu;      // solution count mod p^e
  Int defect;  // nu - p^e
};

struct PointCountResult {
  Int nu;
  Int defect;  // nu - q
  std::vector<CrtFactor> crt_factors;
};

// Exact solution count. Per prime power the count is the convolution-style
// sum over t of prod_i counts[(t + Ahat_i) mod p^e], with Ahat the suffix
// sums of a scaled by the inverse of b; factors recombine multiplicatively.
PointCountResult nu(const CurveSpec& spec);

// Exhaustive transcription of the defining congruences, the oracle the fast
// path is judged against. Guard: q^m <= 10^8.
Int nu_brute(const CurveSpec& spec);

struct PartialSumProfile {
  std::vector<Int> sums;     // integer suffix sums A_1..A_m, with A_m = 0
  std::vector<Int> reduced;  // A_i * bbar mod p, canonical residues
  int r_eff = 0;             // distinct values among the reduced sums
  Int D;                     // prod_{i<j} (A_i - A_j) over the integer sums
};

// The a entries are integer lifts and may be negative; reduction happens
// against p only in the `reduced` field.
PartialSumProfile partial_sum_profile(const std::vector<Int>& a, const Int& p, const Int& b);

// For prime q not dividing d: true iff the scaled suffix sums A_i * bbar,
// i < m, are pairwise distinct and nonzero mod q. Throws std::domain_error
// ("criterion hypothesis violated") when q is composite or q | d.
bool is_irreducible_criterion(const CurveSpec& spec);

// For prime q not dividing d: the exact rational B with
// nu = d^(m - r_eff) * (q + B). Same hypothesis error as above.
Rat weil_defect(const CurveSpec& spec);

// Sum of the defect products A(d, a, c) over every a mod c; zero when the
// counting kernel is consistent. Exact.
Int zero_sum_check(int d, int m, const Int& c, const Int& b);

// Confirms that the chain generators x_j^d - x_{j+1}^d - a_j form a Groebner
// basis under lex order by reducing every s-polynomial to zero. The a_j are
// carried as extra symbols below the x's.
bool groebner_selfcheck(int m, int d);

// Sum of e(-(r . x) / q) over the points x of the chain system, by
// enumeration under the same guard as nu_brute. r must have m entries.
std::complex<double> curve_exponential_sum(const CurveSpec& spec, const std::vector<Int>& r);

// One-line record of a count, stable field order.
std::string point_count_line(const CurveSpec& spec, const PointCountResult& result);

}  // namespace ndcorr
