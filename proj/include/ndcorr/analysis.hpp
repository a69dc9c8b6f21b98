#pragma once

#include "ndcorr/correlations.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ndcorr {

// One experiment data point. `value` and `reference` stay exact; `deviation`
// and `wall_ms` are diagnostic doubles (wall_ms is excluded from determinism
// guarantees).
struct ExperimentRecord {
  std::string kind;
  int m = 0;
  int d = 0;
  Int q, b, N;
  std::string region;
  Rat value;
  Rat reference;
  double deviation = 0.0;
  uint64_t seed = 0;
  double wall_ms = 0.0;
};

std::string record_json(const ExperimentRecord& r);  // one object per line
std::string record_csv_header();
std::string record_csv(const ExperimentRecord& r);

// Pair/chain correlation sweep over a modulus list with seeded numerators:
// at each q the sequence is b*n^d/q with N = floor(q^theta), and the record
// stores |R - vol(region)|. The exponent window (1 - 1/(2m) + delta0,
// 1 - delta0) is where the equidistribution statement applies; outside it
// the run would not test anything.
struct T2Config {
  int m = 2;
  int d = 2;
  Rat delta0 = Rat(1, 20);
  Rat theta = Rat(17, 20);
  std::vector<Int> qs;
  int b_count = 1;  // seeded numerator draws per q
  uint64_t seed = 0;
  Region region;
  int threads = 1;

  void validate() const;
};

std::vector<ExperimentRecord> t2_experiment(const T2Config& cfg);

// Square-part divergence witness: with q = u*v^2 and d >= 2, every multiple
// n = k*u*v has n^d divisible by q, so all m-tuples drawn from those
// multiples land at scaled difference zero. That makes
// M(M-1)...(M-m+1)/N with M = floor(N/(u*v)) an unconditional lower bound
// for the correlation count whenever 0 is interior to the region.
struct DivergenceConfig {
  Int u = 1, v = 1, q = 1;  // q = u * v^2, u squarefree
  Int b = 1;
  int d = 2;
  int m = 2;
  Int N = 1;
  Rat eta = Rat(11, 10);  // requires log N / log q > eta > 1
  Region region;

  void validate() const;
};

struct DivergenceOutcome {
  Rat R;
  Rat bound;
  bool pass = false;  // R >= bound
};

DivergenceOutcome divergence_lower_bound(const DivergenceConfig& cfg);

// The same lower bound evaluated on a ladder rung without running the
// counting kernel: N = floor(q_j^eta), M = floor(N/(u_j v_j)). On square-rich
// ladders this grows without bound along j once m is large enough.
struct LadderBound {
  Int q, N, M;
  Rat bound;
};

LadderBound ladder_divergence_bound(const ApproximantLadder& ladder, size_t j, int m,
                                    const Rat& eta);

// Sample sizes N_j = floor(q_j^(1 - 1/(4k))), where the order k active at
// rung j is the largest k whose threshold j_k is <= j (rungs before every
// threshold use the smallest configured k). Every threshold order must carry
// a delta entry; thresholds must be nondecreasing in k.
std::vector<Int> schedule_Nj(const ApproximantLadder& ladder, const std::map<long, Rat>& k_to_delta,
                             const std::map<long, size_t>& j_thresholds);

enum class Condition3 { holds, fails, undetermined };

std::string condition3_name(Condition3 c);

struct Verdict {
  std::vector<double> ratios;  // squarefree log-ratio per in-budget rung
  Condition3 classification = Condition3::undetermined;
  std::vector<ExperimentRecord> traces;  // pair-correlation evidence per d
};

// Reads the squarefree log-ratios of the rungs with q_j <= budget and turns
// the deepest one into a verdict: >= 9/10 holds, <= 3/5 fails, otherwise
// undetermined (also the verdict when the budget excludes every rung). The
// correlation traces (m = 2, region [-1,1], N_j from the default schedule)
// are attached as evidence only: the verdict is a pure function of the ratio
// sequence, so it cannot depend on d_list.
Verdict classify_alpha(const ApproximantLadder& ladder, const std::vector<int>& d_list,
                       const Int& budget);

}  // namespace ndcorr
