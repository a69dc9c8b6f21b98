#include "ndcorr/analysis.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <exception>
#include <random>
#include <stdexcept>
#include <thread>

namespace ndcorr {

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// floor(base^(num/den)) for a rational exponent num/den in lowest terms
Int rational_power_floor(const Int& base, const Rat& expo) {
  unsigned long num = expo.get_num().get_ui();
  unsigned long den = expo.get_den().get_ui();
  return root_floor(pow_ui(base, num), den);
}

std::string double_repr(double v) { return nlohmann::json(v).dump(); }

// exact check of log(n) / log(base) > expo for rational expo = p/r:
// n^r > base^p
bool log_ratio_above(const Int& n, const Int& base, const Rat& expo) {
  return pow_ui(n, expo.get_den().get_ui()) > pow_ui(base, expo.get_num().get_ui());
}

bool zero_interior(const Region& region) {
  for (const Box& b : region.boxes) {
    bool inside = true;
    for (size_t i = 0; i < b.lo.size() && inside; ++i) inside = b.lo[i] < 0 && 0 < b.hi[i];
    if (inside) return true;
  }
  return false;
}

Rat falling_factorial_over(const Int& M, int m, const Int& N) {
  if (M < m) return Rat(0);
  Int f(1);
  for (int i = 0; i < m; ++i) f *= M - i;
  Rat out(f, N);
  out.canonicalize();
  return out;
}

SquareDecomposition rung_decomposition(const LadderEntry& e) {
  return e.square ? *e.square : square_decomposition(e.q);
}

constexpr double kHoldsThreshold = 0.9;  // ratios land at 1 or near it
constexpr double kFailsThreshold = 0.6;  // square-rich ratios stay near 1/3

}  // namespace

std::string record_json(const ExperimentRecord& r) {
  nlohmann::ordered_json j;
  j["kind"] = r.kind;
  j["m"] = r.m;
  j["d"] = r.d;
  j["q"] = r.q.get_str();
  j["b"] = r.b.get_str();
  j["N"] = r.N.get_str();
  j["region"] = r.region;
  j["value"] = rat_str(r.value);
  j["reference"] = rat_str(r.reference);
  j["deviation"] = r.deviation;
  j["seed"] = r.seed;
  j["wall_ms"] = r.wall_ms;
  return j.dump();
}

std::string record_csv_header() {
  return "kind,m,d,q,b,N,region,value,reference,deviation,seed,wall_ms";
}

std::string record_csv(const ExperimentRecord& r) {
  std::string line = r.kind;
  line += ',' + std::to_string(r.m) + ',' + std::to_string(r.d);
  line += ',' + r.q.get_str() + ',' + r.b.get_str() + ',' + r.N.get_str();
  line += ",\"" + r.region + '"';  // regions contain commas
  line += ',' + rat_str(r.value) + ',' + rat_str(r.reference);
  line += ',' + double_repr(r.deviation);
  line += ',' + std::to_string(r.seed);
  line += ',' + double_repr(r.wall_ms);
  return line;
}

void T2Config::validate() const {
  if (m < 2) throw std::invalid_argument("m out of range");
  if (d < 1) throw std::invalid_argument("d out of range");
  if (b_count < 1) throw std::invalid_argument("b_count out of range");
  if (threads < 1) throw std::invalid_argument("threads out of range");
  if (qs.empty()) throw std::invalid_argument("empty modulus list");
  Rat quarter(1, 4 * m);
  if (!(delta0 > 0 && delta0 < quarter)) throw std::invalid_argument("delta0 out of range");
  Rat lo = Rat(1) - Rat(1, 2 * m) + delta0;
  Rat hi = Rat(1) - delta0;
  if (!(theta > lo && theta < hi)) throw std::invalid_argument("theta outside window");
  if (region.dim != m - 1) throw std::invalid_argument("region dimension mismatch");
  region.validate();
  // squarefree-ratio gate: log u / log q >= 1 - delta0, checked exactly as
  // u^r >= q^(r-p) for delta0 = p/r
  unsigned long p = delta0.get_num().get_ui();
  unsigned long r = delta0.get_den().get_ui();
  for (const Int& q : qs) {
    if (q < 3) throw std::invalid_argument("modulus out of range");
    SquareDecomposition sq = square_decomposition(q);
    if (pow_ui(sq.u, r) < pow_ui(q, r - p))
      throw std::invalid_argument("squarefree ratio gate failed");
  }
}

std::vector<ExperimentRecord> t2_experiment(const T2Config& cfg) {
  cfg.validate();
  Rat vol = cfg.region.volume();
  std::string region_str = cfg.region.to_string();

  struct Item {
    Int q, b, N;
  };
  std::vector<Item> items;
  for (const Int& q : cfg.qs) {
    // per-modulus engine, so the sweep parallelizes without reordering draws
    std::mt19937_64 rng(cfg.seed ^ (0x9E3779B97F4A7C15ULL * mpz_get_ui(q.get_mpz_t())));
    Int N = rational_power_floor(q, cfg.theta);
    for (int i = 0; i < cfg.b_count; ++i) {
      Int b;
      do {
        b = uniform_int(rng, Int(1), q - 1);
      } while (gcd(b, q) != 1);
      items.push_back(Item{q, b, N});
    }
  }

  std::vector<ExperimentRecord> records(items.size());
  auto run_item = [&](size_t i) {
    double t0 = now_ms();
    CorrelationRequest req;
    req.m = cfg.m;
    req.d = cfg.d;
    req.source = SeqDescriptor{cfg.d, Convergent{items[i].b, items[i].q}, nullptr};
    req.N = items[i].N;
    req.region = cfg.region;
    CorrelationResult res = correlation(req);
    ExperimentRecord& r = records[i];
    r.kind = "t2";
    r.m = cfg.m;
    r.d = cfg.d;
    r.q = items[i].q;
    r.b = items[i].b;
    r.N = items[i].N;
    r.region = region_str;
    r.value = res.value;
    r.reference = vol;
    r.deviation = rat_abs(res.value - vol).get_d();
    r.seed = cfg.seed;
    r.wall_ms = now_ms() - t0;
  };

  if (cfg.threads == 1) {
    for (size_t i = 0; i < items.size(); ++i) run_item(i);
  } else {
    size_t workers = std::min<size_t>(cfg.threads, std::max<size_t>(items.size(), 1));
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (size_t i = w; i < items.size(); i += workers) run_item(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::stable_sort(records.begin(), records.end(),
                   [](const ExperimentRecord& a, const ExperimentRecord& b) {
                     if (a.q != b.q) return a.q < b.q;
                     if (a.b != b.b) return a.b < b.b;
                     return a.N < b.N;
                   });
  return records;
}

void DivergenceConfig::validate() const {
  if (m < 2) throw std::invalid_argument("m out of range");
  if (d < 2) throw std::invalid_argument("d out of range");
  if (u < 1 || v < 1 || q != u * v * v) throw std::invalid_argument("square split mismatch");
  if (square_decomposition(u).v != 1) throw std::invalid_argument("u not squarefree");
  if (gcd(b, q) != 1) throw std::invalid_argument("b not invertible");
  if (N < 1) throw std::invalid_argument("N out of range");
  if (!(eta > 1)) throw std::invalid_argument("eta out of range");
  if (!log_ratio_above(N, q, eta)) throw std::invalid_argument("N below eta threshold");
  if (region.dim != m - 1) throw std::invalid_argument("region dimension mismatch");
  region.validate();
  if (!zero_interior(region)) throw std::domain_error("bound vacuous");
}

DivergenceOutcome divergence_lower_bound(const DivergenceConfig& cfg) {
  cfg.validate();
  Int M = cfg.N / (cfg.u * cfg.v);
  DivergenceOutcome out;
  out.bound = falling_factorial_over(M, cfg.m, cfg.N);
  CorrelationRequest req;
  req.m = cfg.m;
  req.d = cfg.d;
  req.source = SeqDescriptor{cfg.d, Convergent{cfg.b, cfg.q}, nullptr};
  req.N = cfg.N;
  req.region = cfg.region;
  out.R = correlation(req).value;
  out.pass = out.R >= out.bound;
  return out;
}

LadderBound ladder_divergence_bound(const ApproximantLadder& ladder, size_t j, int m,
                                    const Rat& eta) {
  if (m < 2) throw std::invalid_argument("m out of range");
  if (!(eta > 1)) throw std::invalid_argument("eta out of range");
  const LadderEntry& e = ladder.entry(j);
  SquareDecomposition sq = rung_decomposition(e);
  LadderBound out;
  out.q = e.q;
  out.N = rational_power_floor(e.q, eta);
  out.M = out.N / (sq.u * sq.v);
  out.bound = falling_factorial_over(out.M, m, out.N);
  return out;
}

std::vector<Int> schedule_Nj(const ApproximantLadder& ladder, const std::map<long, Rat>& k_to_delta,
                             const std::map<long, size_t>& j_thresholds) {
  if (j_thresholds.empty()) throw std::invalid_argument("empty threshold map");
  size_t prev = 0;
  bool first = true;
  for (const auto& [k, jk] : j_thresholds) {
    if (k < 1) throw std::invalid_argument("order out of range");
    if (k_to_delta.find(k) == k_to_delta.end())
      throw std::invalid_argument("threshold order missing delta");
    if (!first && jk < prev) throw std::invalid_argument("thresholds not nondecreasing");
    prev = jk;
    first = false;
  }
  for (const auto& [k, delta] : k_to_delta)
    if (!(delta > 0)) throw std::invalid_argument("delta out of range");

  std::vector<Int> out;
  for (size_t j = 0; j < ladder.size(); ++j) {
    long k = j_thresholds.begin()->first;  // rungs before every threshold
    for (const auto& [kk, jk] : j_thresholds)
      if (jk <= j) k = kk;
    out.push_back(rational_power_floor(ladder.entry(j).q, Rat(4 * k - 1, 4 * k)));
  }
  return out;
}

std::string condition3_name(Condition3 c) {
  switch (c) {
    case Condition3::holds:
      return "condition3_holds";
    case Condition3::fails:
      return "condition3_fails";
    default:
      return "undetermined";
  }
}

Verdict classify_alpha(const ApproximantLadder& ladder, const std::vector<int>& d_list,
                       const Int& budget) {
  if (!ladder.certified()) throw std::domain_error("no tail certificate");
  for (int d : d_list)
    if (d < 1) throw std::invalid_argument("d out of range");

  std::vector<size_t> in_budget;
  for (size_t j = 0; j < ladder.size(); ++j)
    if (ladder.entry(j).q <= budget) in_budget.push_back(j);

  Verdict out;
  if (in_budget.empty()) return out;  // undetermined: no rung to read

  for (size_t j : in_budget) out.ratios.push_back(diophantine_ratio(ladder, j));
  double deepest = out.ratios.back();
  out.classification = deepest >= kHoldsThreshold ? Condition3::holds
                       : deepest <= kFailsThreshold ? Condition3::fails
                                                    : Condition3::undetermined;

  // default schedule: delta(k) = 1/(200k), j_k = first in-budget rung whose
  // ratio reaches 1 - delta(k); a ladder that never gets close to ratio 1
  // falls back to the uniform order-2 schedule
  std::map<long, Rat> k_to_delta;
  std::map<long, size_t> j_thresholds;
  for (long k = 2; k <= 6; ++k) {
    double gate = 1.0 - 1.0 / (200.0 * static_cast<double>(k));
    for (size_t i = 0; i < in_budget.size(); ++i)
      if (out.ratios[i] >= gate) {
        k_to_delta[k] = Rat(1, 200 * k);
        j_thresholds[k] = in_budget[i];
        break;
      }
  }
  if (j_thresholds.empty()) {
    k_to_delta[2] = Rat(1, 400);
    j_thresholds[2] = 0;
  }
  std::vector<Int> Ns = schedule_Nj(ladder, k_to_delta, j_thresholds);

  Region trace_region = Region::symmetric_box(1, Rat(1));
  Rat vol = trace_region.volume();
  std::string region_str = trace_region.to_string();
  for (int d : d_list)
    for (size_t j : in_budget) {
      const LadderEntry& e = ladder.entry(j);
      if (Rat(Ns[j]) <= 2 * trace_region.width_bound()) continue;  // rung too small to count on
      double t0 = now_ms();
      CorrelationRequest req;
      req.m = 2;
      req.d = d;
      req.source = SeqDescriptor{d, Convergent{e.b, e.q}, nullptr};
      req.N = Ns[j];
      req.region = trace_region;
      CorrelationResult res = correlation(req);
      ExperimentRecord rec;
      rec.kind = "trace";
      rec.m = 2;
      rec.d = d;
      rec.q = e.q;
      rec.b = e.b;
      rec.N = Ns[j];
      rec.region = region_str;
      rec.value = res.value;
      rec.reference = vol;
      rec.deviation = rat_abs(res.value - vol).get_d();
      rec.seed = 0;
      rec.wall_ms = now_ms() - t0;
      out.traces.push_back(std::move(rec));
    }
  return out;
}

}  // namespace ndcorr
