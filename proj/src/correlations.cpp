#include "ndcorr/correlations.hpp"

#include "ndcorr/ffcurves.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace ndcorr {

namespace {

// Residue tables are materialized per call; this caps their memory, not the
// mathematical range of the operations.
constexpr unsigned long kKernelLimit = 10'000'000;
constexpr unsigned long kGapLimit = 1'000'000;
constexpr unsigned long long kBruteTupleLimit = 10'000'000;

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

uint64_t powmod_u64(uint64_t base, uint64_t e, uint64_t m) {
  uint64_t acc = 1 % m;
  base %= m;
  while (e) {
    if (e & 1) acc = mulmod_u64(acc, base, m);
    base = mulmod_u64(base, base, m);
    e >>= 1;
  }
  return acc;
}

Int int128_to_int(unsigned __int128 v) {
  Int out = static_cast<unsigned long>(v >> 64);
  out <<= 64;
  out += static_cast<unsigned long>(v);
  return out;
}

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

Rat Box::volume() const {
  Rat v(1);
  for (size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

void Region::validate() const {
  if (dim < 1) throw std::invalid_argument("region dimension out of range");
  for (const Box& b : boxes) {
    if (b.lo.size() != static_cast<size_t>(dim) || b.hi.size() != static_cast<size_t>(dim))
      throw std::invalid_argument("box dimension mismatch");
    for (int i = 0; i < dim; ++i)
      if (b.lo[i] > b.hi[i]) throw std::invalid_argument("box inverted");
  }
  for (size_t a = 0; a < boxes.size(); ++a)
    for (size_t b = a + 1; b < boxes.size(); ++b) {
      bool separated = false;
      for (int i = 0; i < dim && !separated; ++i)
        separated = boxes[a].hi[i] < boxes[b].lo[i] || boxes[b].hi[i] < boxes[a].lo[i];
      if (!separated) throw std::invalid_argument("boxes overlap");
    }
}

Rat Region::volume() const {
  Rat v(0);
  for (const Box& b : boxes) v += b.volume();
  return v;
}

Rat Region::width_bound() const {
  Rat w(0);
  for (const Box& b : boxes)
    for (int i = 0; i < dim; ++i) {
      Rat lo = rat_abs(b.lo[i]), hi = rat_abs(b.hi[i]);
      if (lo > w) w = lo;
      if (hi > w) w = hi;
    }
  return w;
}

bool Region::contains(const std::vector<Rat>& x) const {
  if (x.size() != static_cast<size_t>(dim)) throw std::invalid_argument("point dimension mismatch");
  for (const Box& b : boxes) {
    bool in = true;
    for (int i = 0; i < dim && in; ++i) in = b.lo[i] <= x[i] && x[i] <= b.hi[i];
    if (in) return true;
  }
  return false;
}

Region Region::inflated(const Rat& eps) const {
  Region out;
  out.dim = dim;
  for (const Box& b : boxes) {
    Box nb = b;
    for (int i = 0; i < dim; ++i) {
      nb.lo[i] -= eps;
      nb.hi[i] += eps;
    }
    out.boxes.push_back(std::move(nb));
  }
  out.validate();
  return out;
}

Region Region::deflated(const Rat& eps) const {
  Region out;
  out.dim = dim;
  for (const Box& b : boxes) {
    Box nb = b;
    bool alive = true;
    for (int i = 0; i < dim && alive; ++i) {
      nb.lo[i] += eps;
      nb.hi[i] -= eps;
      alive = nb.lo[i] <= nb.hi[i];
    }
    if (alive) out.boxes.push_back(std::move(nb));
  }
  out.validate();
  return out;
}

Region Region::negated() const {
  Region out;
  out.dim = dim;
  for (const Box& b : boxes) {
    Box nb;
    for (int i = 0; i < dim; ++i) {
      nb.lo.push_back(-b.hi[i]);
      nb.hi.push_back(-b.lo[i]);
    }
    out.boxes.push_back(std::move(nb));
  }
  out.validate();
  return out;
}

Region Region::parse(int dim, const std::string& text) {
  Region out;
  out.dim = dim;
  if (!text.empty()) {
    std::stringstream boxes_in(text);
    std::string box_tok;
    while (std::getline(boxes_in, box_tok, ';')) {
      std::vector<Rat> vals;
      std::stringstream vals_in(box_tok);
      std::string val_tok;
      while (std::getline(vals_in, val_tok, ',')) vals.push_back(parse_rational(val_tok));
      if (vals.size() != 2 * static_cast<size_t>(dim))
        throw std::invalid_argument("region parse error");
      Box b;
      for (int i = 0; i < dim; ++i) {
        b.lo.push_back(vals[2 * i]);
        b.hi.push_back(vals[2 * i + 1]);
      }
      out.boxes.push_back(std::move(b));
    }
  }
  out.validate();
  return out;
}

std::string Region::to_string() const {
  std::string s;
  for (size_t bi = 0; bi < boxes.size(); ++bi) {
    if (bi) s += ';';
    for (int i = 0; i < dim; ++i) {
      if (i) s += ',';
      s += rat_str(boxes[bi].lo[i]) + ',' + rat_str(boxes[bi].hi[i]);
    }
  }
  return s;
}

Region Region::symmetric_box(int dim, const Rat& w) {
  Box b;
  for (int i = 0; i < dim; ++i) {
    b.lo.push_back(-w);
    b.hi.push_back(w);
  }
  Region out;
  out.dim = dim;
  out.boxes.push_back(std::move(b));
  out.validate();
  return out;
}

Region Region::single_box(std::vector<Rat> lo, std::vector<Rat> hi) {
  if (lo.empty() || lo.size() != hi.size()) throw std::invalid_argument("box dimension mismatch");
  Region out;
  out.dim = static_cast<int>(lo.size());
  out.boxes.push_back(Box{std::move(lo), std::move(hi)});
  out.validate();
  return out;
}

void CorrelationRequest::validate() const {
  if (m < 2) throw std::invalid_argument("m out of range");
  if (d < 1) throw std::invalid_argument("d out of range");
  if (N < 1) throw std::invalid_argument("N out of range");
  bool has_rat = source.rational.has_value();
  bool has_lad = source.ladder != nullptr;
  if (has_rat == has_lad) throw std::invalid_argument("source must be rational or ladder");
  if (source.d != d) throw std::invalid_argument("source degree mismatch");
  if (has_rat && source.rational->q < 1) throw std::invalid_argument("modulus out of range");
  if (region.dim != m - 1) throw std::invalid_argument("region dimension mismatch");
  region.validate();
}

namespace {

void require_no_wrap(const Region& region, const Int& N) {
  // The reduction of each difference to (-1/2, 1/2] is injective on the
  // region only when the region sits strictly inside (-N/2, N/2)^dim.
  if (Rat(N) <= 2 * region.width_bound()) throw std::domain_error("wrap ambiguity");
}

struct ResiduePoints {
  uint64_t q = 1;
  std::vector<uint64_t> res;  // res[i] = b * (i+1)^d mod q
};

ResiduePoints residue_points(const Convergent& conv, int d, const Int& N, unsigned long limit) {
  if (N > static_cast<long>(limit)) throw std::domain_error("sequence too long for kernel");
  if (!conv.q.fits_ulong_p()) throw std::domain_error("modulus too large for kernel");
  ResiduePoints out;
  out.q = conv.q.get_ui();
  uint64_t b = mpz_fdiv_ui(conv.p.get_mpz_t(), out.q);
  size_t n = N.get_ui();
  out.res.resize(n);
  for (size_t i = 1; i <= n; ++i)
    out.res[i - 1] = mulmod_u64(b, powmod_u64(i % out.q, static_cast<uint64_t>(d), out.q), out.q);
  return out;
}

// Integer bounds [L, H] for one region coordinate: the reduced difference
// delta (an integer residue representative in (-q/2, q/2]) contributes iff
// N*delta/q lies in [lo, hi], i.e. delta in [ceil(lo*q/N), floor(hi*q/N)].
struct CoordArc {
  long long L = 0, H = -1;
  bool empty() const { return H < L; }
  bool covers_zero() const { return L <= 0 && 0 <= H; }
};

CoordArc coord_arc(const Rat& lo, const Rat& hi, uint64_t q, const Int& N) {
  Rat scale = Rat(Int(q)) / Rat(N);
  Int L = rat_ceil(lo * scale), H = rat_floor(hi * scale);
  Int minrep = -Int((q - 1) / 2), maxrep = Int(q / 2);
  if (L < minrep) L = minrep;
  if (H > maxrep) H = maxrep;
  CoordArc arc;
  if (L <= H) {
    arc.L = L.get_si();
    arc.H = H.get_si();
  }
  return arc;
}

size_t count_in_arc(const std::vector<uint64_t>& sorted, uint64_t a, uint64_t b) {
  if (a <= b)
    return std::upper_bound(sorted.begin(), sorted.end(), b) -
           std::lower_bound(sorted.begin(), sorted.end(), a);
  return (sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), a)) +
         (std::upper_bound(sorted.begin(), sorted.end(), b) - sorted.begin());
}

uint64_t arc_start(uint64_t v, long long bound, uint64_t q) {
  long long r = (static_cast<long long>(v) - bound) % static_cast<long long>(q);
  if (r < 0) r += static_cast<long long>(q);
  return static_cast<uint64_t>(r);
}

Int pair_kernel(const ResiduePoints& pts, const Region& region, const Int& N) {
  std::vector<uint64_t> sorted(pts.res);
  std::sort(sorted.begin(), sorted.end());
  unsigned __int128 total = 0;
  for (const Box& box : region.boxes) {
    CoordArc arc = coord_arc(box.lo[0], box.hi[0], pts.q, N);
    if (arc.empty()) continue;
    for (uint64_t v : pts.res) {
      uint64_t a = arc_start(v, arc.H, pts.q);
      uint64_t b = arc_start(v, arc.L, pts.q);
      total += count_in_arc(sorted, a, b);
    }
    if (arc.covers_zero()) total -= pts.res.size();  // drop each self pair
  }
  return int128_to_int(total);
}

// Depth-first tuple walk for m >= 3: residues sorted once, every next tuple
// element looked up as a circular residue arc, index distinctness enforced
// along the path.  Expected work per root is (arc density)^(m-1).
struct TupleWalker {
  const std::vector<std::pair<uint64_t, uint32_t>>& pts;  // sorted by residue
  uint64_t q;
  int m;
  const std::vector<CoordArc>& arcs;
  std::vector<uint32_t> used;
  unsigned __int128 total = 0;

  void roots(const std::vector<uint64_t>& res) {
    used.clear();
    for (uint32_t i = 0; i < res.size(); ++i) {
      used.push_back(i);
      walk(1, res[i]);
      used.pop_back();
    }
  }

  void walk(int chosen, uint64_t v) {
    const CoordArc& arc = arcs[chosen - 1];
    uint64_t a = arc_start(v, arc.H, q);
    uint64_t b = arc_start(v, arc.L, q);
    if (a <= b) {
      span(chosen, a, b);
    } else {
      span(chosen, a, q - 1);
      span(chosen, 0, b);
    }
  }

  void span(int chosen, uint64_t a, uint64_t b) {
    auto first = std::lower_bound(pts.begin(), pts.end(), std::make_pair(a, uint32_t{0}));
    auto last = std::upper_bound(pts.begin(), pts.end(), std::make_pair(b, UINT32_MAX));
    for (auto it = first; it != last; ++it) {
      if (std::find(used.begin(), used.end(), it->second) != used.end()) continue;
      if (chosen + 1 == m) {
        ++total;
        continue;
      }
      used.push_back(it->second);
      walk(chosen + 1, it->first);
      used.pop_back();
    }
  }
};

Int dfs_kernel(const ResiduePoints& pts, const Region& region, const Int& N, int m) {
  std::vector<std::pair<uint64_t, uint32_t>> sorted;
  sorted.reserve(pts.res.size());
  for (uint32_t i = 0; i < pts.res.size(); ++i) sorted.emplace_back(pts.res[i], i);
  std::sort(sorted.begin(), sorted.end());
  unsigned __int128 total = 0;
  for (const Box& box : region.boxes) {
    std::vector<CoordArc> arcs;
    bool empty = false;
    for (int i = 0; i < m - 1; ++i) {
      arcs.push_back(coord_arc(box.lo[i], box.hi[i], pts.q, N));
      empty = empty || arcs.back().empty();
    }
    if (empty) continue;
    TupleWalker walker{sorted, pts.q, m, arcs, {}, 0};
    walker.roots(pts.res);
    total += walker.total;
  }
  return int128_to_int(total);
}

Rat count_to_value(const Int& count, const Int& N) {
  Rat v(count, N);
  v.canonicalize();
  return v;
}

}  // namespace

CorrelationResult correlation(const CorrelationRequest& req) {
  req.validate();
  require_no_wrap(req.region, req.N);
  double t0 = now_ms();
  CorrelationResult out;
  if (req.source.ladder) {
    if (!req.source.ladder->certified()) throw std::domain_error("no tail certificate");
    auto [lower, upper] = correlation_sandwich(req);
    if (lower != upper) throw std::domain_error("sandwich too wide");
    out.value = lower;
    Rat count = lower * Rat(req.N);
    out.tuple_count = count.get_num();  // denominator is 1: value = count/N
    out.method = "ladder-sandwich";
  } else {
    ResiduePoints pts = residue_points(*req.source.rational, req.d, req.N, kKernelLimit);
    Int count = req.m == 2 ? pair_kernel(pts, req.region, req.N)
                           : dfs_kernel(pts, req.region, req.N, req.m);
    out.value = count_to_value(count, req.N);
    out.tuple_count = std::move(count);
    out.method = req.m == 2 ? "pair-kernel" : "chain-kernel";
  }
  out.wall_ms = now_ms() - t0;
  return out;
}

CorrelationResult correlation_brute(const CorrelationRequest& req) {
  req.validate();
  require_no_wrap(req.region, req.N);
  if (!req.source.rational) throw std::invalid_argument("oracle needs a rational source");
  Int budget = pow_ui(req.N, static_cast<unsigned long>(req.m));
  if (budget > static_cast<long>(kBruteTupleLimit))
    throw std::domain_error("instance too large for oracle");
  double t0 = now_ms();
  ResiduePoints pts = residue_points(*req.source.rational, req.d, req.N, kKernelLimit);
  const long long q = static_cast<long long>(pts.q);
  size_t n = pts.res.size();
  std::vector<size_t> idx(req.m, 0);
  Int count(0);
  Rat nq(req.N, Int(pts.q));
  nq.canonicalize();
  while (true) {
    bool distinct = true;
    for (int i = 0; i < req.m && distinct; ++i)
      for (int j = i + 1; j < req.m && distinct; ++j) distinct = idx[i] != idx[j];
    if (distinct) {
      std::vector<Rat> diffs;
      for (int i = 0; i + 1 < req.m; ++i) {
        long long delta =
            (static_cast<long long>(pts.res[idx[i]]) - static_cast<long long>(pts.res[idx[i + 1]])) % q;
        if (delta < 0) delta += q;
        if (2 * delta > q) delta -= q;  // representative in (-q/2, q/2]
        diffs.push_back(Rat(static_cast<long>(delta)) * nq);
      }
      if (req.region.contains(diffs)) ++count;
    }
    int pos = req.m - 1;
    while (pos >= 0 && idx[pos] + 1 == n) idx[pos--] = 0;
    if (pos < 0) break;
    ++idx[pos];
  }
  CorrelationResult out;
  out.value = count_to_value(count, req.N);
  out.tuple_count = std::move(count);
  out.method = "brute";
  out.wall_ms = now_ms() - t0;
  return out;
}

std::pair<Rat, Rat> correlation_sandwich(const CorrelationRequest& req) {
  req.validate();
  require_no_wrap(req.region, req.N);
  if (!req.source.ladder) throw std::invalid_argument("sandwich needs a ladder source");
  const ApproximantLadder& ladder = *req.source.ladder;
  if (!ladder.certified()) throw std::domain_error("no tail certificate");
  const LadderEntry& deep = ladder.entries().back();
  SeqDescriptor on_rung{req.d, Convergent{deep.b, deep.q}, nullptr};
  // Every scaled difference of the limit sits within eps of the same
  // difference on the deepest rung, so counting over the deflated and
  // inflated regions brackets the true count.
  Rat eps = scaled_distance(on_rung, req.source, req.N);
  if (req.region.boxes.empty()) return {Rat(0), Rat(0)};
  for (const Box& box : req.region.boxes)
    for (int i = 0; i < req.region.dim; ++i)
      if (2 * eps >= box.hi[i] - box.lo[i]) throw std::domain_error("sandwich too wide");
  for (size_t a = 0; a < req.region.boxes.size(); ++a)
    for (size_t b = a + 1; b < req.region.boxes.size(); ++b) {
      bool separated = false;
      for (int i = 0; i < req.region.dim && !separated; ++i) {
        const Box& A = req.region.boxes[a];
        const Box& B = req.region.boxes[b];
        separated = B.lo[i] - A.hi[i] > 2 * eps || A.lo[i] - B.hi[i] > 2 * eps;
      }
      if (!separated) throw std::domain_error("sandwich too wide");  // inflation would merge boxes
    }
  CorrelationRequest inner = req;
  inner.source = on_rung;
  inner.region = req.region.deflated(eps);
  Rat lower = correlation(inner).value;
  inner.region = req.region.inflated(eps);
  Rat upper = correlation(inner).value;
  return {lower, upper};
}

std::pair<Rat, Rat> star_sum_identity(int m, int d, const Int& b, const Int& q, const Int& N,
                                      const Region& region) {
  if (m < 2) throw std::invalid_argument("m out of range");
  if (d < 1) throw std::invalid_argument("d out of range");
  if (q < 2) throw std::invalid_argument("modulus out of range");
  if (N < 1) throw std::invalid_argument("N out of range");
  if (q > 200 || N > 60) throw std::domain_error("instance too large for identity");

  CorrelationRequest req;
  req.m = m;
  req.d = d;
  req.source = SeqDescriptor{d, Convergent{b, q}, nullptr};
  req.N = N;
  req.region = region;
  Rat lhs(correlation(req).tuple_count);  // N * R^(m)

  const uint64_t qq = q.get_ui();
  const uint64_t nn = N.get_ui();
  std::vector<uint64_t> cnt(qq, 0);  // cnt[u] = #{x <= N : b x^d = u mod q}
  uint64_t bred = mpz_fdiv_ui(b.get_mpz_t(), qq);
  for (uint64_t x = 1; x <= nn; ++x)
    ++cnt[mulmod_u64(bred, powmod_u64(x % qq, static_cast<uint64_t>(d), qq), qq)];

  Rat dilate = Rat(q) / Rat(N);
  unsigned __int128 rhs = 0;
  for (const Box& box : region.boxes) {
    std::vector<long> lo(m - 1), hi(m - 1);
    bool empty = false;
    for (int i = 0; i < m - 1; ++i) {
      lo[i] = rat_ceil(dilate * box.lo[i]).get_si();
      hi[i] = rat_floor(dilate * box.hi[i]).get_si();
      empty = empty || lo[i] > hi[i];
    }
    if (empty) continue;
    std::vector<long> a(lo);
    while (true) {
      // suffix sums A_i = a_i + ... + a_{m-1}, with A_m = 0 appended; the
      // star condition is that all of them are pairwise distinct
      std::vector<long> suffix(m, 0);
      for (int i = m - 2; i >= 0; --i) suffix[i] = suffix[i + 1] + a[i];
      std::vector<long> sorted_suffix(suffix);
      std::sort(sorted_suffix.begin(), sorted_suffix.end());
      bool star = std::adjacent_find(sorted_suffix.begin(), sorted_suffix.end()) ==
                  sorted_suffix.end();
      if (star) {
        std::vector<uint64_t> shift(m);
        for (int i = 0; i < m; ++i) {
          long r = suffix[i] % static_cast<long>(qq);
          if (r < 0) r += static_cast<long>(qq);
          shift[i] = static_cast<uint64_t>(r);
        }
        unsigned __int128 nu = 0;
        for (uint64_t t = 0; t < qq; ++t) {
          unsigned __int128 prod = 1;
          for (int i = 0; i < m && prod; ++i) {
            uint64_t u = t + shift[i];
            if (u >= qq) u -= qq;
            prod *= cnt[u];
          }
          nu += prod;
        }
        rhs += nu;
      }
      int pos = m - 2;
      while (pos >= 0 && a[pos] == hi[pos]) {
        a[pos] = lo[pos];
        --pos;
      }
      if (pos < 0) break;
      ++a[pos];
    }
  }
  return {lhs, Rat(int128_to_int(rhs))};
}

FourierCheck fourier_identity_check(int d, const Int& b, const Int& q, const Int& N,
                                    const Region& region) {
  if (d < 2) throw std::invalid_argument("d out of range");  // the character sums need d >= 2
  if (q < 2) throw std::invalid_argument("modulus out of range");
  if (N < 1) throw std::invalid_argument("N out of range");
  if (q > 13 || N > 6) throw std::domain_error("instance too large for identity");
  if (N >= q) throw std::invalid_argument("identity needs N below q");

  CorrelationRequest req;
  req.m = 2;
  req.d = d;
  req.source = SeqDescriptor{d, Convergent{b, q}, nullptr};
  req.N = N;
  req.region = region;
  FourierCheck out;
  out.lhs = correlation(req).value;

  const uint64_t qq = q.get_ui();
  const uint64_t nn = N.get_ui();
  const double tau = 8.0 * std::atan(1.0);
  // window transform G(r) = sum_{x=1..N} e(r x / q)
  std::vector<std::complex<double>> G(qq);
  for (uint64_t r = 0; r < qq; ++r) {
    std::complex<double> g = 0;
    for (uint64_t x = 1; x <= nn; ++x)
      g += std::polar(1.0, tau * static_cast<double>(r) * static_cast<double>(x) /
                               static_cast<double>(qq));
    G[r] = g;
  }

  Rat dilate = Rat(q) / Rat(N);
  std::complex<double> acc = 0;
  for (const Box& box : region.boxes) {
    long lo = rat_ceil(dilate * box.lo[0]).get_si();
    long hi = rat_floor(dilate * box.hi[0]).get_si();
    for (long a = lo; a <= hi; ++a) {
      if (a == 0) continue;  // the star condition for m = 2
      long r = a % static_cast<long>(qq);
      if (r < 0) r += static_cast<long>(qq);
      CurveSpec spec;
      spec.m = 2;
      spec.d = d;
      spec.q = q;
      spec.b = b;
      spec.a = {Int(r)};
      for (uint64_t r1 = 0; r1 < qq; ++r1)
        for (uint64_t r2 = 0; r2 < qq; ++r2)
          acc += curve_exponential_sum(spec, {Int(r1), Int(r2)}) * G[r1] * G[r2];
    }
  }
  out.rhs = acc.real() / (static_cast<double>(nn) * static_cast<double>(qq) *
                          static_cast<double>(qq));
  out.diff = std::abs(out.lhs.get_d() - out.rhs);
  return out;
}

GapSummary consecutive_gaps(int d, const SeqDescriptor& source, const Int& N) {
  if (d < 1) throw std::invalid_argument("d out of range");
  if (source.d != d) throw std::invalid_argument("source degree mismatch");
  if (N < 1) throw std::invalid_argument("N out of range");
  if (N > static_cast<long>(kGapLimit)) throw std::domain_error("enumeration too large");
  bool has_rat = source.rational.has_value();
  bool has_lad = source.ladder != nullptr;
  if (has_rat == has_lad) throw std::invalid_argument("source must be rational or ladder");
  Convergent conv;
  if (has_rat) {
    conv = *source.rational;
  } else {
    if (!source.ladder->certified()) throw std::domain_error("no tail certificate");
    const LadderEntry& deep = source.ladder->entries().back();
    conv = Convergent{deep.b, deep.q};
  }
  if (conv.q < 1) throw std::invalid_argument("modulus out of range");

  size_t n = N.get_ui();
  std::vector<std::pair<Rat, unsigned long>> pts;
  pts.reserve(n);
  Int e(d);
  for (unsigned long i = 1; i <= n; ++i) {
    Int t = conv.p * powmod(Int(i), e, conv.q);
    Int v;
    mpz_fdiv_r(v.get_mpz_t(), t.get_mpz_t(), conv.q.get_mpz_t());
    Rat x(v, conv.q);
    x.canonicalize();
    pts.emplace_back(std::move(x), i);
  }
  std::sort(pts.begin(), pts.end());
  for (size_t i = 0; i + 1 < pts.size(); ++i)
    if (pts[i].first == pts[i + 1].first)
      throw std::invalid_argument("duplicate points: n=" + std::to_string(pts[i].second) +
                                  " and n=" + std::to_string(pts[i + 1].second));

  GapSummary out;
  for (size_t i = 0; i + 1 < pts.size(); ++i) out.gaps.push_back(pts[i + 1].first - pts[i].first);
  out.gaps.push_back(Rat(1) - pts.back().first + pts.front().first);
  std::set<Rat> distinct(out.gaps.begin(), out.gaps.end());
  out.distinct_count = static_cast<int>(distinct.size());
  return out;
}

std::string correlation_json(const CorrelationRequest& req, const CorrelationResult& result) {
  nlohmann::ordered_json j;
  j["m"] = req.m;
  j["d"] = req.d;
  if (req.source.rational)
    j["source"] = req.source.rational->p.get_str() + "/" + req.source.rational->q.get_str();
  else
    j["source"] = "ladder:" + std::to_string(req.source.ladder->size() - 1);
  j["N"] = req.N.get_str();
  j["region"] = req.region.to_string();
  j["value"] = rat_str(result.value);
  j["tuple_count"] = result.tuple_count.get_str();
  j["method"] = result.method;
  return j.dump();
}

}  // namespace ndcorr
