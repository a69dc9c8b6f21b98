#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ndcorr/analysis.hpp"

using namespace ndcorr;

namespace {

T2Config small_t2() {
  T2Config cfg;
  cfg.m = 2;
  cfg.d = 2;
  cfg.delta0 = Rat(1, 20);
  cfg.theta = Rat(17, 20);
  cfg.qs = {Int(101), Int(103)};
  cfg.b_count = 3;
  cfg.seed = 42;
  cfg.region = Region::symmetric_box(1, Rat(1));
  return cfg;
}

bool same_modulo_wall(const ExperimentRecord& a, const ExperimentRecord& b) {
  return a.kind == b.kind && a.m == b.m && a.d == b.d && a.q == b.q && a.b == b.b && a.N == b.N &&
         a.region == b.region && a.value == b.value && a.reference == b.reference &&
         a.deviation == b.deviation && a.seed == b.seed;
}

}  // namespace

TEST_CASE("experiment record serialization") {
  ExperimentRecord r;
  r.kind = "demo";
  r.m = 2;
  r.d = 3;
  r.q = 7;
  r.b = 2;
  r.N = 5;
  r.region = "-1/1,1/1";
  r.value = Rat(4, 3);
  r.reference = Rat(2);
  r.deviation = 0.5;
  r.seed = 9;
  r.wall_ms = 1.5;
  CHECK(record_json(r) ==
        R"({"kind":"demo","m":2,"d":3,"q":"7","b":"2","N":"5","region":"-1/1,1/1","value":"4/3","reference":"2/1","deviation":0.5,"seed":9,"wall_ms":1.5})");
  CHECK(record_csv_header() == "kind,m,d,q,b,N,region,value,reference,deviation,seed,wall_ms");
  CHECK(record_csv(r) == R"(demo,2,3,7,2,5,"-1/1,1/1",4/3,2/1,0.5,9,1.5)");
}

TEST_CASE("t2 configuration window") {
  T2Config cfg = small_t2();
  CHECK_NOTHROW(cfg.validate());

  T2Config bad = cfg;
  bad.theta = Rat(3, 4);  // at the lower edge 1 - 1/4 + delta0 > 3/4
  CHECK_THROWS_WITH_AS(bad.validate(), "theta outside window", std::invalid_argument);
  bad.theta = Rat(19, 20);  // hits 1 - delta0 exactly
  CHECK_THROWS_WITH_AS(bad.validate(), "theta outside window", std::invalid_argument);

  bad = cfg;
  bad.delta0 = Rat(1, 8);  // not below 1/(4m) = 1/8
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.delta0 = Rat(0);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.qs.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.qs.push_back(Int(44100));  // 2^2 3^2 5^2 7^2: squarefree part is 1
  CHECK_THROWS_WITH_AS(bad.validate(), "squarefree ratio gate failed", std::invalid_argument);

  bad = cfg;
  bad.b_count = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.region = Region::symmetric_box(2, Rat(1));
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("t2 sweep is deterministic and sorted") {
  T2Config cfg = small_t2();
  std::vector<ExperimentRecord> run1 = t2_experiment(cfg);
  std::vector<ExperimentRecord> run2 = t2_experiment(cfg);
  REQUIRE(run1.size() == 6);
  REQUIRE(run2.size() == 6);
  for (size_t i = 0; i < run1.size(); ++i) CHECK(same_modulo_wall(run1[i], run2[i]));

  cfg.threads = 4;
  std::vector<ExperimentRecord> run4 = t2_experiment(cfg);
  REQUIRE(run4.size() == 6);
  for (size_t i = 0; i < run1.size(); ++i) CHECK(same_modulo_wall(run1[i], run4[i]));

  for (size_t i = 0; i + 1 < run1.size(); ++i) {
    bool ordered = run1[i].q < run1[i + 1].q ||
                   (run1[i].q == run1[i + 1].q && run1[i].b <= run1[i + 1].b);
    CHECK(ordered);
  }
  for (const ExperimentRecord& r : run1) {
    CHECK(r.kind == "t2");
    CHECK(r.seed == 42);
    CHECK(r.reference == Rat(2));
    CHECK(r.b >= 1);
    CHECK(r.b < r.q);
    CHECK(gcd(r.b, r.q) == 1);
    // N = floor(q^(17/20)) pinned by its defining inequalities
    CHECK(pow_ui(r.N, 20) <= pow_ui(r.q, 17));
    CHECK(pow_ui(r.N + 1, 20) > pow_ui(r.q, 17));
    CHECK(r.deviation == rat_abs(r.value - Rat(2)).get_d());
  }

  // a different seed draws different numerators somewhere in the sweep
  cfg = small_t2();
  cfg.seed = 43;
  std::vector<ExperimentRecord> other = t2_experiment(cfg);
  bool any_new_b = false;
  for (size_t i = 0; i < other.size(); ++i) any_new_b = any_new_b || other[i].b != run1[i].b;
  CHECK(any_new_b);
}

TEST_CASE("t2 exactness on a measure-zero region") {
  // q prime: N*delta/q = 1/3 would need 3*N*delta = q, impossible, so the
  // degenerate box at 1/3 catches nothing
  T2Config cfg;
  cfg.m = 2;
  cfg.d = 2;
  cfg.delta0 = Rat(1, 20);
  cfg.theta = Rat(17, 20);
  cfg.qs = {Int(10007)};
  cfg.b_count = 2;
  cfg.seed = 7;
  cfg.region = Region::single_box({Rat(1, 3)}, {Rat(1, 3)});
  for (const ExperimentRecord& r : t2_experiment(cfg)) {
    CHECK(r.value == Rat(0));
    CHECK(r.reference == Rat(0));
    CHECK(r.deviation == 0.0);
  }
}

TEST_CASE("divergence lower bound, hand instance") {
  DivergenceConfig cfg;
  cfg.u = 11;
  cfg.v = 2;
  cfg.q = 44;
  cfg.b = 1;
  cfg.d = 2;
  cfg.m = 2;
  cfg.N = 50;
  cfg.eta = Rat(101, 100);
  cfg.region = Region::symmetric_box(1, Rat(1));

  DivergenceOutcome out = divergence_lower_bound(cfg);
  CHECK(out.bound == Rat(1, 25));  // M = floor(50/22) = 2
  CHECK(out.pass);
  CHECK(out.R >= out.bound);

  // the witness pairs: 22^2 = 484 = 11*44 and 44^2 are both 0 mod 44
  CorrelationRequest req;
  req.m = 2;
  req.d = 2;
  req.source = SeqDescriptor{2, Convergent{Int(1), Int(44)}, nullptr};
  req.N = 50;
  req.region = cfg.region;
  CHECK(out.R == correlation_brute(req).value);

  DivergenceConfig bad = cfg;
  bad.region = Region::single_box({Rat(1, 4)}, {Rat(1)});
  CHECK_THROWS_WITH_AS(divergence_lower_bound(bad), "bound vacuous", std::domain_error);
  bad = cfg;
  bad.region = Region::single_box({Rat(0)}, {Rat(1)});  // 0 on the boundary is not interior
  CHECK_THROWS_WITH_AS(divergence_lower_bound(bad), "bound vacuous", std::domain_error);

  bad = cfg;
  bad.v = 3;
  CHECK_THROWS_AS(divergence_lower_bound(bad), std::invalid_argument);
  bad = cfg;
  bad.u = 4;
  bad.v = 1;
  bad.q = 4;
  CHECK_THROWS_WITH_AS(divergence_lower_bound(bad), "u not squarefree", std::invalid_argument);
  bad = cfg;
  bad.b = 22;
  CHECK_THROWS_AS(divergence_lower_bound(bad), std::invalid_argument);
  bad = cfg;
  bad.N = 44;
  CHECK_THROWS_WITH_AS(divergence_lower_bound(bad), "N below eta threshold",
                       std::invalid_argument);
  bad = cfg;
  bad.d = 1;
  CHECK_THROWS_AS(divergence_lower_bound(bad), std::invalid_argument);
  bad = cfg;
  bad.eta = Rat(1);
  CHECK_THROWS_AS(divergence_lower_bound(bad), std::invalid_argument);
}

TEST_CASE("divergence bound degenerates gracefully") {
  // v = 1 gives M = floor(N/q) below m: the bound is 0 and passes trivially
  DivergenceConfig cfg;
  cfg.u = 5;
  cfg.v = 1;
  cfg.q = 5;
  cfg.b = 1;
  cfg.d = 2;
  cfg.m = 2;
  cfg.N = 6;
  cfg.eta = Rat(101, 100);
  cfg.region = Region::symmetric_box(1, Rat(1));
  DivergenceOutcome out = divergence_lower_bound(cfg);
  CHECK(out.bound == Rat(0));
  CHECK(out.pass);
}

TEST_CASE("divergence on the large square-part modulus") {
  DivergenceConfig cfg;
  cfg.u = 11;
  cfg.v = 101;
  cfg.q = 112211;
  cfg.b = 1;
  cfg.d = 3;
  cfg.m = 2;
  cfg.N = root_floor(pow_ui(Int(112211), 11), 10);  // floor(q^1.1)
  cfg.eta = Rat(21, 20);
  cfg.region = Region::single_box({Rat(-1, 10)}, {Rat(1, 10)});
  DivergenceOutcome out = divergence_lower_bound(cfg);
  CHECK(out.pass);
  CHECK(out.R >= out.bound);
  CHECK(out.R >= 10 * cfg.region.volume());
}

TEST_CASE("ladder rung lower bounds grow on square-rich ladders") {
  ApproximantLadder lad = ApproximantLadder::build(Int(7), Int(1), {3, 4}, LadderMode::square_rich);
  REQUIRE(lad.size() == 3);

  LadderBound seed = ladder_divergence_bound(lad, 0, 8, Rat(11, 10));
  CHECK(seed.bound == Rat(0));  // q=7 is squarefree: M = 1 < m

  LadderBound first = ladder_divergence_bound(lad, 1, 8, Rat(11, 10));
  CHECK(first.q == 363);
  CHECK(first.N == 654);
  CHECK(first.M == 19);
  Rat expect(Int("3047466240"), Int(654));  // 19!/11! over N
  expect.canonicalize();
  CHECK(first.bound == expect);
  CHECK(first.bound > 20);  // far above 10 * vol([-1,1])
  // bound_j >= q_j^((delta/2)(m-1) - 1) with delta = 1/3, m = 8: exponent 1/6
  CHECK(rat_pow_int(first.bound, 6) >= Rat(first.q));

  LadderBound second = ladder_divergence_bound(lad, 2, 8, Rat(11, 10));
  CHECK(second.bound > first.bound);
  CHECK(rat_pow_int(second.bound, 6) >= Rat(second.q));

  CHECK_THROWS_AS(ladder_divergence_bound(lad, 9, 8, Rat(11, 10)), std::out_of_range);
  CHECK_THROWS_AS(ladder_divergence_bound(lad, 1, 1, Rat(11, 10)), std::invalid_argument);
  CHECK_THROWS_AS(ladder_divergence_bound(lad, 1, 8, Rat(1)), std::invalid_argument);
}

TEST_CASE("sample size schedule") {
  ApproximantLadder lad = ApproximantLadder::build(Int(2), Int(1), {3, 4}, LadderMode::raw);
  // rungs 2, 8, 4096
  std::map<long, Rat> deltas{{2, Rat(1, 400)}};
  std::map<long, size_t> thresholds{{2, 0}};
  std::vector<Int> Ns = schedule_Nj(lad, deltas, thresholds);
  REQUIRE(Ns.size() == 3);
  CHECK(Ns[0] == 1);
  CHECK(Ns[1] == 6);      // floor(8^(7/8))
  CHECK(Ns[2] == 1448);   // floor(4096^(7/8)) = floor(2^10.5)

  // an order switch at the last rung: 4096^(11/12) = 2^11 exactly
  deltas[3] = Rat(1, 600);
  thresholds[3] = 2;
  std::vector<Int> mixed = schedule_Nj(lad, deltas, thresholds);
  CHECK(mixed[0] == 1);
  CHECK(mixed[1] == 6);
  CHECK(mixed[2] == 2048);

  ApproximantLadder pow10 = ApproximantLadder::build(Int(2), Int(1), {10}, LadderMode::raw);
  REQUIRE(pow10.entry(1).q == 1024);
  CHECK(schedule_Nj(pow10, deltas, thresholds)[1] == 430);  // floor(2^8.75)

  CHECK_THROWS_WITH_AS(schedule_Nj(lad, deltas, {}), "empty threshold map",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(schedule_Nj(lad, deltas, {{2, 1}, {3, 0}}),
                       "thresholds not nondecreasing", std::invalid_argument);
  CHECK_THROWS_WITH_AS(schedule_Nj(lad, deltas, {{4, 0}}), "threshold order missing delta",
                       std::invalid_argument);
  CHECK_THROWS_AS(schedule_Nj(lad, {{0, Rat(1, 2)}}, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(schedule_Nj(lad, {{2, Rat(0)}}, {{2, 0}}), std::invalid_argument);
}

TEST_CASE("classification reads only the ratio sequence") {
  ApproximantLadder prime =
      ApproximantLadder::build(Int(2), Int(1), {3, 4}, LadderMode::prime_denominator);
  Verdict v1 = classify_alpha(prime, {2}, Int(20000));
  CHECK(v1.classification == Condition3::holds);
  CHECK(condition3_name(v1.classification) == "condition3_holds");
  REQUIRE(v1.ratios.size() == 3);
  for (double r : v1.ratios) CHECK(r == 1.0);
  // rung q=2 is too small to trace; the other two produce one record per d
  CHECK(v1.traces.size() == 2);
  for (const ExperimentRecord& t : v1.traces) {
    CHECK(t.kind == "trace");
    CHECK(t.m == 2);
    CHECK(t.reference == Rat(2));
  }

  Verdict v3 = classify_alpha(prime, {2, 3, 4}, Int(20000));
  CHECK(v3.classification == v1.classification);
  CHECK(v3.ratios == v1.ratios);
  CHECK(v3.traces.size() == 6);
  for (size_t i = 0; i < v1.traces.size(); ++i)
    CHECK(same_modulo_wall(v3.traces[i], v1.traces[i]));  // d=2 block comes first

  ApproximantLadder rich =
      ApproximantLadder::build(Int(7), Int(1), {3, 4}, LadderMode::square_rich);
  Verdict r1 = classify_alpha(rich, {2}, Int(20000));
  CHECK(r1.classification == Condition3::fails);
  REQUIRE(r1.ratios.size() == 2);  // the 1.7e10 rung is out of budget
  CHECK(r1.ratios[0] == 1.0);      // the prime seed rung
  CHECK(r1.ratios[1] == doctest::Approx(0.186382).epsilon(1e-4));
  CHECK(classify_alpha(rich, {2, 3, 4}, Int(20000)).classification == Condition3::fails);

  // raw powers drive the squarefree part down: 8 gives 1/3, 4096 gives 0
  ApproximantLadder raw = ApproximantLadder::build(Int(2), Int(1), {3, 4}, LadderMode::raw);
  Verdict rv = classify_alpha(raw, {2}, Int(5000));
  REQUIRE(rv.ratios.size() == 3);
  CHECK(rv.ratios[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(rv.ratios[2] == 0.0);
  CHECK(rv.classification == Condition3::fails);

  CHECK(classify_alpha(prime, {2}, Int(1)).classification == Condition3::undetermined);
  CHECK(classify_alpha(prime, {2}, Int(1)).traces.empty());

  Verdict narrow = classify_alpha(prime, {2}, Int(100));
  CHECK(narrow.classification == Condition3::holds);
  CHECK(narrow.ratios.size() == 2);
  CHECK(narrow.traces.size() == 1);

  std::vector<LadderEntry> prefix(prime.entries().begin(), prime.entries().begin() + 2);
  ApproximantLadder loose =
      ApproximantLadder::from_entries(LadderMode::prime_denominator, prefix, false);
  CHECK_THROWS_WITH_AS(classify_alpha(loose, {2}, Int(20000)), "no tail certificate",
                       std::domain_error);
  CHECK_THROWS_AS(classify_alpha(prime, {0}, Int(20000)), std::invalid_argument);
}
