// Python module over the main library operations. Exactness survives the
// boundary: fractions cross as `fractions.Fraction`, arbitrary-size integers
// as python ints, regions as the same "lo,hi[;lo,hi]" strings the CLI takes.
// Anything accepted where a fraction is expected is round-tripped through
// str(), so ints, Fractions, and "p/q" strings all work.

#include "ndcorr/analysis.hpp"
#include "ndcorr/ffcurves.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace ndcorr;

namespace {

Int to_int(py::handle h) { return Int(py::str(h).cast<std::string>(), 10); }

Rat to_rat(py::handle h) { return parse_rational(py::str(h).cast<std::string>()); }

py::object from_int(const Int& v) {
  return py::module_::import("builtins").attr("int")(v.get_str());
}

py::object from_rat(const Rat& r) {
  static py::object fraction = py::module_::import("fractions").attr("Fraction");
  return fraction(rat_str(r));
}

Region region_arg(int dim, const std::string& text) {
  return text.empty() ? Region::symmetric_box(dim, Rat(1)) : Region::parse(dim, text);
}

std::vector<Int> int_list(const py::iterable& items) {
  std::vector<Int> out;
  for (py::handle h : items) out.push_back(to_int(h));
  return out;
}

CurveSpec make_spec(int m, int d, py::handle q, py::handle b, const py::iterable& a) {
  CurveSpec spec;
  spec.m = m;
  spec.d = d;
  spec.q = to_int(q);
  spec.b = to_int(b);
  spec.a = int_list(a);
  if (spec.q >= 2)
    for (Int& ai : spec.a) mpz_fdiv_r(ai.get_mpz_t(), ai.get_mpz_t(), spec.q.get_mpz_t());
  return spec;
}

// `source` is a Ladder or anything Fraction-like; the caller's handle keeps
// the ladder alive for the duration of the call.
SeqDescriptor make_source(int d, py::handle source) {
  if (py::isinstance<ApproximantLadder>(source))
    return SeqDescriptor{d, std::nullopt, source.cast<const ApproximantLadder*>()};
  Rat r = to_rat(source);
  return SeqDescriptor{d, Convergent{Int(r.get_num()), Int(r.get_den())}, nullptr};
}

py::dict record_dict(const ExperimentRecord& r) {
  py::dict d;
  d["kind"] = r.kind;
  d["m"] = r.m;
  d["d"] = r.d;
  d["q"] = from_int(r.q);
  d["b"] = from_int(r.b);
  d["N"] = from_int(r.N);
  d["region"] = r.region;
  d["value"] = from_rat(r.value);
  d["reference"] = from_rat(r.reference);
  d["deviation"] = r.deviation;
  d["seed"] = r.seed;
  d["wall_ms"] = r.wall_ms;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ndcorr, m) {
  m.doc() = "exact spacing statistics of n^d*theta mod 1 and point counts of the attached "
            "chain curves";
  m.attr("__version__") = "0.1.0";

  py::class_<ApproximantLadder>(m, "Ladder",
                                "finite prefix of an approximation scheme, with exact tail "
                                "certificates per rung")
      .def_static(
          "build",
          [](py::handle q0, py::handle b0, const std::vector<long>& ks, const std::string& mode) {
            return ApproximantLadder::build(to_int(q0), to_int(b0), ks,
                                            ladder_mode_from_name(mode));
          },
          py::arg("q0"), py::arg("b0"), py::arg("ks"), py::arg("mode"))
      .def_static(
          "loads",
          [](const std::string& text) {
            std::istringstream in(text);
            return ApproximantLadder::load(in);
          },
          py::arg("text"))
      .def("dumps",
           [](const ApproximantLadder& l) {
             std::ostringstream out;
             l.save(out);
             return out.str();
           })
      .def("__len__", &ApproximantLadder::size)
      .def_property_readonly("mode",
                             [](const ApproximantLadder& l) { return ladder_mode_name(l.mode()); })
      .def_property_readonly("certified", &ApproximantLadder::certified)
      .def("entries",
           [](const ApproximantLadder& l) {
             py::list out;
             for (size_t j = 0; j < l.size(); j++) {
               const LadderEntry& e = l.entry(j);
               py::dict d;
               d["j"] = j;
               d["b"] = from_int(e.b);
               d["q"] = from_int(e.q);
               d["k"] = e.k;
               d["tail"] = from_rat(e.tail_bound);
               out.append(d);
             }
             return out;
           })
      .def(
          "ratio",
          [](const ApproximantLadder& l, size_t j) { return diophantine_ratio(l, j); },
          py::arg("j"), "squarefree log-ratio of rung j")
      .def(
          "classify",
          [](const ApproximantLadder& l, const std::vector<int>& d_list, py::handle budget) {
            Verdict v = classify_alpha(l, d_list, to_int(budget));
            py::dict out;
            out["ratios"] = v.ratios;
            out["classification"] = condition3_name(v.classification);
            py::list traces;
            for (const ExperimentRecord& r : v.traces) traces.append(record_dict(r));
            out["traces"] = traces;
            return out;
          },
          py::arg("d_list"), py::arg("budget"));

  m.def(
      "nu",
      [](int m_, int d, py::handle q, py::handle b, const py::iterable& a) {
        PointCountResult r = nu(make_spec(m_, d, q, b, a));
        py::dict out;
        out["nu"] = from_int(r.nu);
        out["defect"] = from_int(r.defect);
        py::list factors;
        for (const CrtFactor& f : r.crt_factors) {
          py::dict fd;
          fd["p"] = from_int(f.p);
          fd["e"] = f.e;
          fd["nu"] = from_int(f.nu);
          factors.append(fd);
        }
        out["factors"] = factors;
        return out;
      },
      py::arg("m"), py::arg("d"), py::arg("q"), py::arg("b") = 1,
      py::arg("a") = py::tuple(), "exact point count of one chain system");

  m.def(
      "nu_brute",
      [](int m_, int d, py::handle q, py::handle b, const py::iterable& a) {
        return from_int(nu_brute(make_spec(m_, d, q, b, a)));
      },
      py::arg("m"), py::arg("d"), py::arg("q"), py::arg("b") = 1,
      py::arg("a") = py::tuple(), "exhaustive oracle for nu");

  m.def(
      "weil_defect",
      [](int m_, int d, py::handle q, py::handle b, const py::iterable& a) {
        return from_rat(weil_defect(make_spec(m_, d, q, b, a)));
      },
      py::arg("m"), py::arg("d"), py::arg("q"), py::arg("b") = 1, py::arg("a") = py::tuple(),
      "exact B with nu = d^(m - r_eff) * (q + B), prime q only");

  m.def(
      "zero_sum_check",
      [](int d, int m_, py::handle c, py::handle b) {
        return from_int(zero_sum_check(d, m_, to_int(c), to_int(b)));
      },
      py::arg("d"), py::arg("m"), py::arg("c"), py::arg("b") = 1,
      "sum of defect products over every a mod c; zero when consistent");

  m.def("groebner_selfcheck", &groebner_selfcheck, py::arg("m"), py::arg("d"),
        "true when every s-polynomial of the chain generators reduces to zero");

  m.def(
      "correlation",
      [](int m_, int d, py::handle source, py::handle N, const std::string& region,
         const std::string& mode) {
        CorrelationRequest req;
        req.m = m_;
        req.d = d;
        req.source = make_source(d, source);
        req.N = to_int(N);
        req.region = region_arg(m_ - 1, region);
        CorrelationResult r = mode == "oracle" ? correlation_brute(req) : correlation(req);
        py::dict out;
        out["value"] = from_rat(r.value);
        out["tuple_count"] = from_int(r.tuple_count);
        out["method"] = r.method;
        out["wall_ms"] = r.wall_ms;
        return out;
      },
      py::arg("m"), py::arg("d"), py::arg("source"), py::arg("N"), py::arg("region") = "",
      py::arg("mode") = "exact",
      "ordered m-tuples inside the region per point; source is a fraction or a Ladder");

  m.def(
      "correlation_sandwich",
      [](int m_, int d, py::handle source, py::handle N, const std::string& region) {
        CorrelationRequest req;
        req.m = m_;
        req.d = d;
        req.source = make_source(d, source);
        req.N = to_int(N);
        req.region = region_arg(m_ - 1, region);
        std::pair<Rat, Rat> enclosure = correlation_sandwich(req);
        return py::make_tuple(from_rat(enclosure.first), from_rat(enclosure.second));
      },
      py::arg("m"), py::arg("d"), py::arg("source"), py::arg("N"), py::arg("region") = "",
      "exact (lower, upper) enclosure on the deepest certified rung");

  m.def(
      "consecutive_gaps",
      [](int d, py::handle source, py::handle N) {
        GapSummary g = consecutive_gaps(d, make_source(d, source), to_int(N));
        py::dict out;
        out["distinct_count"] = g.distinct_count;
        py::list gaps;
        for (const Rat& gap : g.gaps) gaps.append(from_rat(gap));
        out["gaps"] = gaps;
        return out;
      },
      py::arg("d"), py::arg("source"), py::arg("N"),
      "the N circular gaps of the first N points, in circle order");

  m.def(
      "star_sum_identity",
      [](int m_, int d, py::handle b, py::handle q, py::handle N, const std::string& region) {
        std::pair<Rat, Rat> sides =
            star_sum_identity(m_, d, to_int(b), to_int(q), to_int(N), region_arg(m_ - 1, region));
        return py::make_tuple(from_rat(sides.first), from_rat(sides.second));
      },
      py::arg("m"), py::arg("d"), py::arg("b"), py::arg("q"), py::arg("N"),
      py::arg("region") = "", "both sides of the tuple-counting identity");

  m.def(
      "fourier_identity_check",
      [](int d, py::handle b, py::handle q, py::handle N, const std::string& region) {
        FourierCheck f = fourier_identity_check(d, to_int(b), to_int(q), to_int(N),
                                                region_arg(1, region));
        py::dict out;
        out["lhs"] = from_rat(f.lhs);
        out["rhs"] = f.rhs;
        out["diff"] = f.diff;
        return out;
      },
      py::arg("d"), py::arg("b"), py::arg("q"), py::arg("N"), py::arg("region") = "",
      "pair correlation recomputed through complete character sums");

  m.def(
      "t2_experiment",
      [](const py::iterable& qs, int m_, int d, py::handle theta, py::handle delta0, int b_count,
         uint64_t seed, const std::string& region, int threads) {
        T2Config cfg;
        cfg.m = m_;
        cfg.d = d;
        cfg.theta = to_rat(theta);
        cfg.delta0 = to_rat(delta0);
        cfg.qs = int_list(qs);
        cfg.b_count = b_count;
        cfg.seed = seed;
        cfg.region = region_arg(m_ - 1, region);
        cfg.threads = threads;
        py::list out;
        for (const ExperimentRecord& r : t2_experiment(cfg)) out.append(record_dict(r));
        return out;
      },
      py::arg("qs"), py::arg("m") = 2, py::arg("d") = 2, py::arg("theta") = "17/20",
      py::arg("delta0") = "1/20", py::arg("b_count") = 1, py::arg("seed") = 0,
      py::arg("region") = "", py::arg("threads") = 1,
      "seeded correlation sweep; records sorted by (q, b, N)");

  m.def(
      "divergence_lower_bound",
      [](py::handle u, py::handle v, py::handle N, py::object q, py::handle b, int d, int m_,
         py::handle eta, const std::string& region) {
        DivergenceConfig cfg;
        cfg.u = to_int(u);
        cfg.v = to_int(v);
        cfg.q = q.is_none() ? Int(cfg.u * cfg.v * cfg.v) : to_int(q);
        cfg.b = to_int(b);
        cfg.d = d;
        cfg.m = m_;
        cfg.N = to_int(N);
        cfg.eta = to_rat(eta);
        cfg.region = region_arg(m_ - 1, region);
        DivergenceOutcome out = divergence_lower_bound(cfg);
        py::dict res;
        res["R"] = from_rat(out.R);
        res["bound"] = from_rat(out.bound);
        res["pass"] = out.pass;
        return res;
      },
      py::arg("u"), py::arg("v"), py::arg("N"), py::arg("q") = py::none(), py::arg("b") = 1,
      py::arg("d") = 2, py::arg("m") = 2, py::arg("eta") = "11/10", py::arg("region") = "",
      "exact correlation lower bound M(M-1)...(M-m+1)/N at q = u*v^2");

  m.def(
      "schedule_Nj",
      [](const ApproximantLadder& ladder, const std::map<long, py::object>& deltas,
         const std::map<long, size_t>& thresholds) {
        std::map<long, Rat> k_to_delta;
        for (const auto& [k, v] : deltas) k_to_delta[k] = to_rat(v);
        py::list out;
        for (const Int& N : schedule_Nj(ladder, k_to_delta, thresholds)) out.append(from_int(N));
        return out;
      },
      py::arg("ladder"), py::arg("deltas"), py::arg("thresholds"),
      "per-rung sample sizes N_j = floor(q_j^(1 - 1/(4k)))");
}
