#include "nullgeo/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "nullgeo/contact.hpp"
#include "nullgeo/errors.hpp"
#include "nullgeo/linalg.hpp"
#include "nullgeo/nullsub.hpp"
#include "nullgeo/qgcr.hpp"
#include "nullgeo/theorems.hpp"

namespace nullgeo {

const std::vector<std::string>& check_families() {
  static const std::vector<std::string> f{"frames",       "acms",   "nearly-cosymplectic", "gw",
                                          "qgcr",         "ascreen", "umbilical",          "irrotational",
                                          "mixed",        "d-geodesic", "gauss",           "spaceform",
                                          "lemmas",       "expect"};
  return f;
}

double resolve_tolerance(const ScenarioDocument& doc, const RunOptions& opt, const std::string& key) {
  auto def = default_tolerances().find(key);
  if (def == default_tolerances().end()) throw Error("unknown tolerance key '" + key + "'");
  double v = def->second;
  if (auto it = doc.tolerances.find(key); it != doc.tolerances.end()) v = it->second;
  if (auto it = opt.tolerances.find(key); it != opt.tolerances.end()) v = it->second;
  return v * opt.tol_scale;
}

namespace {

std::string fmt(const char* f, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string family_of(const std::string& id) { return id.substr(0, id.find('.')); }

bool passes(const std::vector<CheckRecord>& rs) {
  return std::all_of(rs.begin(), rs.end(), [](const CheckRecord& r) { return r.verdict != Verdict::Fail; });
}

struct Run {
  const ScenarioDocument& doc;
  const RunOptions& opt;
  const SubmanifoldScenario& sc;
  CheckReport report;
  std::vector<PointFrame> frames;
  std::vector<GWTable> tables;
  std::vector<int> point_ids;  // sample index of every evaluated frame
  std::vector<StructurePoint> structure;

  Run(const ScenarioDocument& d, const RunOptions& o) : doc(d), opt(o), sc(d.sc) {}

  double tol(const std::string& key) const { return resolve_tolerance(doc, opt, key); }
  bool selected(const std::string& family) const { return opt.only.empty() || opt.only.count(family) > 0; }
  void add(std::vector<CheckRecord> rs) {
    for (auto& r : rs) report.records.push_back(std::move(r));
  }
  void add(CheckRecord r) { report.records.push_back(std::move(r)); }
  void fail(const std::string& family, int point, const std::exception& e) {
    add(bool_record(family + ".error", point, false, 0.0, 0.0, e.what()));
  }
  // Runs `body`, turning library errors into failed records.
  void guarded(const std::string& family, int point, const std::function<void()>& body) {
    try {
      body();
    } catch (const Error& e) {
      fail(family, point, e);
    }
  }
  bool qgcr_ready() const { return sc.structure.has_value() && sc.qgcr.declared; }
};

void check_claims(Run& run) {
  const double tol = run.tol("gw");
  for (const Claim& c : run.doc.claims) {
    const std::string id = "gw.claim." + c.id;
    run.guarded("gw", -1, [&] {
      const SubmanifoldScenario& sc = run.sc;
      int ix = sc.frame_index(c.x), iy = sc.frame_index(c.y), ic = sc.frame_index(c.component);
      double dev_derived = 0.0, dev_printed = 0.0, span_res = 0.0;
      std::vector<int> par;
      for (const auto& p : c.parallel) par.push_back(sc.frame_index(p));
      for (std::size_t k = 0; k < run.tables.size(); ++k) {
        const GWTable& gw = run.tables[k];
        const Vec& x = run.frames[k].point.x;
        std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
        Vec nab = gw.nabla(gw.tangent_unit(ix), gw.tangent_unit(iy));
        double computed = nab(ic);
        if (c.derived) dev_derived = std::max(dev_derived, std::abs(computed - c.derived->eval(xs, sc.bindings)));
        if (c.printed) dev_printed = std::max(dev_printed, std::abs(computed - c.printed->eval(xs, sc.bindings)));
        if (!par.empty()) {
          std::vector<Vec> basis;
          for (int f : par) basis.push_back(gw.tangent_unit(f));
          span_res = std::max(span_res, span_residual(columns(basis, gw.m), nab));
        }
      }
      std::string what = "coefficient of " + c.component + " in nabla_{" + c.x + "} " + c.y;
      char buf[512];
      std::snprintf(buf, sizeof buf, "%s: |computed - derived| = %.3e, span residual = %.3e", what.c_str(),
                    dev_derived, span_res);
      run.add(make_record(id, -1, std::max(dev_derived, span_res), tol, buf));
      if (c.printed && dev_printed > tol) {
        std::string note = what + " computes to " + (c.derived ? c.derived->render() : std::string("(see gw)")) +
                           " (derived) versus printed " + c.printed->render() +
                           fmt(" (max deviation %.6g over samples)", dev_printed);
        if (!par.empty()) note += fmt("; parallelism residual %.3e", span_res);
        if (!c.remark.empty()) note += "; " + c.remark;
        run.report.derived.discrepancy_flags.push_back({"claim." + c.id, note});
      }
    });
  }
}

}  // namespace

CheckReport run_checks(const ScenarioDocument& doc, const RunOptions& opt) {
  for (const auto& f : opt.only)
    if (std::find(check_families().begin(), check_families().end(), f) == check_families().end())
      throw Error("unknown check family '" + f + "'");
  Run run(doc, opt);
  const SubmanifoldScenario& sc = doc.sc;
  CheckReport& rep = run.report;
  rep.scenario = sc.id;
  rep.seed = opt.seed.value_or(sc.seed);
  rep.samples = opt.samples.value_or(sc.count);
  const bool want_curvature = run.selected("gauss") || run.selected("spaceform");

  std::vector<SamplePoint> pts;
  run.guarded("frames", -1, [&] { pts = sample_points(sc, rep.samples, rep.seed); });

  // Pointwise frames and Gauss-Weingarten tables.
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int idx = static_cast<int>(i);
    run.guarded("frames", idx, [&] {
      PointFrame pf = evaluate_frame(sc, pts[i], idx, want_curvature);
      run.add(frame_relation_checks(sc, pf, run.tol("frames")));
      GWTable gw = gauss_weingarten(sc, pf);
      run.add(gw_checks(gw, pf, idx, run.tol("gw"), 5, rep.seed + i));
      if (sc.structure) {
        std::span<const double> xs(pf.point.x.data(), static_cast<std::size_t>(pf.point.x.size()));
        run.structure.push_back(evaluate_structure(*sc.structure, xs, sc.bindings));
      }
      run.frames.push_back(std::move(pf));
      run.tables.push_back(std::move(gw));
      run.point_ids.push_back(idx);
    });
  }
  check_claims(run);

  // Ambient structure.
  std::vector<bool> nearly(run.frames.size(), false);
  if (sc.structure) {
    std::vector<Vec> xs;
    for (const auto& p : pts) xs.push_back(p.x);
    run.guarded("acms", -1, [&] { run.add(verify_acms(*sc.structure, sc.metric, xs, sc.bindings, run.tol("acms"))); });
    for (std::size_t k = 0; k < run.frames.size(); ++k) {
      const int idx = run.point_ids[k];
      run.guarded("nearly-cosymplectic", idx, [&] {
        const StructurePoint& sp = run.structure[k];
        const MetricPoint& mp = run.frames[k].mp;
        double v = nearly_cosymplectic_value(sp, mp);
        nearly[k] = v <= run.tol("nearly-cosymplectic");
        run.add(make_record("nearly-cosymplectic.symmetric_part", idx, v, run.tol("nearly-cosymplectic"),
                            "max |(nabla_X phi)Y + (nabla_Y phi)X| over coordinate pairs"));
        run.add(h_tensor_checks(sp, mp, idx, nearly[k], run.tol("nearly-cosymplectic")));
        run.add(structure_lemma_checks(sp, mp, idx, nearly[k], run.tol("lemmas")));
      });
    }
  } else {
    for (const char* f : {"acms", "nearly-cosymplectic"})
      run.add(skip_record(std::string(f) + ".structure", -1, "scenario has no almost contact structure"));
  }

  // QGCR and ascreen.
  std::optional<bool> qgcr, proper, ascreen;
  if (run.qgcr_ready()) {
    bool q = !run.tables.empty(), pr = q, as = q;
    for (std::size_t k = 0; k < run.tables.size(); ++k) {
      const int idx = run.point_ids[k];
      const GWTable& gw = run.tables[k];
      run.guarded("qgcr", idx, [&] {
        QgcrVerdict v = verify_qgcr(sc, gw, idx, run.tol("qgcr"));
        q = q && v.qgcr;
        pr = pr && v.proper;
        run.add(std::move(v.records));
      });
      run.guarded("ascreen", idx, [&] {
        auto rs = verify_ascreen(sc, gw, idx, run.tol("ascreen"));
        bool ok = passes(rs);
        as = as && ok;
        run.add(std::move(rs));
        run.add(lemma52_check(sc, gw, idx, ok, run.tol("lemma52")));
      });
    }
    qgcr = q;
    proper = pr;
    ascreen = as;
  } else {
    for (const char* f : {"qgcr", "ascreen"})
      run.add(skip_record(std::string(f) + ".declaration", -1, "needs a structure and a QGCR declaration"));
  }
  rep.verdicts["qgcr"] = qgcr;
  rep.verdicts["proper"] = proper;
  rep.verdicts["ascreen"] = ascreen;

  // Umbilicity and geodesy.
  std::optional<bool> umbilical, geodesic, irrotational;
  run.guarded("umbilical", -1, [&] {
    UmbilicalResult u = umbilical_check(run.tables, run.tol("umbilical"));
    umbilical = u.umbilical;
    geodesic = u.geodesic;
    for (const UmbilicalFit& f : u.fits) {
      HFitEntry e;
      e.point_index = run.point_ids[static_cast<std::size_t>(f.point_index)];
      e.lightlike.assign(f.hl.data(), f.hl.data() + f.hl.size());
      e.screen_transversal.assign(f.hs.data(), f.hs.data() + f.hs.size());
      e.residual = f.residual;
      rep.derived.h_fit.push_back(std::move(e));
    }
    for (auto& r : u.records)
      if (r.point_index >= 0) r.point_index = run.point_ids[static_cast<std::size_t>(r.point_index)];
    run.add(std::move(u.records));
  });
  run.guarded("irrotational", -1, [&] {
    PredicateResult p = irrotational_check(run.tables, run.tol("irrotational"));
    irrotational = p.holds;
    for (auto& r : p.records) r.point_index = run.point_ids[static_cast<std::size_t>(r.point_index)];
    run.add(std::move(p.records));
    if (geodesic)
      run.add(bool_record("irrotational.implication", -1, !*geodesic || p.holds, *geodesic ? 1.0 : 0.0,
                          p.holds ? 1.0 : 0.0, "totally geodesic implies irrotational"));
  });
  rep.verdicts["umbilical"] = umbilical;
  rep.verdicts["geodesic"] = geodesic;
  rep.verdicts["irrotational"] = irrotational;

  // c-bar from the irrotational ascreen relation.
  std::optional<double> cbar;
  std::string cbar_source;
  if (irrotational.value_or(false) && ascreen.value_or(false) && run.qgcr_ready() && !sc.qgcr.d2.empty()) {
    run.guarded("irrotational", -1, [&] {
      double lo = INFINITY, hi = -INFINITY;
      std::string sign;
      for (std::size_t k = 0; k < run.tables.size(); ++k) {
        CbarRoutes c = cbar_from_irrotational(sc, run.tables[k]);
        lo = std::min(lo, c.estimate.value);
        hi = std::max(hi, c.estimate.value);
        sign = c.estimate.sign_class;
        run.add(make_record("irrotational.cbar_routes", run.point_ids[k], std::abs(c.estimate.value - c.via_deta),
                            run.tol("irrotational"),
                            "-g(HE,HE)/b^2 against d eta(E,HE)/b^2; sign class " + c.estimate.sign_class));
      }
      if (!run.tables.empty()) {
        run.add(make_record("irrotational.cbar_constant", -1, hi - lo, run.tol("irrotational"),
                            "spread of c-bar over samples; sign class " + sign));
        cbar = 0.5 * (lo + hi);
        cbar_source = "ms455-formula";
      }
    });
  }
  if (!cbar && doc.declared_cbar) {
    cbar = doc.declared_cbar;
    cbar_source = "declared";
  }
  if (!cbar && run.qgcr_ready() && umbilical.value_or(false) && !sc.qgcr.d0.empty() && !sc.qgcr.s.empty()) {
    // Solve the theorem's relation for c-bar with X in D0 and Z in phi S.
    run.guarded("spaceform", -1, [&] {
      const GWTable& gw = run.tables.at(0);
      Vec x = gw.tangent_unit(sc.frame_index(sc.qgcr.d0.front()));
      Vec z = gw.coords(gw.phi * gw.frame.col(sc.frame_index(sc.qgcr.s.front()))).head(gw.m);
      Theorem41Sides s = theorem41_sides(gw, x, z, 1.0);
      if (s.lhs != 0.0) {
        cbar = s.rhs / s.lhs;
        cbar_source = "s30-relation";
      }
    });
  }
  rep.derived.cbar = cbar;
  rep.derived.cbar_source = cbar ? cbar_source : "";

  // Mixed and D geodesy, H-pairing lemma.
  std::optional<bool> mixed, dgeo;
  if (run.qgcr_ready() && qgcr.value_or(false)) {
    run.guarded("mixed", -1, [&] {
      MixedResult m = mixed_geodesic_check(sc, run.tables, run.tol("mixed"));
      mixed = m.verdict_a;
      for (auto& r : m.records) r.point_index = run.point_ids[static_cast<std::size_t>(r.point_index)];
      run.add(std::move(m.records));
    });
    run.guarded("d-geodesic", -1, [&] {
      PredicateResult d = d_geodesic_check(sc, run.tables, run.tol("d-geodesic"));
      dgeo = d.holds;
      for (auto& r : d.records) r.point_index = run.point_ids[static_cast<std::size_t>(r.point_index)];
      run.add(std::move(d.records));
    });
    for (std::size_t k = 0; k < run.tables.size(); ++k) {
      const int idx = run.point_ids[k];
      run.guarded("lemmas", idx, [&] {
        if (ascreen.value_or(false))
          run.add(lems11_check(sc, run.tables[k], idx, run.tol("lems11")));
        else
          run.add(skip_record("lemmas.lems11", idx, "not ascreen"));
      });
    }
  } else {
    for (const char* f : {"mixed", "d-geodesic"})
      run.add(skip_record(std::string(f) + ".declaration", -1, "needs a QGCR submanifold"));
  }
  rep.verdicts["mixed_geodesic"] = mixed;
  rep.verdicts["d_geodesic"] = dgeo;

  // Gauss relation on random frame 4-tuples.
  if (run.selected("gauss")) {
    for (std::size_t k = 0; k < run.frames.size(); ++k) {
      const int idx = run.point_ids[k];
      run.guarded("gauss", idx, [&] {
        const GWTable& gw = run.tables[k];
        GaussEvaluator ev(sc, run.frames[k], gw);
        std::mt19937_64 rng(rep.seed * 1000003ULL + static_cast<std::uint64_t>(idx));
        std::uniform_int_distribution<int> pick(0, gw.m - 1);
        double worst = 0.0, lhs_max = 0.0, rhs_max = 0.0;
        for (int t = 0; t < opt.gauss_tuples; ++t) {
          Vec x = gw.tangent_unit(pick(rng)), w = gw.tangent_unit(pick(rng));
          Vec z = gw.tangent_unit(pick(rng)), y = gw.tangent_unit(pick(rng));
          GaussSides s = ev.sides(x, w, z, y);
          worst = std::max(worst, std::abs(s.lhs - s.rhs));
          lhs_max = std::max(lhs_max, std::abs(s.lhs));
          rhs_max = std::max(rhs_max, std::abs(s.rhs));
        }
        char buf[160];
        std::snprintf(buf, sizeof buf, "max |lhs| = %.3e, max |rhs| = %.3e over %d frame tuples", lhs_max, rhs_max,
                      opt.gauss_tuples);
        run.add(make_record("gauss.s8", idx, worst, run.tol("gauss"), buf));
      });
    }
  }

  // Space-form curvature and the theorem's relation.
  if (run.selected("spaceform")) {
    if (!sc.structure || !cbar) {
      run.add(skip_record("spaceform.s9", -1, sc.structure ? "no c-bar available" : "no almost contact structure"));
    } else {
      for (std::size_t k = 0; k < run.frames.size(); ++k) {
        const int idx = run.point_ids[k];
        run.guarded("spaceform", idx, [&] {
          const PointFrame& pf = run.frames[k];
          const StructurePoint& sp = run.structure[k];
          const int n = pf.n();
          std::mt19937_64 rng(rep.seed * 1000033ULL + static_cast<std::uint64_t>(idx));
          std::uniform_int_distribution<int> pick(0, n - 1);
          double worst = 0.0;
          for (int t = 0; t < opt.spaceform_tuples; ++t) {
            Vec x = pf.frame.col(pick(rng)), w = pf.frame.col(pick(rng));
            Vec z = pf.frame.col(pick(rng)), y = pf.frame.col(pick(rng));
            double lhs = pf.mp.riemann(x, w, z, y);
            double rhs = spaceform_curvature(sp, pf.mp, *cbar, x, w, z, y);
            worst = std::max(worst, std::abs(lhs - rhs));
          }
          run.add(make_record("spaceform.s9", idx, worst, run.tol("spaceform"),
                              fmt("ambient curvature against the space-form expression with c-bar = %.6g", *cbar)));
          if (run.qgcr_ready() && !sc.qgcr.d0.empty() && !sc.qgcr.s.empty()) {
            const GWTable& gw = run.tables[k];
            double eta_res = 0.0, worst41 = 0.0;
            CheckRecord last;
            bool any_fail = false;
            for (const auto& dn : sc.qgcr.d0)
              for (const auto& sn : sc.qgcr.s) {
                Vec x = gw.tangent_unit(sc.frame_index(dn));
                Vec z = gw.coords(gw.phi * gw.frame.col(sc.frame_index(sn))).head(gw.m);
                eta_res = std::max({eta_res, std::abs(gw.eta.dot(gw.ambient(gw.unit(sc.frame_index(dn))))),
                                    std::abs(gw.eta.dot(gw.phi * gw.frame.col(sc.frame_index(sn))))});
                CheckRecord r = theorem41_relation(sc, gw, idx, x, z, *cbar,
                                                   umbilical.value_or(false) || geodesic.value_or(false),
                                                   run.tol("spaceform"));
                if (r.verdict == Verdict::Fail) any_fail = true;
                if (r.verdict != Verdict::Skip) worst41 = std::max(worst41, r.residual);
                if (last.check_id.empty() || r.verdict == Verdict::Fail) last = r;
              }
            if (!any_fail && last.verdict == Verdict::Pass) last.residual = worst41;
            run.add(last);
            run.add(make_record("spaceform.eta_vanishing", idx, eta_res, run.tol("spaceform"),
                                "eta(X) = eta(Z) = 0 for X in D0, Z in phi S"));
          }
        });
      }
    }
  }

  // Published expectations.
  if (run.selected("expect")) {
    const double tol = run.tol("expect");
    for (const auto& [name, want] : doc.expect) {
      const auto& got = rep.verdicts[name];
      if (!got)
        run.add(skip_record("expect." + name, -1, "verdict not computed"));
      else
        run.add(bool_record("expect." + name, -1, *got == want, *got ? 1.0 : 0.0, want ? 1.0 : 0.0,
                            std::string("computed ") + (*got ? "true" : "false") + ", published " +
                                (want ? "true" : "false")));
    }
    if (doc.expect_cbar) {
      if (!cbar)
        run.add(skip_record("expect.cbar", -1, "c-bar not computed"));
      else
        run.add(make_record("expect.cbar", -1, std::abs(*cbar - *doc.expect_cbar), tol,
                            fmt("computed c-bar %.6g", *cbar) + fmt(", published %.6g", *doc.expect_cbar)));
    }
  }

  for (const auto& n : doc.notes) rep.derived.discrepancy_flags.push_back({"note." + n.id, n.text});

  if (!opt.only.empty()) {
    std::vector<CheckRecord> kept;
    for (auto& r : rep.records)
      if (opt.only.count(family_of(r.check_id))) kept.push_back(std::move(r));
    rep.records = std::move(kept);
  }
  rep.sort_records();
  return rep;
}

std::string emit_report(const CheckReport& report, const std::string& format) {
  if (format == "json") return report_to_json(report);
  if (format == "text") return report_to_text(report);
  throw Error("unknown report format '" + format + "'");
}

}  // namespace nullgeo
