#include "nullgeo/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nullgeo/errors.hpp"
#include "nullgeo/linalg.hpp"

namespace nullgeo {

namespace {

double max_abs(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::vector<int> indices(const SubmanifoldScenario& sc, const std::vector<std::string>& names) {
  std::vector<int> out;
  for (const auto& n : names) {
    int k = sc.frame_index(n);
    if (k < 0) throw FrameError("unknown frame field '" + n + "'");
    out.push_back(k);
  }
  return out;
}

// Tangent frame coordinates of an ambient vector known to be tangent.
Vec tangent_coords(const GWTable& gw, const Vec& v) { return gw.coords(v).head(gw.m); }

}  // namespace

UmbilicalFit umbilical_fit(const GWTable& gw, int point_index) {
  const int m = gw.m, t = gw.r + gw.q;
  Mat g = gw.gram();
  Vec num = Vec::Zero(t);
  double den = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      Vec h = gw.nabla_bar(gw.tangent_unit(a), gw.tangent_unit(b)).tail(t);
      num += g(a, b) * h;
      den += g(a, b) * g(a, b);
    }
  if (den < 1e-24) throw Error("umbilical fit undetermined: every frame pair is g-null");
  Vec coef = num / den;
  UmbilicalFit fit;
  fit.point_index = point_index;
  fit.hl = coef.head(gw.r);
  fit.hs = coef.tail(gw.q);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      Vec h = gw.nabla_bar(gw.tangent_unit(a), gw.tangent_unit(b)).tail(t);
      fit.residual = std::max(fit.residual, max_abs(h - g(a, b) * coef));
      fit.h_max = std::max(fit.h_max, max_abs(h));
    }
  return fit;
}

UmbilicalResult umbilical_check(std::span<const GWTable> tables, double tol) {
  UmbilicalResult res;
  bool umb = !tables.empty(), geo = !tables.empty();
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const int idx = static_cast<int>(i);
    try {
      UmbilicalFit fit = umbilical_fit(tables[i], idx);
      double hmag = std::max(max_abs(fit.hl), max_abs(fit.hs));
      res.records.push_back(make_record("umbilical.fit", idx, fit.residual, tol,
                                        fmt("max |h - H g| over frame pairs; |H| = %.6g, |h| = %.6g", hmag, fit.h_max)));
      umb = umb && fit.residual <= tol;
      geo = geo && fit.h_max <= tol;
      res.fits.push_back(std::move(fit));
    } catch (const Error& e) {
      res.records.push_back(bool_record("umbilical.fit", idx, false, 0.0, tol, e.what()));
      umb = geo = false;
    }
  }
  res.umbilical = umb;
  res.geodesic = geo;
  res.records.push_back(bool_record("umbilical.implication", -1, !geo || umb, geo ? 1.0 : 0.0, umb ? 1.0 : 0.0,
                                    "totally geodesic implies totally umbilical"));
  return res;
}

PredicateResult irrotational_check(std::span<const GWTable> tables, double tol) {
  PredicateResult res;
  res.holds = !tables.empty();
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const GWTable& gw = tables[i];
    double worst = 0.0;
    for (int a = 0; a < gw.m; ++a)
      for (int e = 0; e < gw.r; ++e)
        worst = std::max(worst, max_abs(gw.h(gw.tangent_unit(a), gw.tangent_unit(e))));
    res.records.push_back(make_record("irrotational.h_rad", static_cast<int>(i), worst, tol,
                                      "max |h^l(X,E)|, |h^s(X,E)| over frame X and radical E"));
    res.holds = res.holds && worst <= tol;
  }
  return res;
}

MixedBases mixed_bases(const SubmanifoldScenario& sc, const GWTable& gw) {
  if (!gw.has_structure) throw Error("mixed geodesy checks need an almost contact structure");
  MixedBases b;
  std::vector<Vec> d, dh;
  for (int k : indices(sc, sc.qgcr.d0)) d.push_back(gw.tangent_unit(k));
  for (int k : indices(sc, sc.qgcr.d1)) d.push_back(gw.tangent_unit(k));
  std::vector<int> d2 = indices(sc, sc.qgcr.d2);
  for (int k : d2) dh.push_back(gw.tangent_unit(k));
  for (int k : d2) dh.push_back(tangent_coords(gw, gw.phi * gw.frame.col(k)));
  for (int k : indices(sc, sc.qgcr.l)) dh.push_back(tangent_coords(gw, gw.phi * gw.frame.col(k)));
  for (int k : indices(sc, sc.qgcr.s)) dh.push_back(tangent_coords(gw, gw.phi * gw.frame.col(k)));
  b.d = columns(d, gw.m);
  b.d_hat = columns(dh, gw.m);
  return b;
}

MixedResult mixed_geodesic_check(const SubmanifoldScenario& sc, std::span<const GWTable> tables, double tol) {
  MixedResult res;
  bool va = !tables.empty(), vb = !tables.empty(), agree = true;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const GWTable& gw = tables[i];
    const int idx = static_cast<int>(i);
    MixedBases b = mixed_bases(sc, gw);
    double ra = 0.0, rs = 0.0, rstar = 0.0;
    for (int p = 0; p < b.d.cols(); ++p) {
      Vec x = b.d.col(p);
      for (int q = 0; q < b.d_hat.cols(); ++q) {
        Vec h = gw.h(x, b.d_hat.col(q));
        ra = std::max(ra, max_abs(h));
        rs = std::max(rs, max_abs(h.tail(gw.q)));
      }
      for (int e = 0; e < gw.r; ++e) rstar = std::max(rstar, gw.a_star(e, x).norm());
    }
    double rb = std::max(rs, rstar);
    bool pa = ra <= tol, pb = rb <= tol;
    res.records.push_back(make_record("mixed.verdict_a", idx, ra, tol, "max |h(X,Y)|, X in D, Y in D-hat"));
    res.records.push_back(make_record("mixed.verdict_b", idx, rb, tol,
                                      fmt("max |h^s(X,Y)| = %.3e, max |A*_E X| = %.3e", rs, rstar)));
    res.records.push_back(bool_record("mixed.agreement", idx, pa == pb, ra, rb, "verdict_A and verdict_B agree"));
    va = va && pa;
    vb = vb && pb;
    agree = agree && pa == pb;
  }
  res.verdict_a = va;
  res.verdict_b = vb;
  res.agree = agree;
  return res;
}

PredicateResult d_geodesic_check(const SubmanifoldScenario& sc, std::span<const GWTable> tables, double tol) {
  PredicateResult res;
  res.holds = !tables.empty();
  std::vector<int> d2 = indices(sc, sc.qgcr.d2);
  std::vector<int> s = indices(sc, sc.qgcr.s);
  std::vector<int> d0 = indices(sc, sc.qgcr.d0);
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const GWTable& gw = tables[i];
    const int idx = static_cast<int>(i);
    const int m = gw.m, r = gw.r, q = gw.q;
    MixedBases b = mixed_bases(sc, gw);
    double hdd = 0.0;
    for (int p = 0; p < b.d.cols(); ++p)
      for (int k = 0; k < b.d.cols(); ++k) hdd = std::max(hdd, max_abs(gw.h(b.d.col(p), b.d.col(k))));
    res.records.push_back(make_record("d-geodesic.h_dd", idx, hdd, tol, "max |h(X,Y)|, X, Y in D"));
    res.holds = res.holds && hdd <= tol;

    // Component conditions of the characterization theorem.
    double hl_ltr = 0.0, hs_s = 0.0, ne = 0.0, nw = 0.0;
    auto nabla_phi_along = [&](const Vec& x) {
      Mat out = Mat::Zero(gw.frame.rows(), gw.frame.rows());
      for (int a = 0; a < m; ++a)
        if (x(a) != 0.0) out += x(a) * gw.nabla_phi_frame[static_cast<std::size_t>(a)];
      return out;
    };
    auto d0_part = [&](const Vec& v) {
      double w = 0.0;
      for (int k : d0) w = std::max(w, std::abs(v.dot(gw.metric * gw.frame.col(k))));
      return w;
    };
    for (int p = 0; p < b.d.cols(); ++p) {
      Vec x = b.d.col(p);
      Mat np = nabla_phi_along(x);
      for (int e : d2) {
        Vec phi_e = tangent_coords(gw, gw.phi * gw.frame.col(e));
        Vec hl = Vec::Zero(gw.n());
        hl.segment(m, r) = gw.hl(x, phi_e);
        hl_ltr = std::max(hl_ltr, max_abs(gw.coords(gw.phi * gw.ambient(hl)).segment(m, r)));
        Vec v = np * gw.frame.col(e) + gw.phi * gw.ambient(gw.nabla_bar_field(x, e));
        ne = std::max(ne, d0_part(v));
      }
      for (int w : s) {
        Vec phi_w = tangent_coords(gw, gw.phi * gw.frame.col(w));
        Vec hs = Vec::Zero(gw.n());
        hs.tail(q) = gw.hs(x, phi_w);
        hs_s = std::max(hs_s, max_abs(gw.coords(gw.phi * gw.ambient(hs)).tail(q)));
        Vec v = np * gw.frame.col(w) + gw.phi * gw.ambient(gw.nabla_bar_field(x, w));
        nw = std::max(nw, d0_part(v));
      }
    }
    res.records.push_back(make_record("d-geodesic.phi_hl_ltr", idx, hl_ltr, tol,
                                      "ltr components of phi h^l(X, phi E), X in D, E in D2"));
    res.records.push_back(make_record("d-geodesic.phi_hs_stransversal", idx, hs_s, tol,
                                      "S(TM-perp) components of phi h^s(X, phi W), X in D"));
    res.records.push_back(make_record("d-geodesic.nabla_phi_e_d0", idx, ne, tol,
                                      "max |g(nabla_X phi E, Y)|, X in D, Y in D0"));
    res.records.push_back(make_record("d-geodesic.nabla_phi_w_d0", idx, nw, tol,
                                      "max |g(nabla_X phi W, Y)|, X in D, Y in D0"));
  }
  return res;
}

GWTable table_at(const SubmanifoldScenario& sc, const Vec& u) {
  PointFrame pf = evaluate_frame(sc, embed(sc, u));
  return gauss_weingarten(sc, pf);
}

DirectionalProbe::DirectionalProbe(const TableAt& at, const Vec& u, const Vec& v, double step) {
  double t = step;
  for (int attempt = 0;; ++attempt) {
    try {
      std::vector<GWTable> tabs;
      for (double s : {t, -t, 0.5 * t, -0.5 * t}) tabs.push_back(at(u + s * v));
      tables_ = std::move(tabs);
      step_ = t;
      return;
    } catch (const DomainError&) {
      if (attempt >= 6) throw;
      t *= 0.5;
    }
  }
}

Vec DirectionalProbe::derivative(const std::function<Vec(const GWTable&)>& f) const {
  Vec d1 = (f(tables_[0]) - f(tables_[1])) / (2.0 * step_);
  Vec d2 = (f(tables_[2]) - f(tables_[3])) / step_;
  return (4.0 * d2 - d1) / 3.0;
}

GaussEvaluator::GaussEvaluator(const SubmanifoldScenario& sc, const PointFrame& pf, const GWTable& gw, double step)
    : sc_(sc), pf_(pf), gw_(gw), step_(step), jac_(pf.jacobian) {
  if (!pf.mp.has_curvature()) throw Error("Gauss relation needs ambient curvature at the point");
}

const DirectionalProbe& GaussEvaluator::probe(const Vec& direction) {
  std::vector<double> key(direction.data(), direction.data() + direction.size());
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  Vec v = jac_.solve(gw_.frame.leftCols(gw_.m) * direction);
  TableAt at = [this](const Vec& u) { return table_at(sc_, u); };
  return cache_.emplace(key, DirectionalProbe(at, pf_.point.u, v, step_)).first->second;
}

Vec GaussEvaluator::d_nabla_bar(const Vec& x, const Vec& w, const Vec& z) {
  return probe(x).derivative([&](const GWTable& t) { return t.nabla_bar(w, z); });
}

Vec GaussEvaluator::curvature_frame(const Vec& x, const Vec& w, const Vec& z) {
  const GWTable& g = gw_;
  const int m = g.m, r = g.r, q = g.q;
  Vec dx = d_nabla_bar(x, w, z);  // D_X of nabla-bar_W Z coordinates
  Vec dw = d_nabla_bar(w, x, z);
  Vec nwz = g.nabla(w, z), nxz = g.nabla(x, z);
  Vec nxw = g.nabla(x, w), nwx = g.nabla(w, x);
  Vec bracket = nxw - nwx;
  Vec hl_wz = g.hl(w, z), hl_xz = g.hl(x, z);
  Vec hs_wz = g.hs(w, z), hs_xz = g.hs(x, z);

  Vec out = Vec::Zero(g.n());
  // Tangent part: induced curvature plus shape-operator terms.
  Vec rt = dx.head(m) + g.nabla(x, nwz) - dw.head(m) - g.nabla(w, nxz) - g.nabla(bracket, z);
  for (int i = 0; i < r; ++i) rt += hl_xz(i) * g.a_n(i, w) - hl_wz(i) * g.a_n(i, x);
  for (int a = 0; a < q; ++a) rt += hs_xz(a) * g.a_w(a, w) - hs_wz(a) * g.a_w(a, x);
  out.head(m) = rt;

  // ltr part: (nabla_X h^l)(W,Z) - (nabla_W h^l)(X,Z) + D^l terms.
  for (int i = 0; i < r; ++i) {
    auto cov_hl = [&](const Vec& a, const Vec& b, const Vec& c, const Vec& da, const Vec& hbc) {
      double v = da(m + i) - g.hl(g.nabla(a, b), c)(i) - g.hl(b, g.nabla(a, c))(i);
      for (int j = 0; j < r; ++j) v += hbc(j) * g.tau(j, i, a);
      return v;
    };
    double v = cov_hl(x, w, z, dx, hl_wz) - cov_hl(w, x, z, dw, hl_xz);
    for (int a = 0; a < q; ++a) v += hs_wz(a) * g.phi_coef(a, i, x) - hs_xz(a) * g.phi_coef(a, i, w);
    out(m + i) = v;
  }
  // S(TM-perp) part: (nabla_X h^s)(W,Z) - (nabla_W h^s)(X,Z) + D^s terms.
  for (int b = 0; b < q; ++b) {
    auto cov_hs = [&](const Vec& a, const Vec& bb, const Vec& c, const Vec& da, const Vec& hbc) {
      double v = da(m + r + b) - g.hs(g.nabla(a, bb), c)(b) - g.hs(bb, g.nabla(a, c))(b);
      for (int al = 0; al < q; ++al) v += hbc(al) * g.sigma(al, b, a);
      return v;
    };
    double v = cov_hs(x, w, z, dx, hs_wz) - cov_hs(w, x, z, dw, hs_xz);
    for (int i = 0; i < r; ++i) v += hl_wz(i) * g.rho(i, b, x) - hl_xz(i) * g.rho(i, b, w);
    out(m + r + b) = v;
  }
  return out;
}

GaussSides GaussEvaluator::sides(const Vec& x, const Vec& w, const Vec& z, const Vec& y) {
  const Mat t = gw_.frame.leftCols(gw_.m);
  GaussSides s;
  s.lhs = pf_.mp.riemann(t * x, t * w, t * z, t * y);
  Vec yy = Vec::Zero(gw_.n());
  yy.head(gw_.m) = y;
  s.rhs = gw_.pair(curvature_frame(x, w, z), yy);
  return s;
}

double gauss_equation_residual(const SubmanifoldScenario& sc, const Vec& x, const Vec& w, const Vec& z, const Vec& y,
                               const SamplePoint& p) {
  PointFrame pf = evaluate_frame(sc, p, 0, true);
  GWTable gw = gauss_weingarten(sc, pf);
  GaussEvaluator ev(sc, pf, gw);
  GaussSides s = ev.sides(x, w, z, y);
  return std::abs(s.lhs - s.rhs);
}

double cbar_block(const Mat& g, const Mat& phi, const Vec& eta, const Vec& x, const Vec& w, const Vec& z,
                  const Vec& y) {
  auto G = [&](const Vec& a, const Vec& b) { return a.dot(g * b); };
  auto e = [&](const Vec& a) { return eta.dot(a); };
  return G(x, y) * G(z, w) - G(z, x) * G(y, w) + e(z) * e(x) * G(y, w) - e(y) * e(x) * G(z, w) +
         e(y) * e(w) * G(z, x) - e(z) * e(w) * G(y, x) + G(phi * y, x) * G(phi * z, w) -
         G(phi * z, x) * G(phi * y, w) - 2.0 * G(phi * z, y) * G(phi * x, w);
}

double spaceform_curvature(const StructurePoint& sp, const MetricPoint& mp, double cbar, const Vec& x, const Vec& w,
                           const Vec& z, const Vec& y) {
  auto G = [&](const Vec& a, const Vec& b) { return mp.pair(a, b); };
  Mat nw = sp.nabla_phi(mp, w), nx = sp.nabla_phi(mp, x), ny = sp.nabla_phi(mp, y);
  Mat h = sp.h_tensor(mp);
  double ew = sp.eta_of(w), ex = sp.eta_of(x), ey = sp.eta_of(y), ez = sp.eta_of(z);
  double v = G(nw * z, nx * y) - G(nw * y, nx * z) - 2.0 * G(nw * x, ny * z);
  v += G(h * w, z) * G(h * x, y) - G(h * w, y) * G(h * x, z) - 2.0 * G(h * w, x) * G(h * y, z);
  v += -ew * ey * G(h * x, h * z) + ew * ez * G(h * x, h * y) + ex * ey * G(h * w, h * z) -
       ex * ez * G(h * w, h * y);
  v += cbar * cbar_block(mp.g, sp.phi, sp.eta.value, x, w, z, y);
  return 0.25 * v;
}

CbarEstimate cbar_from_values(double he_he, double b, double zero_tol) {
  if (b == 0.0)
    throw Error("b = eta(E) vanishes for E in D2, contradicting the ascreen condition");
  CbarEstimate c;
  c.b = b;
  c.he_he = he_he;
  c.value = he_he == 0.0 ? 0.0 : -he_he / (b * b);
  c.source = "ms455-formula";
  if (std::abs(he_he) <= zero_tol)
    c.sign_class = "zero";
  else if (he_he > 0.0)
    c.sign_class = "nonpositive (HE space-like)";
  else
    c.sign_class = "nonnegative (HE time-like)";
  return c;
}

CbarRoutes cbar_from_irrotational(const SubmanifoldScenario& sc, const GWTable& gw) {
  if (!gw.has_structure) throw Error("c-bar needs an almost contact structure");
  std::vector<int> d2 = indices(sc, sc.qgcr.d2);
  if (d2.empty()) throw Error("c-bar needs a D2 field");
  Vec e = gw.frame.col(d2.front());
  Vec he = gw.H * e;
  double b = gw.eta.dot(e);
  CbarRoutes out;
  out.estimate = cbar_from_values(he.dot(gw.metric * he), b);
  out.via_deta = e.dot(gw.deta * he) / (b * b);
  return out;
}

Theorem41Sides theorem41_sides(const GWTable& gw, const Vec& x, const Vec& z, double cbar) {
  const Mat t = gw.frame.leftCols(gw.m);
  Vec xa = t * x, za = t * z;
  Mat nz = Mat::Zero(gw.frame.rows(), gw.frame.rows());
  for (int a = 0; a < gw.m; ++a)
    if (z(a) != 0.0) nz += z(a) * gw.nabla_phi_frame[static_cast<std::size_t>(a)];
  Vec v = nz * xa;
  double zhx = za.dot(gw.metric * (gw.H * xa));
  Theorem41Sides s;
  s.lhs = cbar * xa.dot(gw.metric * xa) * za.dot(gw.metric * za);
  s.rhs = v.dot(gw.metric * v) + zhx * zhx;
  return s;
}

CheckRecord theorem41_relation(const SubmanifoldScenario& sc, const GWTable& gw, int point_index, const Vec& x,
                               const Vec& z, double cbar, bool umbilical_or_geodesic, double tol) {
  const char* id = "spaceform.theorem41";
  if (!gw.has_structure) return skip_record(id, point_index, "no almost contact structure");
  Theorem41Sides s = theorem41_sides(gw, x, z, cbar);
  std::string sides = fmt("lhs = %.6g, rhs = %.6g", s.lhs, s.rhs);
  if (!umbilical_or_geodesic) return skip_record(id, point_index, "not totally umbilical or geodesic; " + sides);
  Mat g = gw.gram();
  if (!(x.dot(g * x) > 0.0) || !(z.dot(g * z) > 0.0))
    return skip_record(id, point_index, "X and Z must be space-like; " + sides);
  // D0 and phi S parallel with respect to the induced connection.
  std::vector<Vec> d0v, psv;
  for (int k : indices(sc, sc.qgcr.d0)) d0v.push_back(gw.tangent_unit(k));
  for (int k : indices(sc, sc.qgcr.s)) psv.push_back(tangent_coords(gw, gw.phi * gw.frame.col(k)));
  double par = 0.0;
  for (const auto* set : {&d0v, &psv}) {
    Mat basis = columns(*set, gw.m);
    for (int a = 0; a < gw.m; ++a)
      for (const Vec& y : *set) par = std::max(par, span_residual(basis, gw.nabla(gw.tangent_unit(a), y)));
  }
  if (par > tol) return skip_record(id, point_index, fmt("D0 or phi S not parallel (residual %.3e); lhs = %.6g", par, s.lhs));
  bool ok = std::abs(s.lhs - s.rhs) <= tol && s.rhs >= -tol;
  return bool_record(id, point_index, ok, std::abs(s.lhs - s.rhs), tol, sides);
}

CheckRecord lems11_check(const SubmanifoldScenario& sc, const GWTable& gw, int point_index, double tol) {
  if (!gw.has_structure) return skip_record("lemmas.lems11", point_index, "no almost contact structure");
  MixedBases b = mixed_bases(sc, gw);
  const Mat t = gw.frame.leftCols(gw.m);
  double worst = 0.0;
  for (int p = 0; p < b.d.cols(); ++p)
    for (int k = 0; k < b.d.cols(); ++k) {
      Vec x = t * b.d.col(p), y = t * b.d.col(k);
      worst = std::max(worst, std::abs(y.dot(gw.metric * (gw.H * x)) + x.dot(gw.metric * (gw.H * y))));
    }
  return make_record("lemmas.lems11", point_index, worst, tol, "max |g(Y,HX) + g(X,HY)| over D");
}

}  // namespace nullgeo
