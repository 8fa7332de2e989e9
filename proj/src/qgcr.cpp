#include "nullgeo/qgcr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/SVD>

#include "nullgeo/errors.hpp"
#include "nullgeo/linalg.hpp"

namespace nullgeo {

namespace {

std::vector<int> lookup(const SubmanifoldScenario& sc, const std::vector<std::string>& names, int lo, int hi,
                        const char* role) {
  std::vector<int> out;
  for (const auto& name : names) {
    int k = sc.frame_index(name);
    if (k < 0) throw FrameError(std::string("QGCR declaration names unknown field '") + name + "'");
    if (k < lo || k >= hi) throw FrameError("field '" + name + "' cannot belong to " + role);
    out.push_back(k);
  }
  return out;
}

Mat gather(const Mat& frame, const std::vector<int>& idx) {
  Mat out(frame.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = frame.col(idx[j]);
  return out;
}

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_structure(const GWTable& gw) {
  if (!gw.has_structure) throw Error("QGCR checks need an almost contact structure");
}

}  // namespace

QgcrIndices resolve_qgcr(const SubmanifoldScenario& sc) {
  const int r = sc.r(), m = sc.m(), n = sc.n();
  QgcrIndices ix;
  ix.d1 = lookup(sc, sc.qgcr.d1, 0, r, "D1 (radical)");
  ix.d2 = lookup(sc, sc.qgcr.d2, 0, r, "D2 (radical)");
  ix.d0 = lookup(sc, sc.qgcr.d0, r, m, "D0 (screen)");
  ix.l = lookup(sc, sc.qgcr.l, m, m + r, "L (ltr)");
  ix.s = lookup(sc, sc.qgcr.s, m + r, n, "S (screen transversal)");
  ix.phi_d2 = lookup(sc, sc.qgcr.phi_d2, r, m, "phi D2 (screen)");
  ix.phi_l = lookup(sc, sc.qgcr.phi_l, r, m, "phi L (screen)");
  ix.phi_s = lookup(sc, sc.qgcr.phi_s, r, m, "phi S (screen)");
  return ix;
}

QgcrVerdict verify_qgcr(const SubmanifoldScenario& sc, const GWTable& gw, int point_index, double tol) {
  require_structure(gw);
  QgcrIndices ix = resolve_qgcr(sc);
  QgcrVerdict v;
  const int r = gw.r, m = gw.m;
  v.dims = {r, static_cast<int>(ix.d1.size()), static_cast<int>(ix.d2.size()), static_cast<int>(ix.d0.size()), m,
            gw.n()};
  auto& out = v.records;
  const Mat& metric = gw.metric;

  // Rad TM = D1 + D2 with every radical field used exactly once.
  std::vector<int> rad_used = ix.d1;
  rad_used.insert(rad_used.end(), ix.d2.begin(), ix.d2.end());
  std::sort(rad_used.begin(), rad_used.end());
  bool split_ok = static_cast<int>(rad_used.size()) == r &&
                  std::adjacent_find(rad_used.begin(), rad_used.end()) == rad_used.end();
  out.push_back(bool_record("qgcr.rad_split", point_index, split_ok, static_cast<double>(rad_used.size()), r,
                            "Rad TM = D1 + D2"));

  Mat d1 = gather(gw.frame, ix.d1), d2 = gather(gw.frame, ix.d2), d0 = gather(gw.frame, ix.d0);
  Mat l = gather(gw.frame, ix.l), s = gather(gw.frame, ix.s);
  Mat screen = gw.frame.block(0, r, gw.frame.rows(), m - r);
  Mat phi_d1 = gw.phi * d1, phi_d2 = gw.phi * d2, phi_d0 = gw.phi * d0;
  Mat phi_l = gw.phi * l, phi_s = gw.phi * s;

  out.push_back(make_record("qgcr.d1_invariant", point_index, span_equality_residual(d1, phi_d1), tol, "phi D1 = D1"));
  out.push_back(make_record("qgcr.d2_into_screen", point_index, span_inclusion_residual(screen, phi_d2), tol,
                            "phi D2 in S(TM)"));
  Mat parts = hcat({phi_d2, phi_s, phi_l, d0});
  out.push_back(make_record("qgcr.screen_split", point_index, span_equality_residual(screen, parts), tol,
                            "S(TM) = {phi D2 + phi S + phi L} + D0"));
  Mat image = hcat({phi_d2, phi_s, phi_l});
  out.push_back(make_record("qgcr.d0_orthogonal", point_index, max_abs(d0.transpose() * metric * image), tol,
                            "D0 orthogonal to phi D2 and D-bar"));
  out.push_back(make_record("qgcr.d0_invariant", point_index, span_inclusion_residual(d0, phi_d0), tol,
                            "phi D0 in D0"));
  if (d0.cols() > 0) {
    Eigen::JacobiSVD<Mat> svd(d0.transpose() * metric * d0);
    const Vec& sv = svd.singularValues();
    double ratio = sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;
    out.push_back(bool_record("qgcr.d0_nondegenerate", point_index, ratio > sc.rank_tol, ratio, sc.rank_tol,
                              "D0 nondegenerate"));
  }
  auto declared_image = [&](const char* id, const std::vector<int>& idx, const Mat& computed) {
    if (idx.empty()) return;
    out.push_back(make_record(id, point_index, span_equality_residual(gather(gw.frame, idx), computed), tol,
                              "declared image spans the computed image"));
  };
  declared_image("qgcr.declared_phi_d2", ix.phi_d2, phi_d2);
  declared_image("qgcr.declared_phi_l", ix.phi_l, phi_l);
  declared_image("qgcr.declared_phi_s", ix.phi_s, phi_s);

  const int codim = gw.n() - m;
  bool nonexist_ok = r < std::min(m, codim);
  out.push_back(bool_record("qgcr.not_coisotropic", point_index, nonexist_ok, r, std::min(m, codim),
                            "proper QGCR needs r < min(dim M, codim M)"));

  v.qgcr = std::all_of(out.begin(), out.end(), [](const CheckRecord& c) { return c.verdict != Verdict::Fail; });
  v.proper = v.qgcr && v.dims.d1 > 0 && v.dims.d0 > 0 && v.dims.d2 > 0 && !ix.s.empty();
  if (v.proper) {
    const QgcrDims& d = v.dims;
    bool ok = d.r >= 3 && d.d1 >= 2 && d.d0 + d.d1 >= 4 && d.m >= 7 && d.n >= 11;
    out.push_back(bool_record("qgcr.dim_bounds", point_index, ok, d.m, 7,
                              "proper: r >= 3, dim D1 >= 2, dim D >= 4, dim M >= 7, dim ambient >= 11"));
  } else {
    out.push_back(skip_record("qgcr.dim_bounds", point_index, "not a proper QGCR declaration"));
  }
  return v;
}

XiDecomposition xi_decompose(const GWTable& gw) {
  require_structure(gw);
  const int r = gw.r, m = gw.m, q = gw.q;
  XiDecomposition d;
  d.a.resize(r);
  d.b.resize(r);
  d.c.resize(q);
  for (int i = 0; i < r; ++i) {
    d.a(i) = gw.eta.dot(gw.frame.col(m + i));
    d.b(i) = gw.eta.dot(gw.frame.col(i));
  }
  Vec eps = gw.eps();
  for (int k = 0; k < q; ++k) d.c(k) = gw.eta.dot(gw.frame.col(m + r + k)) / eps(k);
  Vec coords = gw.coords(gw.xi);
  d.xi_s = coords.segment(r, m - r);
  Vec rebuilt = gw.frame.block(0, r, gw.frame.rows(), m - r) * d.xi_s + gw.frame.leftCols(r) * d.a +
                gw.frame.block(0, m, gw.frame.rows(), r) * d.b + gw.frame.rightCols(q) * d.c;
  d.residual = (gw.xi - rebuilt).norm();
  return d;
}

std::vector<CheckRecord> verify_ascreen(const SubmanifoldScenario& sc, const GWTable& gw, int point_index,
                                        double tol) {
  require_structure(gw);
  QgcrIndices ix = resolve_qgcr(sc);
  const int r = gw.r, m = gw.m;
  std::vector<CheckRecord> out;
  XiDecomposition d = xi_decompose(gw);
  out.push_back(make_record("ascreen.xi_reconstruction", point_index, d.residual, tol,
                            "xi = xi_S + a E + b N + c W from eta pairings"));
  Mat rad_ltr = hcat({gw.frame.leftCols(r), gw.frame.block(0, m, gw.frame.rows(), r)});
  double off = std::max(d.xi_s.size() ? d.xi_s.cwiseAbs().maxCoeff() : 0.0,
                        d.c.size() ? d.c.cwiseAbs().maxCoeff() : 0.0);
  out.push_back(make_record("ascreen.xi_in_rad_ltr", point_index, std::max(span_residual(rad_ltr, gw.xi), off), tol,
                            "xi_S = 0 and c = 0"));
  Mat d2l(gw.frame.rows(), static_cast<Eigen::Index>(ix.d2.size() + ix.l.size()));
  int k = 0;
  for (int i : ix.d2) d2l.col(k++) = gw.frame.col(i);
  for (int i : ix.l) d2l.col(k++) = gw.frame.col(i);
  out.push_back(make_record("ascreen.xi_in_d2_l", point_index, span_residual(d2l, gw.xi), tol, "xi in D2 + L"));
  if (r == 3) {
    Mat pl(gw.frame.rows(), static_cast<Eigen::Index>(ix.l.size()));
    Mat pd(gw.frame.rows(), static_cast<Eigen::Index>(ix.d2.size()));
    for (std::size_t j = 0; j < ix.l.size(); ++j) pl.col(static_cast<Eigen::Index>(j)) = gw.phi * gw.frame.col(ix.l[j]);
    for (std::size_t j = 0; j < ix.d2.size(); ++j)
      pd.col(static_cast<Eigen::Index>(j)) = gw.phi * gw.frame.col(ix.d2[j]);
    double res = (pl.cols() == 0 || pd.cols() == 0) ? 1.0 : span_equality_residual(pl, pd);
    out.push_back(make_record("ascreen.phi_l_eq_phi_d2", point_index, res, tol, "phi L = phi D2"));
  } else {
    out.push_back(skip_record("ascreen.phi_l_eq_phi_d2", point_index, "stated for 3-null submanifolds only"));
  }
  return out;
}

CheckRecord lemma52_check(const SubmanifoldScenario& sc, const GWTable& gw, int point_index, bool ascreen,
                          double tol) {
  if (!ascreen) return skip_record("lemmas.lemma52", point_index, "not ascreen");
  require_structure(gw);
  QgcrIndices ix = resolve_qgcr(sc);
  if (ix.d2.size() != 1 || ix.l.size() != 1)
    return skip_record("lemmas.lemma52", point_index, "needs one-dimensional D2 and L");
  Vec e = gw.frame.col(ix.d2[0]);
  Vec nv = gw.frame.col(ix.l[0]);
  double ee = gw.eta.dot(e), en = gw.eta.dot(nv);
  Vec split = en * e + ee * nv;
  char buf[160];
  std::snprintf(buf, sizeof buf, "eta(E)=%.12g eta(N)=%.12g; |xi - eta(N)E - eta(E)N| = %.3e", ee, en,
                (gw.xi - split).norm());
  return make_record("lemmas.lemma52", point_index, std::abs(2.0 * ee * en - 1.0), tol, buf);
}

}  // namespace nullgeo
