#include "nullgeo/nullsub.hpp"

#include <cmath>
#include <random>

#include <Eigen/SVD>

#include "nullgeo/errors.hpp"
#include "nullgeo/linalg.hpp"

namespace nullgeo {

std::vector<const NamedField*> SubmanifoldScenario::frame_fields() const {
  std::vector<const NamedField*> out;
  for (const auto* group : {&rad, &screen, &ltr, &stransversal})
    for (const auto& f : *group) out.push_back(&f);
  return out;
}

int SubmanifoldScenario::frame_index(const std::string& name) const {
  auto fields = frame_fields();
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (fields[i]->name == name) return static_cast<int>(i);
  return -1;
}

double uniform_draw(std::uint64_t bits, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(bits >> 11) * 0x1.0p-53;
}

SamplePoint embed(const SubmanifoldScenario& sc, const Vec& u, Mat* jacobian) {
  const int n = sc.n();
  const int m = sc.m();
  if (static_cast<int>(sc.param_map.size()) != n)
    throw DimensionError("parametrization needs one entry per ambient coordinate");
  if (u.size() != m) throw DimensionError("parameter vector has the wrong length");
  SamplePoint p;
  p.u = u;
  p.x.resize(n);
  if (jacobian) jacobian->resize(n, m);
  std::span<const double> us(u.data(), static_cast<std::size_t>(m));
  for (int a = 0; a < n; ++a) {
    const Expression& e = sc.param_map[static_cast<std::size_t>(a)];
    try {
      if (jacobian) {
        Jet2 j = e.eval_jet1(us, sc.bindings);
        p.x(a) = j.value;
        jacobian->row(a) = j.grad.transpose();
      } else {
        p.x(a) = e.eval(us, sc.bindings);
      }
    } catch (const DomainError& err) {
      throw DomainError("parametrization of " + sc.coords[static_cast<std::size_t>(a)] + " = " + e.render() +
                            " left its domain (" + err.what() + ")",
                        err.subexpression());
    }
  }
  return p;
}

std::vector<SamplePoint> sample_points(const SubmanifoldScenario& sc, int count, std::uint64_t seed) {
  std::vector<SamplePoint> out;
  if (count <= 0) return out;
  if (static_cast<int>(sc.boxes.size()) != sc.m()) throw DimensionError("one sampling box per parameter required");
  std::mt19937_64 rng(seed);
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Vec u(sc.m());
    for (int k = 0; k < sc.m(); ++k) {
      const SampleBox& b = sc.boxes[static_cast<std::size_t>(k)];
      u(k) = uniform_draw(rng(), b.lo, b.hi);
    }
    out.push_back(embed(sc, u));
  }
  return out;
}

PointFrame evaluate_frame(const SubmanifoldScenario& sc, const SamplePoint& p, int index, bool with_curvature) {
  PointFrame pf;
  pf.index = index;
  pf.r = sc.r();
  pf.q = sc.q();
  pf.m = sc.m();
  const int n = sc.n();
  if (static_cast<int>(sc.rad.size() + sc.screen.size()) != pf.m)
    throw DimensionError("radical and screen frames must together have one field per parameter");
  if (sc.ltr.size() != sc.rad.size()) throw DimensionError("ltr frame must match the radical frame in size");
  if (pf.m + pf.r + pf.q != n) throw DimensionError("frame sizes do not add up to the ambient dimension");
  embed(sc, p.u, &pf.jacobian);
  pf.point = p;
  std::span<const double> xs(p.x.data(), static_cast<std::size_t>(n));
  pf.mp = evaluate_metric(sc.metric, xs, sc.bindings, with_curvature);
  pf.frame.resize(n, n);
  int k = 0;
  for (const NamedField* f : sc.frame_fields()) {
    if (f->field.dim() != n) throw DimensionError("frame field " + f->name + " has the wrong number of components");
    pf.fields.push_back(evaluate_field(f->field, xs, sc.bindings));
    pf.frame.col(k++) = pf.fields.back().value;
  }
  if (!(condition_number(pf.frame) <= kMaxMetricCondition))
    throw FrameError("declared frame vectors are linearly dependent at point " + std::to_string(index));
  pf.lu.compute(pf.frame);
  return pf;
}

namespace {

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double smallest_relative_singular(const Mat& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Mat> svd(m);
  const Vec& s = svd.singularValues();
  if (s(0) == 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

}  // namespace

RadicalRank radical_rank(const PointFrame& pf, double rel_tol) {
  Mat t = pf.tangent();
  if (t.cols() == 0) return {};
  Mat gram = t.transpose() * pf.mp.g * t;
  Eigen::JacobiSVD<Mat> svd(gram, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  RadicalRank out;
  out.singular_values = s;
  const Eigen::Index m = s.size();
  double smax = s(0);
  Eigen::Index kept = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    if (s(i) > rel_tol * smax) ++kept;
  if (smax == 0.0) kept = 0;
  if (kept > 0 && kept < m) {
    double dropped = s(kept);
    if (dropped > 0.0 && s(kept - 1) < 10.0 * dropped)
      throw RankAmbiguityError("tangent Gram singular values " + std::to_string(s(kept - 1)) + " and " +
                               std::to_string(dropped) + " straddle the rank threshold");
  }
  out.rank = static_cast<int>(m - kept);
  out.kernel = svd.matrixV().rightCols(m - kept);
  return out;
}

Mat construct_ltr(const PointFrame& pf) {
  const int r = pf.r;
  const Eigen::Index n = pf.frame.rows();
  if (r == 0) return Mat(n, 0);
  const Mat& g = pf.mp.g;
  Mat others = hcat({pf.screen(), pf.stransversal()});
  // U = g-orthogonal complement of screen and screen transversal vectors.
  Mat u = kernel_basis(others.transpose() * g);
  if (u.cols() != 2 * r)
    throw FrameError("orthogonal complement of the screen bundles has dimension " + std::to_string(u.cols()) +
                     ", expected " + std::to_string(2 * r));
  Mat e = pf.radical();
  Mat e_in_u = u.transpose() * e;  // 2r x r
  Mat comp = kernel_basis(e_in_u.transpose());
  if (comp.cols() != r) throw FrameError("radical frame is not contained in the complement of the screen bundles");
  Mat v = u * comp;           // n x r
  Mat pairing = e.transpose() * g * v;  // pairing(j,k) = g(E_j, V_k)
  Eigen::FullPivLU<Mat> plu(pairing);
  if (!plu.isInvertible()) throw FrameError("radical frame pairs degenerately with its complement");
  Mat np = v * plu.inverse();  // g(E_i, N'_j) = delta_ij
  Mat gp = np.transpose() * g * np;
  return np - 0.5 * e * gp;
}

Vec GWTable::nabla_bar(const Vec& x, const Vec& y) const {
  Vec yy = Vec::Zero(n());
  yy.head(m) = y;
  Vec out = Vec::Zero(n());
  for (int a = 0; a < m; ++a)
    if (x(a) != 0.0) out += x(a) * (C[static_cast<std::size_t>(a)] * yy);
  return out;
}

Vec GWTable::nabla_bar_field(const Vec& x, int k) const {
  Vec out = Vec::Zero(n());
  for (int a = 0; a < m; ++a)
    if (x(a) != 0.0) out += x(a) * C[static_cast<std::size_t>(a)].col(k);
  return out;
}

Vec GWTable::h(const Vec& x, const Vec& y) const {
  Vec c = nabla_bar(x, y);
  c.head(m).setZero();
  return c;
}

Vec GWTable::a_star(int i, const Vec& x) const {
  Vec c = nabla_bar_field(x, i).head(m);
  c.head(r).setZero();
  return -c;
}

GWTable gauss_weingarten(const SubmanifoldScenario& sc, const PointFrame& pf) {
  GWTable gw;
  gw.r = pf.r;
  gw.m = pf.m;
  gw.q = pf.q;
  const int n = gw.n();
  gw.frame = pf.frame;
  gw.frame_inv = pf.lu.inverse();
  gw.metric = pf.mp.g;
  const MetricPoint& mp = pf.mp;
  gw.frame_gram = pf.frame.transpose() * mp.g * pf.frame;
  for (int a = 0; a < gw.m; ++a) {
    Vec t = pf.frame.col(a);
    Mat c(n, n);
    Mat ambient(n, n);
    for (int k = 0; k < n; ++k) ambient.col(k) = mp.cov_deriv(t, pf.fields[static_cast<std::size_t>(k)]);
    c = pf.lu.solve(ambient);
    gw.C.push_back(std::move(c));
    // T_a(g(F_j, F_k)) through the product rule on components.
    Mat dgt = Mat::Zero(n, n);
    for (int l = 0; l < n; ++l)
      if (t(l) != 0.0) dgt += t(l) * mp.dg[static_cast<std::size_t>(l)];
    Mat jt(n, n);  // column k = directional derivative of F_k's components
    for (int k = 0; k < n; ++k) jt.col(k) = pf.fields[static_cast<std::size_t>(k)].jacobian * t;
    Mat d = jt.transpose() * mp.g * pf.frame + pf.frame.transpose() * dgt * pf.frame +
            pf.frame.transpose() * mp.g * jt;
    gw.dgyz.push_back(std::move(d));
  }
  if (sc.structure) {
    std::span<const double> xs(pf.point.x.data(), static_cast<std::size_t>(n));
    StructurePoint sp = evaluate_structure(*sc.structure, xs, sc.bindings);
    gw.has_structure = true;
    gw.phi = sp.phi;
    gw.eta = sp.eta.value;
    gw.xi = sp.xi.value;
    gw.H = sp.h_tensor(mp);
    const Mat& je = sp.eta.jacobian;
    gw.deta = 0.5 * (je.transpose() - je);
    for (int k = 0; k < n; ++k) gw.nabla_phi_frame.push_back(sp.nabla_phi(mp, pf.frame.col(k)));
  }
  return gw;
}

Vec second_fundamental(const GWTable& gw, const Vec& x, const Vec& y) { return gw.ambient(gw.h(x, y)); }

std::vector<CheckRecord> frame_relation_checks(const SubmanifoldScenario& sc, const PointFrame& pf, double tol) {
  std::vector<CheckRecord> out;
  const int idx = pf.index;
  const int r = pf.r, m = pf.m;
  const Mat& g = pf.mp.g;
  std::span<const double> xs(pf.point.x.data(), static_cast<std::size_t>(pf.point.x.size()));

  out.push_back(make_record("frames.metric_symmetry", idx, metric_asymmetry(sc.metric, xs, sc.bindings),
                            tol * 1e-3, "g_ab = g_ba"));
  Signature obs = observed_signature(g);
  double sig_diff = std::abs(obs.negative - sc.metric.signature.negative) +
                    std::abs(obs.positive - sc.metric.signature.positive);
  out.push_back(bool_record("frames.metric_signature", idx, obs == sc.metric.signature, sig_diff, 0.0,
                            "observed (" + std::to_string(obs.negative) + "," + std::to_string(obs.positive) +
                                "), declared (" + std::to_string(sc.metric.signature.negative) + "," +
                                std::to_string(sc.metric.signature.positive) + ")"));

  Mat t = pf.tangent();
  auto fields = sc.frame_fields();
  for (int a = 0; a < m; ++a)
    out.push_back(make_record("frames.pushforward." + fields[static_cast<std::size_t>(a)]->name, idx,
                              span_residual(pf.jacobian, t.col(a)), tol, "tangent to the parametrization"));
  out.push_back(make_record("frames.tangent_span", idx, span_equality_residual(pf.jacobian, t), tol,
                            "tangent frame spans TM"));

  Mat e = pf.radical();
  Mat x = pf.screen();
  Mat nn = pf.ltr();
  Mat w = pf.stransversal();
  out.push_back(make_record("frames.rad_gram", idx, max_abs(e.transpose() * g * e), tol, "g(E_i,E_j) = 0"));
  out.push_back(make_record("frames.rad_orthogonal", idx, max_abs(e.transpose() * g * x), tol, "g(E_i,X_a) = 0"));
  double screen_ratio = smallest_relative_singular(x.transpose() * g * x);
  out.push_back(bool_record("frames.screen_nondegenerate", idx, screen_ratio > sc.rank_tol, screen_ratio,
                            sc.rank_tol, "smallest relative singular value of the screen Gram matrix"));
  out.push_back(make_record("frames.ltr_pairing", idx,
                            max_abs(e.transpose() * g * nn - Mat::Identity(r, r)), tol, "g(E_i,N_j) = delta_ij"));
  out.push_back(make_record("frames.ltr_null", idx, max_abs(nn.transpose() * g * nn), tol, "g(N_i,N_j) = 0"));
  out.push_back(make_record("frames.ltr_screen", idx, max_abs(nn.transpose() * g * x), tol, "g(N_i,X_a) = 0"));
  out.push_back(make_record("frames.stransversal_tangent", idx, max_abs(w.transpose() * g * t), tol,
                            "W orthogonal to TM"));
  out.push_back(make_record("frames.stransversal_ltr", idx, max_abs(w.transpose() * g * nn), tol,
                            "W orthogonal to ltr(TM)"));
  double w_ratio = smallest_relative_singular(w.transpose() * g * w);
  out.push_back(bool_record("frames.stransversal_nondegenerate", idx, w_ratio > sc.rank_tol, w_ratio, sc.rank_tol,
                            "screen transversal Gram matrix nondegenerate"));

  try {
    RadicalRank rr = radical_rank(pf, sc.rank_tol);
    out.push_back(bool_record("frames.radical_rank", idx, rr.rank == r, rr.rank, r,
                              "kernel dimension " + std::to_string(rr.rank) + ", declared " + std::to_string(r)));
    Mat declared = Mat::Identity(m, m).leftCols(r);
    out.push_back(make_record("frames.radical_kernel", idx, span_equality_residual(rr.kernel, declared), tol,
                              "kernel of the tangent Gram matrix equals span of the radical frame"));
  } catch (const Error& err) {
    out.push_back(bool_record("frames.radical_rank", idx, false, 1e300, r, err.what()));
  }

  if (r > 0) {
    try {
      Mat built = construct_ltr(pf);
      out.push_back(make_record("frames.ltr_construction", idx, span_equality_residual(built, nn), tol * 10.0,
                                "constructed ltr spans the declared ltr"));
    } catch (const Error& err) {
      out.push_back(bool_record("frames.ltr_construction", idx, false, 1e300, tol, err.what()));
    }
  }
  return out;
}

std::vector<CheckRecord> gw_checks(const GWTable& gw, const PointFrame& pf, int point_index, double tol,
                                   int extra_pairs, std::uint64_t seed) {
  std::vector<CheckRecord> out;
  const int r = gw.r, m = gw.m, q = gw.q;
  const int n = gw.n();
  (void)q;

  // Argument pairs: every frame pair plus random constant combinations.
  std::vector<std::pair<Vec, Vec>> pairs;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) pairs.emplace_back(gw.tangent_unit(a), gw.tangent_unit(b));
  std::mt19937_64 rng(seed);
  for (int k = 0; k < extra_pairs; ++k) {
    Vec x(m), y(m);
    for (int a = 0; a < m; ++a) x(a) = uniform_draw(rng(), -1.0, 1.0);
    for (int a = 0; a < m; ++a) y(a) = uniform_draw(rng(), -1.0, 1.0);
    pairs.emplace_back(x, y);
  }

  double recon = 0.0, sym = 0.0, hl_pair = 0.0;
  for (const auto& [x, y] : pairs) {
    // Direct ambient derivative of the combination Y along X.
    FieldJet yj;
    yj.value = Vec::Zero(n);
    yj.jacobian = Mat::Zero(n, n);
    for (int b = 0; b < m; ++b) {
      yj.value += y(b) * pf.fields[static_cast<std::size_t>(b)].value;
      yj.jacobian += y(b) * pf.fields[static_cast<std::size_t>(b)].jacobian;
    }
    Vec direct = pf.mp.cov_deriv(gw.ambient([&] {
                                   Vec c = Vec::Zero(n);
                                   c.head(m) = x;
                                   return c;
                                 }()),
                                 yj);
    Vec c = gw.nabla_bar(x, y);
    Vec tangential = Vec::Zero(n);
    tangential.head(m) = c.head(m);
    Vec resum = gw.ambient(tangential) + gw.ambient(gw.h(x, y));
    recon = std::max(recon, (direct - resum).norm() / std::max(1.0, direct.norm()));
    sym = std::max(sym, (gw.h(x, y) - gw.h(y, x)).cwiseAbs().maxCoeff());
    for (int i = 0; i < r; ++i) hl_pair = std::max(hl_pair, std::abs(gw.pair(c, gw.unit(i)) - c(m + i)));
  }
  out.push_back(make_record("gw.reconstruction", point_index, recon, tol,
                            "nabla-bar_X Y = nabla_X Y + h^l + h^s re-sums"));
  out.push_back(make_record("gw.h_symmetry", point_index, sym, tol, "h(X,Y) = h(Y,X)"));
  out.push_back(make_record("gw.hl_pairing", point_index, hl_pair, tol, "h^l_i(X,Y) = g(nabla-bar_X Y, E_i)"));

  // Non-metricity of the induced connection against the lambda formula.
  double nonmetric = 0.0;
  for (int a = 0; a < m; ++a) {
    Vec x = gw.tangent_unit(a);
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        Vec yb = gw.unit(b), zc = gw.unit(c);
        Vec ny = Vec::Zero(n), nz = Vec::Zero(n);
        ny.head(m) = gw.nabla(x, gw.tangent_unit(b));
        nz.head(m) = gw.nabla(x, gw.tangent_unit(c));
        double lhs = gw.dgyz[static_cast<std::size_t>(a)](b, c) - gw.pair(ny, zc) - gw.pair(yb, nz);
        double rhs = 0.0;
        Vec hb = gw.hl(x, gw.tangent_unit(b)), hc = gw.hl(x, gw.tangent_unit(c));
        for (int i = 0; i < r; ++i)
          rhs += hb(i) * gw.frame_gram(c, m + i) + hc(i) * gw.frame_gram(b, m + i);
        nonmetric = std::max(nonmetric, std::abs(lhs - rhs));
      }
  }
  out.push_back(make_record("gw.nonmetricity", point_index, nonmetric, tol,
                            "(nabla_X g)(Y,Z) = sum h^l_i(X,Y) lambda_i(Z) + h^l_i(X,Z) lambda_i(Y)"));

  double screen_metric = 0.0, astar = 0.0;
  for (int a = 0; a < m; ++a) {
    Vec x = gw.tangent_unit(a);
    for (int b = r; b < m; ++b)
      for (int c = r; c < m; ++c) {
        Vec sb = Vec::Zero(n), sc = Vec::Zero(n);
        sb.segment(r, m - r) = gw.nabla(x, gw.tangent_unit(b)).segment(r, m - r);
        sc.segment(r, m - r) = gw.nabla(x, gw.tangent_unit(c)).segment(r, m - r);
        double v = gw.dgyz[static_cast<std::size_t>(a)](b, c) - gw.pair(sb, gw.unit(c)) - gw.pair(gw.unit(b), sc);
        screen_metric = std::max(screen_metric, std::abs(v));
      }
    for (int i = 0; i < r; ++i) {
      Vec as = Vec::Zero(n);
      as.head(m) = gw.a_star(i, x);
      for (int c = r; c < m; ++c)
        astar = std::max(astar, std::abs(gw.pair(as, gw.unit(c)) - gw.hl(x, gw.tangent_unit(c))(i)));
    }
  }
  out.push_back(make_record("gw.screen_metric", point_index, screen_metric, tol, "screen connection is metric"));
  out.push_back(make_record("gw.astar_pairing", point_index, astar, tol, "g(A*_{E_i} X, PZ) = h^l_i(X, PZ)"));

  double tau = 0.0;
  for (int a = 0; a < m; ++a) {
    Vec x = gw.tangent_unit(a);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) tau = std::max(tau, std::abs(gw.tau(i, j, x) - gw.tau_from_radical(i, j, x)));
  }
  out.push_back(make_record("gw.tau_consistency", point_index, tau, tol,
                            "tau from nabla-bar N agrees with tau from nabla E"));
  return out;
}

}  // namespace nullgeo
