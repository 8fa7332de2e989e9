#include "nullgeo/contact.hpp"

#include <cmath>

#include "nullgeo/errors.hpp"

namespace nullgeo {

namespace {

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Gamma(X)^a_c = Gamma^a_{kc} X^k
Mat gamma_along(const MetricPoint& mp, const Vec& along) {
  const int n = mp.dim();
  Mat out(n, n);
  for (int a = 0; a < n; ++a) out.row(a) = along.transpose() * mp.gamma[static_cast<std::size_t>(a)];
  return out;
}

void check_dims(const AlmostContactStructure& s, const MetricField& g) {
  if (s.dim != g.dim || s.xi.dim() != g.dim || s.eta.dim() != g.dim ||
      static_cast<int>(s.phi.size()) != g.dim * g.dim)
    throw DimensionError("almost contact structure and metric dimensions disagree");
  if (g.dim % 2 == 0) throw DimensionError("almost contact structures need an odd-dimensional ambient");
}

Vec basis(int n, int k) {
  Vec e = Vec::Zero(n);
  e(k) = 1.0;
  return e;
}

}  // namespace

Mat StructurePoint::nabla_phi(const MetricPoint& mp, const Vec& along) const {
  const int n = dim();
  Mat out = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k)
    if (along(k) != 0.0) out += along(k) * dphi[static_cast<std::size_t>(k)];
  Mat gx = gamma_along(mp, along);
  out += gx * phi - phi * gx;
  return out;
}

Mat StructurePoint::h_tensor(const MetricPoint& mp) const {
  const int n = dim();
  Mat nabla_xi(n, n);  // column k = nabla_{e_k} xi
  for (int k = 0; k < n; ++k) nabla_xi.col(k) = mp.cov_deriv(basis(n, k), xi);
  return -nabla_xi;
}

double StructurePoint::d_eta(const FieldJet& x, const FieldJet& y) const {
  double x_eta_y = y.value.dot(eta.jacobian * x.value) + eta.value.dot(y.jacobian * x.value);
  double y_eta_x = x.value.dot(eta.jacobian * y.value) + eta.value.dot(x.jacobian * y.value);
  Vec bracket = y.jacobian * x.value - x.jacobian * y.value;
  return 0.5 * (x_eta_y - y_eta_x - eta.value.dot(bracket));
}

StructurePoint evaluate_structure(const AlmostContactStructure& s, std::span<const double> point,
                                  const Bindings& bindings) {
  const int n = s.dim;
  StructurePoint sp;
  sp.phi = Mat::Zero(n, n);
  sp.dphi.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Expression& e = s.phi[static_cast<std::size_t>(a * n + b)];
      if (e.is_constant_zero()) continue;
      Jet2 j = e.eval_jet1(point, bindings);
      sp.phi(a, b) = j.value;
      for (int k = 0; k < n; ++k) sp.dphi[static_cast<std::size_t>(k)](a, b) = j.grad(k);
    }
  sp.xi = evaluate_field(s.xi, point, bindings);
  sp.eta = evaluate_field(s.eta, point, bindings);
  return sp;
}

std::vector<CheckRecord> verify_acms(const AlmostContactStructure& s, const MetricField& g,
                                     std::span<const Vec> points, const Bindings& bindings, double tol) {
  check_dims(s, g);
  std::vector<CheckRecord> out;
  const int n = g.dim;
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::span<const double> p(points[i].data(), static_cast<std::size_t>(points[i].size()));
    const int idx = static_cast<int>(i);
    MetricPoint mp = evaluate_metric(g, p, bindings);
    StructurePoint sp = evaluate_structure(s, p, bindings);
    const Vec& xi = sp.xi.value;
    const Vec& eta = sp.eta.value;
    Mat phi2 = sp.phi * sp.phi + Mat::Identity(n, n) - xi * eta.transpose();
    out.push_back(make_record("acms.phi_squared", idx, max_abs(phi2), tol, "phi^2 = -I + eta (x) xi"));
    out.push_back(make_record("acms.eta_xi", idx, std::abs(eta.dot(xi) - 1.0), tol, "eta(xi) = 1"));
    out.push_back(make_record("acms.eta_phi", idx, max_abs(eta.transpose() * sp.phi), tol, "eta o phi = 0"));
    out.push_back(make_record("acms.phi_xi", idx, max_abs(sp.phi * xi), tol, "phi xi = 0"));
    Mat compat = sp.phi.transpose() * mp.g * sp.phi - mp.g + eta * eta.transpose();
    out.push_back(make_record("acms.metric_compat", idx, max_abs(compat), tol,
                              "g(phi X, phi Y) = g(X,Y) - eta(X) eta(Y)"));
    out.push_back(make_record("acms.eta_metric", idx, max_abs(eta - mp.g * xi), tol, "eta(X) = g(xi, X)"));
  }
  return out;
}

Vec nabla_phi(const AlmostContactStructure& s, const MetricField& g, const VectorField& x, const VectorField& y,
              std::span<const double> point, const Bindings& bindings) {
  check_dims(s, g);
  MetricPoint mp = evaluate_metric(g, point, bindings);
  StructurePoint sp = evaluate_structure(s, point, bindings);
  FieldJet fx = evaluate_field(x, point, bindings);
  FieldJet fy = evaluate_field(y, point, bindings);
  // nabla_X(phi Y) - phi(nabla_X Y), assembled from the field derivatives.
  const int n = g.dim;
  FieldJet phi_y;
  phi_y.value = sp.phi * fy.value;
  phi_y.jacobian = sp.phi * fy.jacobian;
  for (int k = 0; k < n; ++k) phi_y.jacobian.col(k) += sp.dphi[static_cast<std::size_t>(k)] * fy.value;
  return mp.cov_deriv(fx.value, phi_y) - sp.phi * mp.cov_deriv(fx.value, fy);
}

double nearly_cosymplectic_value(const StructurePoint& sp, const MetricPoint& mp,
                                 std::span<const std::pair<Vec, Vec>> pairs) {
  const int n = sp.dim();
  double worst = 0.0;
  if (pairs.empty()) {
    std::vector<Mat> np;
    np.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) np.push_back(sp.nabla_phi(mp, basis(n, k)));
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b)
        worst = std::max(worst, (np[static_cast<std::size_t>(a)].col(b) + np[static_cast<std::size_t>(b)].col(a)).norm());
    return worst;
  }
  for (const auto& [x, y] : pairs)
    worst = std::max(worst, (sp.nabla_phi(mp, x) * y + sp.nabla_phi(mp, y) * x).norm());
  return worst;
}

std::vector<CheckRecord> nearly_cosymplectic_residual(const AlmostContactStructure& s, const MetricField& g,
                                                      std::span<const Vec> points, const Bindings& bindings,
                                                      std::span<const std::pair<Vec, Vec>> pairs, double tol) {
  check_dims(s, g);
  std::vector<CheckRecord> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::span<const double> p(points[i].data(), static_cast<std::size_t>(points[i].size()));
    MetricPoint mp = evaluate_metric(g, p, bindings);
    StructurePoint sp = evaluate_structure(s, p, bindings);
    out.push_back(make_record("nearly-cosymplectic.symmetric_part", static_cast<int>(i),
                              nearly_cosymplectic_value(sp, mp, pairs), tol,
                              "(nabla_X phi)Y + (nabla_Y phi)X = 0"));
  }
  return out;
}

double d_eta(const AlmostContactStructure& s, const VectorField& x, const VectorField& y,
             std::span<const double> point, const Bindings& bindings) {
  StructurePoint sp = evaluate_structure(s, point, bindings);
  return sp.d_eta(evaluate_field(x, point, bindings), evaluate_field(y, point, bindings));
}

std::vector<CheckRecord> h_tensor_checks(const StructurePoint& sp, const MetricPoint& mp, int point_index,
                                         bool nearly_cosymplectic, double tol) {
  static const char* ids[] = {"nearly-cosymplectic.h_skew", "nearly-cosymplectic.h_xi",
                              "nearly-cosymplectic.eta_h", "nearly-cosymplectic.h_phi_anticommute",
                              "nearly-cosymplectic.nabla_phi_xi"};
  std::vector<CheckRecord> out;
  if (!nearly_cosymplectic) {
    for (const char* id : ids) out.push_back(skip_record(id, point_index, "structure is not nearly cosymplectic"));
    return out;
  }
  const int n = sp.dim();
  Mat h = sp.h_tensor(mp);
  Mat gh = mp.g * h;
  out.push_back(make_record(ids[0], point_index, max_abs(gh + gh.transpose()), tol, "g(HX,Y) = -g(X,HY)"));
  out.push_back(make_record(ids[1], point_index, max_abs(h * sp.xi.value), tol, "H xi = 0"));
  out.push_back(make_record(ids[2], point_index, max_abs(sp.eta.value.transpose() * h), tol, "eta o H = 0"));
  out.push_back(make_record(ids[3], point_index, max_abs(h * sp.phi + sp.phi * h), tol, "H phi + phi H = 0"));
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    Vec e = basis(n, k);
    worst = std::max(worst, (sp.nabla_phi(mp, e) * sp.xi.value - sp.phi * h * e).norm());
  }
  out.push_back(make_record(ids[4], point_index, worst, tol, "(nabla_X phi) xi = phi H X"));
  return out;
}

std::pair<double, double> lemma22_residuals(const StructurePoint& sp, const MetricPoint& mp, const Vec& x,
                                            const Vec& y) {
  Mat h = sp.h_tensor(mp);
  Mat npx = sp.nabla_phi(mp, x);
  Vec hx = h * x;
  Vec hy = h * y;
  const Vec& xi = sp.xi.value;
  Vec lhs1 = npx * (sp.phi * y);
  Vec rhs1 = -sp.phi * (npx * y) - mp.pair(y, hx) * xi - sp.eta_of(y) * hx;
  Vec lhs2 = sp.nabla_phi(mp, sp.phi * x) * (sp.phi * y);
  Vec rhs2 = -(npx * y) - sp.eta_of(x) * (sp.phi * hy) + sp.eta_of(y) * (sp.phi * hx);
  return {(lhs1 - rhs1).norm(), (lhs2 - rhs2).norm()};
}

std::vector<CheckRecord> structure_lemma_checks(const StructurePoint& sp, const MetricPoint& mp, int point_index,
                                                bool nearly_cosymplectic, double tol) {
  const int n = sp.dim();
  std::vector<CheckRecord> out;
  double skew = 0.0;
  for (int k = 0; k < n; ++k) {
    Mat gm = mp.g * sp.nabla_phi(mp, basis(n, k));
    skew = std::max(skew, max_abs(gm + gm.transpose()));
  }
  out.push_back(make_record("lemmas.nabla_phi_skew", point_index, skew, tol,
                            "g((nabla_Z phi)X, Y) = -g(X, (nabla_Z phi)Y)"));
  if (!nearly_cosymplectic) {
    const char* reason = "structure is not nearly cosymplectic";
    out.push_back(skip_record("lemmas.deta_h", point_index, reason));
    out.push_back(skip_record("lemmas.nabla_phi_phi", point_index, reason));
    out.push_back(skip_record("lemmas.nabla_phiphi_phi", point_index, reason));
    return out;
  }
  Mat h = sp.h_tensor(mp);
  // d eta on coordinate fields: 1/2 (d_a eta_b - d_b eta_a)
  const Mat& je = sp.eta.jacobian;  // je(b, a) = d_a eta_b
  Mat deta = 0.5 * (je.transpose() - je);
  out.push_back(make_record("lemmas.deta_h", point_index, max_abs(deta - mp.g * h), tol, "d eta(X,Y) = g(X, H Y)"));
  double r1 = 0.0, r2 = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      auto [s1, s2] = lemma22_residuals(sp, mp, basis(n, a), basis(n, b));
      r1 = std::max(r1, s1);
      r2 = std::max(r2, s2);
    }
  out.push_back(make_record("lemmas.nabla_phi_phi", point_index, r1, tol,
                            "(nabla_X phi)phi Y = -phi(nabla_X phi)Y - g(Y,HX) xi - eta(Y) HX"));
  out.push_back(make_record("lemmas.nabla_phiphi_phi", point_index, r2, tol,
                            "(nabla_{phi X} phi)phi Y = -(nabla_X phi)Y - eta(X) phi H Y + eta(Y) phi H X"));
  return out;
}

std::vector<CheckRecord> lemma22_check(const AlmostContactStructure& s, const MetricField& g,
                                       std::span<const Vec> points, const Bindings& bindings, double tol) {
  check_dims(s, g);
  std::vector<CheckRecord> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::span<const double> p(points[i].data(), static_cast<std::size_t>(points[i].size()));
    MetricPoint mp = evaluate_metric(g, p, bindings);
    StructurePoint sp = evaluate_structure(s, p, bindings);
    bool nc = nearly_cosymplectic_value(sp, mp) <= 1e-9;
    for (auto& r : structure_lemma_checks(sp, mp, static_cast<int>(i), nc, tol))
      if (r.check_id != "lemmas.nabla_phi_skew" && r.check_id != "lemmas.deta_h") out.push_back(std::move(r));
  }
  return out;
}

}  // namespace nullgeo
