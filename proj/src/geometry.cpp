#include "nullgeo/geometry.hpp"

#include <cmath>

#include "nullgeo/errors.hpp"
#include "nullgeo/linalg.hpp"

namespace nullgeo {

FieldJet evaluate_field(const std::vector<Expression>& components, std::span<const double> point,
                        const Bindings& bindings) {
  const auto n = static_cast<Eigen::Index>(components.size());
  FieldJet f;
  f.value.resize(n);
  f.jacobian.resize(n, static_cast<Eigen::Index>(point.size()));
  for (Eigen::Index a = 0; a < n; ++a) {
    const Expression& e = components[static_cast<std::size_t>(a)];
    if (e.is_constant_zero()) {
      f.value(a) = 0.0;
      f.jacobian.row(a).setZero();
      continue;
    }
    Jet2 j = e.eval_jet1(point, bindings);
    f.value(a) = j.value;
    f.jacobian.row(a) = j.grad.transpose();
  }
  return f;
}

Vec MetricPoint::gamma_contract(const Vec& x_vec, const Vec& y_vec) const {
  const int n = dim();
  Vec out(n);
  for (int a = 0; a < n; ++a) out(a) = x_vec.dot(gamma[static_cast<std::size_t>(a)] * y_vec);
  return out;
}

Vec MetricPoint::cov_deriv(const Vec& along, const FieldJet& field) const {
  return field.jacobian * along + gamma_contract(along, field.value);
}

Vec MetricPoint::curvature_vector(const Vec& x_vec, const Vec& y_vec, const Vec& z_vec) const {
  if (!has_curvature()) throw Error("curvature was not evaluated at this point");
  const int n = dim();
  // R^a_{bcd} Z^b X^c Y^d with
  // R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb}
  Vec gxz = gamma_contract(x_vec, z_vec);  // G^e_{cb} X^c Z^b
  Vec gyz = gamma_contract(y_vec, z_vec);  // G^e_{db} Y^d Z^b
  Vec out(n);
  for (int a = 0; a < n; ++a) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      const Mat& dgk = dgamma[static_cast<std::size_t>(a * n + k)];  // d_k G^a_ij
      s += x_vec(k) * y_vec.dot(dgk * z_vec);
      s -= y_vec(k) * x_vec.dot(dgk * z_vec);
    }
    const Mat& ga = gamma[static_cast<std::size_t>(a)];
    s += x_vec.dot(ga * gyz);
    s -= y_vec.dot(ga * gxz);
    out(a) = s;
  }
  return out;
}

double MetricPoint::riemann(const Vec& x_vec, const Vec& y_vec, const Vec& z_vec, const Vec& v_vec) const {
  return pair(curvature_vector(x_vec, y_vec, z_vec), v_vec);
}

MetricPoint evaluate_metric(const MetricField& metric, std::span<const double> point,
                            const Bindings& bindings, bool with_curvature) {
  const int n = metric.dim;
  if (static_cast<int>(point.size()) != n)
    throw DimensionError("metric point has " + std::to_string(point.size()) + " coordinates, expected " +
                         std::to_string(n));
  MetricPoint mp;
  mp.x = Eigen::Map<const Vec>(point.data(), n);
  mp.g = Mat::Zero(n, n);
  mp.dg.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  std::vector<Mat> ddg;  // ddg[k*n+l](a,b) = d_k d_l g_ab
  if (with_curvature) ddg.assign(static_cast<std::size_t>(n * n), Mat::Zero(n, n));

  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const Expression& e = metric.at(a, b);
      if (e.is_constant_zero()) continue;
      Jet2 j = with_curvature ? e.eval_jet2(point, bindings) : e.eval_jet1(point, bindings);
      mp.g(a, b) = j.value;
      for (int k = 0; k < n; ++k) mp.dg[static_cast<std::size_t>(k)](a, b) = j.grad(k);
      if (with_curvature)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) ddg[static_cast<std::size_t>(k * n + l)](a, b) = j.hess(k, l);
    }
  }

  mp.condition = condition_number(mp.g);
  if (!(mp.condition <= kMaxMetricCondition)) throw SingularMetricError(mp.condition);
  mp.ginv = mp.g.partialPivLu().inverse();

  // Lowered symbols G_{b,ij} = 1/2 (d_i g_bj + d_j g_bi - d_b g_ij)
  auto lowered = [&](const std::vector<Mat>& d, int b, int i, int j) {
    return 0.5 * (d[static_cast<std::size_t>(i)](b, j) + d[static_cast<std::size_t>(j)](b, i) -
                  d[static_cast<std::size_t>(b)](i, j));
  };
  std::vector<Mat> low(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (int b = 0; b < n; ++b)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) low[static_cast<std::size_t>(b)](i, j) = lowered(mp.dg, b, i, j);

  mp.gamma.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double w = mp.ginv(a, b);
      if (w != 0.0) mp.gamma[static_cast<std::size_t>(a)] += w * low[static_cast<std::size_t>(b)];
    }

  if (with_curvature) {
    mp.dgamma.assign(static_cast<std::size_t>(n * n), Mat::Zero(n, n));
    for (int k = 0; k < n; ++k) {
      // d_k g^{ab} = -g^{ac} d_k g_cd g^{db}
      Mat dginv = -mp.ginv * mp.dg[static_cast<std::size_t>(k)] * mp.ginv;
      // d_k of lowered symbols
      std::vector<Mat> dlow(static_cast<std::size_t>(n), Mat::Zero(n, n));
      for (int b = 0; b < n; ++b)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const Mat& ki = ddg[static_cast<std::size_t>(k * n + i)];
            const Mat& kj = ddg[static_cast<std::size_t>(k * n + j)];
            const Mat& kb = ddg[static_cast<std::size_t>(k * n + b)];
            dlow[static_cast<std::size_t>(b)](i, j) = 0.5 * (ki(b, j) + kj(b, i) - kb(i, j));
          }
      for (int a = 0; a < n; ++a) {
        Mat& out = mp.dgamma[static_cast<std::size_t>(a * n + k)];
        for (int b = 0; b < n; ++b) {
          if (dginv(a, b) != 0.0) out += dginv(a, b) * low[static_cast<std::size_t>(b)];
          if (mp.ginv(a, b) != 0.0) out += mp.ginv(a, b) * dlow[static_cast<std::size_t>(b)];
        }
      }
    }
  }
  return mp;
}

Signature observed_signature(const Mat& g, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
  const Vec& ev = es.eigenvalues();
  double scale = ev.cwiseAbs().maxCoeff();
  Signature s;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -rel_tol * scale) ++s.negative;
    else if (ev(i) > rel_tol * scale) ++s.positive;
  }
  return s;
}

double metric_asymmetry(const MetricField& metric, std::span<const double> point, const Bindings& bindings) {
  double worst = 0.0;
  for (int a = 0; a < metric.dim; ++a)
    for (int b = a + 1; b < metric.dim; ++b) {
      if (nodes_equal(metric.at(a, b).root(), metric.at(b, a).root())) continue;
      worst = std::max(worst, std::abs(metric.at(a, b).eval(point, bindings) - metric.at(b, a).eval(point, bindings)));
    }
  return worst;
}

double metric_pair(const MetricField& metric, const VectorField& x, const VectorField& y,
                   std::span<const double> point, const Bindings& bindings) {
  if (x.dim() != metric.dim || y.dim() != metric.dim) throw DimensionError("vector field dimension mismatch");
  MetricPoint mp = evaluate_metric(metric, point, bindings);
  return mp.pair(evaluate_field(x, point, bindings).value, evaluate_field(y, point, bindings).value);
}

Vec lie_bracket(const VectorField& x, const VectorField& y, std::span<const double> point,
                const Bindings& bindings) {
  if (x.dim() != y.dim()) throw DimensionError("vector field dimension mismatch");
  FieldJet fx = evaluate_field(x, point, bindings);
  FieldJet fy = evaluate_field(y, point, bindings);
  return fy.jacobian * fx.value - fx.jacobian * fy.value;
}

std::vector<Mat> christoffel(const MetricField& metric, std::span<const double> point,
                             const Bindings& bindings) {
  return evaluate_metric(metric, point, bindings).gamma;
}

Vec cov_deriv(const MetricField& metric, const VectorField& x, const VectorField& y,
              std::span<const double> point, const Bindings& bindings) {
  if (x.dim() != metric.dim || y.dim() != metric.dim) throw DimensionError("vector field dimension mismatch");
  MetricPoint mp = evaluate_metric(metric, point, bindings);
  return mp.cov_deriv(evaluate_field(x, point, bindings).value, evaluate_field(y, point, bindings));
}

double riemann(const MetricField& metric, const VectorField& x, const VectorField& y, const VectorField& z,
               const VectorField& v, std::span<const double> point, const Bindings& bindings) {
  MetricPoint mp = evaluate_metric(metric, point, bindings, true);
  return mp.riemann(evaluate_field(x, point, bindings).value, evaluate_field(y, point, bindings).value,
                    evaluate_field(z, point, bindings).value, evaluate_field(v, point, bindings).value);
}

MetricField parse_metric(const std::vector<std::vector<std::string>>& rows, const std::vector<std::string>& coords,
                         const std::vector<std::string>& params, Signature signature) {
  MetricField m;
  m.dim = static_cast<int>(coords.size());
  m.signature = signature;
  if (static_cast<int>(rows.size()) != m.dim) throw DimensionError("metric must have one row per coordinate");
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != m.dim) throw DimensionError("metric rows must have one entry per coordinate");
    for (const auto& s : row) m.components.push_back(Expression::parse(s, coords, params));
  }
  return m;
}

VectorField parse_vector(const std::vector<std::string>& comps, const std::vector<std::string>& coords,
                         const std::vector<std::string>& params) {
  VectorField v;
  for (const auto& s : comps) v.components.push_back(Expression::parse(s, coords, params));
  return v;
}

VectorField constant_vector(const Vec& v, const std::vector<std::string>& coords) {
  VectorField f;
  for (Eigen::Index i = 0; i < v.size(); ++i) f.components.push_back(Expression::constant(v(i), coords));
  return f;
}

}  // namespace nullgeo
