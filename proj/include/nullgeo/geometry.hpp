#pragma once

#include <span>
#include <string>
#include <vector>

#include "nullgeo/expr.hpp"

namespace nullgeo {

// Largest accepted condition estimate for a metric at a point.
inline constexpr double kMaxMetricCondition = 1e10;

struct Signature {
  int negative = 0;
  int positive = 0;
  bool operator==(const Signature&) const = default;
};

// Symmetric (0,2)-tensor g_ab on a single chart. Components are stored
// row-major; entry (a,b) is g_ab.
struct MetricField {
  int dim = 0;
  std::vector<Expression> components;
  Signature signature;

  const Expression& at(int a, int b) const { return components[static_cast<std::size_t>(a * dim + b)]; }
};

struct VectorField {
  std::vector<Expression> components;
  int dim() const noexcept { return static_cast<int>(components.size()); }
};

struct OneForm {
  std::vector<Expression> components;
  int dim() const noexcept { return static_cast<int>(components.size()); }
};

// Value and coordinate Jacobian of a vector field (or one-form) at a point:
// jacobian(a, k) = d_k Y^a.
struct FieldJet {
  Vec value;
  Mat jacobian;
};

FieldJet evaluate_field(const std::vector<Expression>& components, std::span<const double> point,
                        const Bindings& bindings);
inline FieldJet evaluate_field(const VectorField& f, std::span<const double> p, const Bindings& b) {
  return evaluate_field(f.components, p, b);
}
inline FieldJet evaluate_field(const OneForm& f, std::span<const double> p, const Bindings& b) {
  return evaluate_field(f.components, p, b);
}

// Everything the connection and curvature need at one point.
struct MetricPoint {
  Vec x;
  Mat g;
  Mat ginv;
  std::vector<Mat> dg;      // dg[k](a,b) = d_k g_ab
  std::vector<Mat> gamma;   // gamma[a](i,j) = Gamma^a_ij
  std::vector<Mat> dgamma;  // dgamma[a*n+k](i,j) = d_k Gamma^a_ij, filled when curvature requested
  double condition = 1.0;

  int dim() const noexcept { return static_cast<int>(x.size()); }
  bool has_curvature() const noexcept { return !dgamma.empty(); }

  double pair(const Vec& u, const Vec& v) const { return u.dot(g * v); }
  // Gamma(X,Y)^a = Gamma^a_ij X^i Y^j
  Vec gamma_contract(const Vec& x_vec, const Vec& y_vec) const;
  // Ambient covariant derivative of a field along a vector at this point.
  Vec cov_deriv(const Vec& along, const FieldJet& field) const;
  // R(X,Y)Z with R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]; needs curvature.
  Vec curvature_vector(const Vec& x_vec, const Vec& y_vec, const Vec& z_vec) const;
  // g(R(X,Y)Z, V)
  double riemann(const Vec& x_vec, const Vec& y_vec, const Vec& z_vec, const Vec& v_vec) const;
};

// Throws SingularMetricError when the condition estimate exceeds
// kMaxMetricCondition.
MetricPoint evaluate_metric(const MetricField& metric, std::span<const double> point,
                            const Bindings& bindings, bool with_curvature = false);

// Signs of the eigenvalues of g at a point.
Signature observed_signature(const Mat& g, double rel_tol = 1e-12);

// Largest |g_ab - g_ba| at a point.
double metric_asymmetry(const MetricField& metric, std::span<const double> point, const Bindings& bindings);

double metric_pair(const MetricField& metric, const VectorField& x, const VectorField& y,
                   std::span<const double> point, const Bindings& bindings);

// [X,Y]^k = X(Y^k) - Y(X^k)
Vec lie_bracket(const VectorField& x, const VectorField& y, std::span<const double> point,
                const Bindings& bindings);

std::vector<Mat> christoffel(const MetricField& metric, std::span<const double> point,
                             const Bindings& bindings);

Vec cov_deriv(const MetricField& metric, const VectorField& x, const VectorField& y,
              std::span<const double> point, const Bindings& bindings);

// g(R(X,Y)Z, V) with R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z.
double riemann(const MetricField& metric, const VectorField& x, const VectorField& y, const VectorField& z,
               const VectorField& v, std::span<const double> point, const Bindings& bindings);

// Builders for fields given as expression text over one coordinate list.
MetricField parse_metric(const std::vector<std::vector<std::string>>& rows, const std::vector<std::string>& coords,
                         const std::vector<std::string>& params, Signature signature);
VectorField parse_vector(const std::vector<std::string>& comps, const std::vector<std::string>& coords,
                         const std::vector<std::string>& params = {});
VectorField constant_vector(const Vec& v, const std::vector<std::string>& coords);

}  // namespace nullgeo
