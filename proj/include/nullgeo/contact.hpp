#pragma once

#include <span>
#include <utility>
#include <vector>

#include "nullgeo/check_report.hpp"
#include "nullgeo/geometry.hpp"

namespace nullgeo {

// (phi, xi, eta) on the ambient chart. phi is stored row-major with
// entry (a,b) = phi^a_b, so (phi Y)^a = phi^a_b Y^b.
struct AlmostContactStructure {
  int dim = 0;
  std::vector<Expression> phi;
  VectorField xi;
  OneForm eta;
};

// Pointwise values of the structure tensors and their first derivatives.
struct StructurePoint {
  Mat phi;
  std::vector<Mat> dphi;  // dphi[k] = d_k phi
  FieldJet xi;
  FieldJet eta;

  int dim() const noexcept { return static_cast<int>(phi.rows()); }
  // Matrix of (nabla_X phi) at the point.
  Mat nabla_phi(const MetricPoint& mp, const Vec& along) const;
  // H with nabla_X xi = -H X.
  Mat h_tensor(const MetricPoint& mp) const;
  double eta_of(const Vec& v) const { return eta.value.dot(v); }
  // Omega(X,Y) = g(X, phi Y)
  double omega(const MetricPoint& mp, const Vec& x, const Vec& y) const { return mp.pair(x, phi * y); }
  // d eta(X,Y) = 1/2 (X eta(Y) - Y eta(X) - eta([X,Y])) for the fields X,Y.
  double d_eta(const FieldJet& x, const FieldJet& y) const;
};

StructurePoint evaluate_structure(const AlmostContactStructure& s, std::span<const double> point,
                                  const Bindings& bindings);

// Almost contact metric axioms at each point; one record per axiom per point.
std::vector<CheckRecord> verify_acms(const AlmostContactStructure& s, const MetricField& g,
                                     std::span<const Vec> points, const Bindings& bindings, double tol = 1e-9);

Vec nabla_phi(const AlmostContactStructure& s, const MetricField& g, const VectorField& x, const VectorField& y,
              std::span<const double> point, const Bindings& bindings);

// max |(nabla_X phi)Y + (nabla_Y phi)X| over pairs. An empty pair list means
// all pairs of coordinate basis vectors.
double nearly_cosymplectic_value(const StructurePoint& sp, const MetricPoint& mp,
                                 std::span<const std::pair<Vec, Vec>> pairs = {});

std::vector<CheckRecord> nearly_cosymplectic_residual(const AlmostContactStructure& s, const MetricField& g,
                                                      std::span<const Vec> points, const Bindings& bindings,
                                                      std::span<const std::pair<Vec, Vec>> pairs = {},
                                                      double tol = 1e-9);

double d_eta(const AlmostContactStructure& s, const VectorField& x, const VectorField& y,
             std::span<const double> point, const Bindings& bindings);

// H-tensor properties and (nabla_X phi) xi = phi H X on coordinate vectors.
// Skipped unless the structure is nearly cosymplectic at the point.
std::vector<CheckRecord> h_tensor_checks(const StructurePoint& sp, const MetricPoint& mp, int point_index,
                                         bool nearly_cosymplectic, double tol = 1e-8);

// Skewness of nabla phi, d eta(X,Y) = g(X, H Y) and both identities of the
// nearly cosymplectic lemma, on coordinate basis pairs.
std::vector<CheckRecord> structure_lemma_checks(const StructurePoint& sp, const MetricPoint& mp, int point_index,
                                                bool nearly_cosymplectic, double tol = 1e-8);

// Both identities of the nearly cosymplectic lemma on coordinate basis pairs;
// skipped with a reason where the structure is not nearly cosymplectic.
std::vector<CheckRecord> lemma22_check(const AlmostContactStructure& s, const MetricField& g,
                                       std::span<const Vec> points, const Bindings& bindings, double tol = 1e-8);

// Residuals of the two lemma identities for specific X, Y at a point.
std::pair<double, double> lemma22_residuals(const StructurePoint& sp, const MetricPoint& mp, const Vec& x,
                                            const Vec& y);

}  // namespace nullgeo
