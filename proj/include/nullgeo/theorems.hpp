#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "nullgeo/check_report.hpp"
#include "nullgeo/contact.hpp"
#include "nullgeo/nullsub.hpp"
#include "nullgeo/qgcr.hpp"

namespace nullgeo {

// Least-squares fit h^l_i = H^l_i g and h^s_a = H^s_a g over tangent frame pairs.
struct UmbilicalFit {
  int point_index = 0;
  Vec hl;  // H^l_i
  Vec hs;  // H^s_a
  double residual = 0.0;  // max |h(T_a,T_b) - H g(T_a,T_b)| over all pairs
  double h_max = 0.0;     // max |h(T_a,T_b)|
};

// Throws Error when every frame pair is g-null (fit undetermined).
UmbilicalFit umbilical_fit(const GWTable& gw, int point_index);

struct PredicateResult {
  std::vector<CheckRecord> records;
  bool holds = false;
};

struct UmbilicalResult {
  std::vector<UmbilicalFit> fits;
  std::vector<CheckRecord> records;
  bool umbilical = false;
  bool geodesic = false;
};

UmbilicalResult umbilical_check(std::span<const GWTable> tables, double tol = 1e-8);

// h^l(X,E) = h^s(X,E) = 0 for tangent frame X and radical E.
PredicateResult irrotational_check(std::span<const GWTable> tables, double tol = 1e-8);

// Tangent frame coordinates of D = D0 + D1 and D-hat = {D2 + phi D2} + phi S + phi L.
struct MixedBases {
  Mat d;
  Mat d_hat;
};
MixedBases mixed_bases(const SubmanifoldScenario& sc, const GWTable& gw);

struct MixedResult {
  std::vector<CheckRecord> records;
  bool verdict_a = false;  // h vanishes on D x D-hat
  bool verdict_b = false;  // h^s vanishes on D x D-hat and A*_E X = 0 on D
  bool agree = false;
};
MixedResult mixed_geodesic_check(const SubmanifoldScenario& sc, std::span<const GWTable> tables, double tol = 1e-8);

PredicateResult d_geodesic_check(const SubmanifoldScenario& sc, std::span<const GWTable> tables, double tol = 1e-8);

// Frame evaluation at a parameter vector, used by the finite-difference probes.
using TableAt = std::function<GWTable(const Vec& u)>;

// Frame-coefficient table of a scenario at parameter vector u.
GWTable table_at(const SubmanifoldScenario& sc, const Vec& u);

// Central differences along a parameter direction, one Richardson step.
// Halves the step on DomainError; rethrows after six halvings.
class DirectionalProbe {
 public:
  DirectionalProbe(const TableAt& at, const Vec& u, const Vec& v, double step = 1e-4);
  Vec derivative(const std::function<Vec(const GWTable&)>& f) const;
  double step() const noexcept { return step_; }

 private:
  double step_ = 0.0;
  std::vector<GWTable> tables_;  // u+tv, u-tv, u+tv/2, u-tv/2
};

struct GaussSides {
  double lhs = 0.0;  // g(R-bar(X,W)Z, Y) from the ambient curvature
  double rhs = 0.0;  // assembled from the induced objects
};

// Both sides of the Gauss relation for tangent frame coefficient vectors at
// one point. `pf` must carry ambient curvature. Probes are cached per direction.
class GaussEvaluator {
 public:
  GaussEvaluator(const SubmanifoldScenario& sc, const PointFrame& pf, const GWTable& gw, double step = 1e-4);
  GaussSides sides(const Vec& x, const Vec& w, const Vec& z, const Vec& y);
  // R-bar(X,W)Z in frame coordinates, built from R, A, nabla h, D^l and D^s terms.
  Vec curvature_frame(const Vec& x, const Vec& w, const Vec& z);

 private:
  const DirectionalProbe& probe(const Vec& direction);
  // D_X of the frame coordinates of nabla-bar_W Z.
  Vec d_nabla_bar(const Vec& x, const Vec& w, const Vec& z);
  const SubmanifoldScenario& sc_;
  const PointFrame& pf_;
  const GWTable& gw_;
  double step_;
  Eigen::CompleteOrthogonalDecomposition<Mat> jac_;
  std::map<std::vector<double>, DirectionalProbe> cache_;
};

double gauss_equation_residual(const SubmanifoldScenario& sc, const Vec& x, const Vec& w, const Vec& z, const Vec& y,
                               const SamplePoint& p);

// The c-bar block of the space-form curvature, without the factor c-bar.
double cbar_block(const Mat& g, const Mat& phi, const Vec& eta, const Vec& x, const Vec& w, const Vec& z,
                  const Vec& y);

// Right side of the space-form curvature expression divided by 4.
double spaceform_curvature(const StructurePoint& sp, const MetricPoint& mp, double cbar, const Vec& x, const Vec& w,
                           const Vec& z, const Vec& y);

struct CbarEstimate {
  double value = 0.0;
  std::string source;      // ms455-formula | s30-relation | declared
  std::string sign_class;  // zero | nonpositive (HE space-like) | nonnegative (HE time-like)
  double b = 0.0;
  double he_he = 0.0;
};

// c-bar = -g(HE,HE)/b^2. Throws Error when b = 0.
CbarEstimate cbar_from_values(double he_he, double b, double zero_tol = 1e-12);

struct CbarRoutes {
  CbarEstimate estimate;
  double via_deta = 0.0;  // d eta(E, HE) / b^2
};
// Uses the first D2 field. Throws Error when b = 0.
CbarRoutes cbar_from_irrotational(const SubmanifoldScenario& sc, const GWTable& gw);

struct Theorem41Sides {
  double lhs = 0.0;  // c-bar |X|^2 |Z|^2
  double rhs = 0.0;  // |(nabla_Z phi) X|^2 + g(Z, HX)^2
};
Theorem41Sides theorem41_sides(const GWTable& gw, const Vec& x, const Vec& z, double cbar);

// Gates: umbilical or geodesic, X and Z space-like, D0 and phi S parallel.
CheckRecord theorem41_relation(const SubmanifoldScenario& sc, const GWTable& gw, int point_index, const Vec& x,
                               const Vec& z, double cbar, bool umbilical_or_geodesic, double tol = 1e-8);

// |g(Y,HX) + g(X,HY)| over D basis pairs.
CheckRecord lems11_check(const SubmanifoldScenario& sc, const GWTable& gw, int point_index, double tol = 1e-10);

}  // namespace nullgeo
