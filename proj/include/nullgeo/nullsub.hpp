#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "nullgeo/check_report.hpp"
#include "nullgeo/contact.hpp"
#include "nullgeo/geometry.hpp"

namespace nullgeo {

struct NamedField {
  std::string name;
  VectorField field;
};

// Index sets of a QGCR declaration, by frame-field name.
struct QgcrDecl {
  std::vector<std::string> d1, d2, d0, l, s;
  // Optional screen fields claimed to span the images.
  std::vector<std::string> phi_d2, phi_l, phi_s;
  bool declared = false;
};

struct SampleBox {
  std::string param;
  double lo = -1.0;
  double hi = 1.0;
};

struct SubmanifoldScenario {
  std::string id;
  std::vector<std::string> coords;  // ambient chart
  std::vector<std::string> params;  // submanifold parameters
  Bindings bindings;                // runtime constants such as theta
  MetricField metric;
  std::optional<AlmostContactStructure> structure;
  std::vector<Expression> param_map;  // one per ambient coordinate, over params
  std::vector<NamedField> rad, screen, ltr, stransversal;
  QgcrDecl qgcr;
  std::vector<SampleBox> boxes;  // one per parameter, in parameter order
  int count = 20;
  std::uint64_t seed = 42;
  double rank_tol = 1e-9;

  int n() const noexcept { return metric.dim; }
  int m() const noexcept { return static_cast<int>(params.size()); }
  int r() const noexcept { return static_cast<int>(rad.size()); }
  int q() const noexcept { return static_cast<int>(stransversal.size()); }
  // Frame fields in frame order: rad, screen, ltr, stransversal.
  std::vector<const NamedField*> frame_fields() const;
  // Position of a named field in frame order, -1 when absent.
  int frame_index(const std::string& name) const;
};

struct SamplePoint {
  Vec u;  // parameter values
  Vec x;  // ambient point
};

// Uniform draw on [lo, hi] from a 64-bit Mersenne twister, 53-bit mantissa.
double uniform_draw(std::uint64_t bits, double lo, double hi);

// Deterministic for a fixed seed. Throws DomainError naming the offending
// parametrization entry when a sample leaves its domain.
std::vector<SamplePoint> sample_points(const SubmanifoldScenario& sc, int count, std::uint64_t seed);

// Ambient point and dx/du for a parameter vector.
SamplePoint embed(const SubmanifoldScenario& sc, const Vec& u, Mat* jacobian = nullptr);

// Everything pointwise about the declared frame. Frame columns are ordered
// E_1..E_r, X_{r+1}..X_m, N_1..N_r, W_1..W_q, so n = m + r + q.
struct PointFrame {
  int index = 0;
  SamplePoint point;
  Mat jacobian;  // n x m, dx/du
  MetricPoint mp;
  std::vector<FieldJet> fields;
  Mat frame;  // n x n, columns are the frame vectors
  Eigen::PartialPivLU<Mat> lu;
  int r = 0, m = 0, q = 0;

  int n() const noexcept { return m + r + q; }
  // Coordinates of an ambient vector in the frame.
  Vec coords(const Vec& v) const { return lu.solve(v); }
  Mat tangent() const { return frame.leftCols(m); }
  Mat radical() const { return frame.leftCols(r); }
  Mat screen() const { return frame.block(0, r, frame.rows(), m - r); }
  Mat ltr() const { return frame.block(0, m, frame.rows(), r); }
  Mat stransversal() const { return frame.rightCols(q); }
  // Ambient vector of a tangent combination given by frame coefficients.
  Vec tangent_vector(const Vec& coeffs) const { return tangent() * coeffs; }
};

// Throws FrameError when the frame matrix is singular, DimensionError when
// frame sizes do not add up to the ambient dimension.
PointFrame evaluate_frame(const SubmanifoldScenario& sc, const SamplePoint& p, int index = 0,
                          bool with_curvature = false);

// Frame-relation suite at one point: metric symmetry and signature,
// pushforward consistency, radical Gram, screen nondegeneracy, ltr pairings,
// screen transversal orthogonality. One named record per relation.
std::vector<CheckRecord> frame_relation_checks(const SubmanifoldScenario& sc, const PointFrame& pf,
                                               double tol = 1e-9);

struct RadicalRank {
  int rank = 0;
  Mat kernel;  // m x rank, frame coordinates of the tangent frame
  Vec singular_values;
};

// Kernel of the tangent-frame Gram matrix. Throws RankAmbiguityError when kept
// and dropped singular values are within a factor 10 of each other.
RadicalRank radical_rank(const PointFrame& pf, double rel_tol = 1e-9);

// A lightlike transversal frame paired with the declared radical and
// screen transversal frame. Empty for r = 0.
Mat construct_ltr(const PointFrame& pf);

// Frame coordinates of the ambient derivatives of every frame field along
// each tangent frame field: C[a].col(k) = coords(nabla_{T_a} F_k).
// Tangent arguments are constant-coefficient combinations of T_1..T_m.
struct GWTable {
  int r = 0, m = 0, q = 0;
  Mat frame;                // ambient frame vectors
  Mat frame_inv;
  Mat metric;               // ambient g at the point
  Mat frame_gram;           // g(F_j, F_k)
  std::vector<Mat> C;       // m matrices, n x n
  std::vector<Mat> dgyz;    // dgyz[a](j,k) = T_a(g(F_j, F_k)), from metric and field jets only
  // Optional structure data at the point.
  bool has_structure = false;
  Mat phi;                  // ambient phi
  Vec eta;                  // eta as a row of components
  Vec xi;
  Mat H;
  Mat deta;                 // d eta components, 1/2 (d_a eta_b - d_b eta_a)
  std::vector<Mat> nabla_phi_frame;  // nabla_{F_k} phi for every frame vector

  int n() const noexcept { return m + r + q; }
  Mat gram() const { return frame_gram.topLeftCorner(m, m); }
  Vec eps() const { return frame_gram.diagonal().tail(q); }
  // nabla-bar_X Y in frame coordinates for tangent coefficient vectors.
  Vec nabla_bar(const Vec& x, const Vec& y) const;
  // nabla-bar_X F_k (any frame field k) in frame coordinates.
  Vec nabla_bar_field(const Vec& x, int k) const;
  Vec hl(const Vec& x, const Vec& y) const { return nabla_bar(x, y).segment(m, r); }
  Vec hs(const Vec& x, const Vec& y) const { return nabla_bar(x, y).tail(q); }
  // Transversal part h(X,Y) in frame coordinates (zero tangent block).
  Vec h(const Vec& x, const Vec& y) const;
  // Induced connection nabla_X Y, tangent frame coordinates.
  Vec nabla(const Vec& x, const Vec& y) const { return nabla_bar(x, y).head(m); }
  // A_{N_i} X, A_{W_a} X, A*_{E_i} X as tangent frame coordinates.
  Vec a_n(int i, const Vec& x) const { return -nabla_bar_field(x, m + i).head(m); }
  Vec a_w(int alpha, const Vec& x) const { return -nabla_bar_field(x, m + r + alpha).head(m); }
  Vec a_star(int i, const Vec& x) const;
  double tau(int i, int j, const Vec& x) const { return nabla_bar_field(x, m + i)(m + j); }
  double rho(int i, int alpha, const Vec& x) const { return nabla_bar_field(x, m + i)(m + r + alpha); }
  double phi_coef(int alpha, int i, const Vec& x) const { return nabla_bar_field(x, m + r + alpha)(m + i); }
  double sigma(int alpha, int beta, const Vec& x) const {
    return nabla_bar_field(x, m + r + alpha)(m + r + beta);
  }
  // tau_ij(X) from the radical side: minus the E_i coefficient of nabla_X E_j.
  double tau_from_radical(int i, int j, const Vec& x) const { return -nabla_bar_field(x, j)(i); }
  // Screen second fundamental form h*_i(X, PY) for PY a screen combination.
  double h_star(int i, const Vec& x, const Vec& py) const { return nabla_bar(x, py)(i); }
  // Pairing of two frame-coordinate vectors.
  double pair(const Vec& u, const Vec& v) const { return u.dot(frame_gram * v); }
  // Ambient vector of frame coordinates, and back.
  Vec ambient(const Vec& c) const { return frame * c; }
  Vec coords(const Vec& v) const { return frame_inv * v; }
  Vec unit(int k) const {
    Vec e = Vec::Zero(n());
    e(k) = 1.0;
    return e;
  }
  Vec tangent_unit(int a) const {
    Vec e = Vec::Zero(m);
    e(a) = 1.0;
    return e;
  }
};

GWTable gauss_weingarten(const SubmanifoldScenario& sc, const PointFrame& pf);

// Single-pair convenience: h(X,Y) as an ambient vector for tangent
// coefficient vectors.
Vec second_fundamental(const GWTable& gw, const Vec& x, const Vec& y);

// Reconstruction, symmetry, non-metricity, screen metric, A*-pairing and
// tau consistency records on frame pairs and `extra_pairs` random pairs.
std::vector<CheckRecord> gw_checks(const GWTable& gw, const PointFrame& pf, int point_index, double tol,
                                   int extra_pairs = 5, std::uint64_t seed = 0);

}  // namespace nullgeo
