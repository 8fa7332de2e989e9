#include "nullgeo/linalg.hpp"

#include <algorithm>
#include <limits>

namespace nullgeo {

double span_residual(const Mat& basis, const Vec& v) {
  double norm = v.norm();
  if (norm == 0.0) return 0.0;
  if (basis.cols() == 0) return 1.0;
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(basis);
  Vec coeffs = cod.solve(v);
  return (v - basis * coeffs).norm() / norm;
}

double span_inclusion_residual(const Mat& basis, const Mat& vectors) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < vectors.cols(); ++j)
    worst = std::max(worst, span_residual(basis, vectors.col(j)));
  return worst;
}

double span_equality_residual(const Mat& a, const Mat& b) {
  return std::max(span_inclusion_residual(a, b), span_inclusion_residual(b, a));
}

Mat kernel_basis(const Mat& m, double rel_tol) {
  const Eigen::Index n = m.cols();
  if (m.rows() == 0) return Mat::Identity(n, n);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  double smax = s.size() > 0 ? s(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * smax && s(i) > 0.0) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

Mat columns(const std::vector<Vec>& vs, Eigen::Index rows) {
  Mat m(rows, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t j = 0; j < vs.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = vs[j];
  return m;
}

Mat hcat(std::initializer_list<Mat> blocks) {
  Eigen::Index rows = 0, cols = 0;
  for (const Mat& b : blocks) {
    rows = std::max(rows, b.rows());
    cols += b.cols();
  }
  Mat out(rows, cols);
  Eigen::Index at = 0;
  for (const Mat& b : blocks) {
    if (b.cols() == 0) continue;
    out.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  return out;
}

double condition_number(const Mat& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Mat> svd(m);
  const Vec& s = svd.singularValues();
  double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

}  // namespace nullgeo
