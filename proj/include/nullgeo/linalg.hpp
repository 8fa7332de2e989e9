#pragma once

#include <initializer_list>
#include <vector>

#include "nullgeo/expr.hpp"

namespace nullgeo {

// Relative least-squares distance of `v` from the column span of `basis`,
// measured in coordinate components: |v - proj(v)| / |v|. A zero vector
// is a member of every span (returns 0); an empty basis returns 1 for nonzero v.
double span_residual(const Mat& basis, const Vec& v);

// Largest span_residual of any column of `vectors` against `basis`.
double span_inclusion_residual(const Mat& basis, const Mat& vectors);

// Distribution equality as mutual inclusion of basis vectors.
double span_equality_residual(const Mat& a, const Mat& b);

// Orthonormal basis (coordinate inner product) of the kernel of `m`.
// Singular values below rel_tol * max are treated as zero.
Mat kernel_basis(const Mat& m, double rel_tol = 1e-10);

// Stack a list of vectors as the columns of a matrix.
Mat columns(const std::vector<Vec>& vs, Eigen::Index rows);

// Side-by-side concatenation; blocks may have zero columns.
Mat hcat(std::initializer_list<Mat> blocks);

// Ratio of largest to smallest singular value (infinity when singular).
double condition_number(const Mat& m);

}  // namespace nullgeo
