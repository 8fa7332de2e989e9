#pragma once

#include <vector>

#include "nullgeo/check_report.hpp"
#include "nullgeo/nullsub.hpp"

namespace nullgeo {

struct QgcrDims {
  int r = 0, d1 = 0, d2 = 0, d0 = 0, m = 0, n = 0;
  bool operator==(const QgcrDims&) const = default;
};

struct QgcrVerdict {
  std::vector<CheckRecord> records;
  QgcrDims dims;
  bool qgcr = false;    // every structural condition holds
  bool proper = false;  // qgcr and D1, D0, D2, S all nonzero
};

// Frame-index lists of a declaration, validated against the frame roles.
struct QgcrIndices {
  std::vector<int> d1, d2, d0, l, s, phi_d2, phi_l, phi_s;
};

// Throws FrameError when a declared name is unknown or sits in the wrong role.
QgcrIndices resolve_qgcr(const SubmanifoldScenario& sc);

// Needs structure data in `gw`.
QgcrVerdict verify_qgcr(const SubmanifoldScenario& sc, const GWTable& gw, int point_index, double tol = 1e-8);

// Coefficients of xi in the frame: xi = xi_S + sum a_i E_i + sum b_i N_i + sum c_a W_a,
// with a_i = eta(N_i), b_i = eta(E_i), c_a = eta(W_a) / eps_a. `residual` is the
// reconstruction error of those pairing-derived coefficients.
struct XiDecomposition {
  Vec xi_s;  // screen coordinates
  Vec a, b, c;
  double residual = 0.0;
};

XiDecomposition xi_decompose(const GWTable& gw);

// Records for xi in Rad + ltr, xi in D2 + L, and (r = 3) phi L = phi D2.
std::vector<CheckRecord> verify_ascreen(const SubmanifoldScenario& sc, const GWTable& gw, int point_index,
                                        double tol = 1e-8);

// |2 eta(E) eta(N) - 1| for E spanning D2 and N spanning L. Skipped unless
// `ascreen` holds and both are one-dimensional.
CheckRecord lemma52_check(const SubmanifoldScenario& sc, const GWTable& gw, int point_index, bool ascreen,
                          double tol = 1e-10);

}  // namespace nullgeo
