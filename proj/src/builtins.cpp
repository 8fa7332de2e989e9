#include <map>
#include <string>
#include <vector>

#include "nullgeo/errors.hpp"
#include "nullgeo/scenario.hpp"

namespace nullgeo {

namespace {

// 3-null ascreen submanifold of R^11_4 with its flat cosymplectic structure.
// The printed constraints x1 = y4, y1 = -x4 do not make E1, E2 tangent; the
// sign-corrected pair x1 = -y4, y1 = x4 does.
const char* kExample31 = R"json({
  "schema_version": 1,
  "id": "example-3.1",
  "params": {"theta": 0.78539816339744828},
  "ambient": {
    "dim": 11,
    "coords": ["x1", "x2", "x3", "x4", "x5", "y1", "y2", "y3", "y4", "y5", "z"],
    "metric": {"diagonal": [-1, -1, 1, 1, 1, -1, -1, 1, 1, 1, 1]},
    "signature": {"negative": 4, "positive": 7}
  },
  "structure": {
    "phi": {
      "y1": {"x1": -1}, "y2": {"x2": -1}, "y3": {"x3": -1}, "y4": {"x4": -1}, "y5": {"x5": -1},
      "x1": {"y1": 1}, "x2": {"y2": 1}, "x3": {"y3": 1}, "x4": {"y4": 1}, "x5": {"y5": 1}
    },
    "xi": {"z": 1},
    "eta": {"z": 1}
  },
  "submanifold": {
    "params": ["x2", "y2", "x3", "y3", "x4", "y4", "x5"],
    "param_map": {
      "x1": "-y4", "x2": "x2", "x3": "x3", "x4": "x4", "x5": "x5",
      "y1": "x4", "y2": "y2", "y3": "y3", "y4": "y4", "y5": "sqrt(x5)",
      "z": "x2*sin(theta) + y2*cos(theta)"
    },
    "frames": {
      "rad": [
        {"name": "E1", "components": {"x4": 1, "y1": 1}},
        {"name": "E2", "components": {"x1": 1, "y4": -1}},
        {"name": "E3", "components": {"x2": "sin(theta)", "y2": "cos(theta)", "z": 1}}
      ],
      "screen": [
        {"name": "X1", "components": {"x5": "2*y5", "y5": 1}},
        {"name": "X2", "components": {"x2": "-cos(theta)", "y2": "sin(theta)"}},
        {"name": "X3", "components": {"y3": 1}},
        {"name": "X4", "components": {"x3": 1}}
      ],
      "ltr": [
        {"name": "N1", "components": {"x4": 0.5, "y1": -0.5}},
        {"name": "N2", "components": {"x1": -0.5, "y4": -0.5}},
        {"name": "N3", "components": {"x2": "-sin(theta)/2", "y2": "-cos(theta)/2", "z": 0.5}}
      ],
      "stransversal": [
        {"name": "W", "components": {"x5": 1, "y5": "-2*y5"}}
      ]
    },
    "qgcr_decl": {
      "d1": ["E1", "E2"], "d2": ["E3"], "d0": ["X3", "X4"], "l": ["N3"], "s": ["W"],
      "phi_d2": ["X2"], "phi_l": ["X2"], "phi_s": ["X1"]
    }
  },
  "sampling": {"count": 20, "seed": 42, "boxes": {"x5": [0.1, 2]}},
  "expect": {
    "qgcr": true, "ascreen": true, "proper": true, "umbilical": true, "geodesic": false,
    "irrotational": true, "mixed_geodesic": true, "d_geodesic": true, "cbar": 0
  },
  "claims": [
    {
      "id": "nabla_x1_x1",
      "quantity": "nabla_tangential",
      "X": "X1", "Y": "X1", "component": "X1",
      "printed": "4*y5",
      "derived": "4*y5/(1 + 4*y5^2)",
      "parallel": ["X1"],
      "remark": "nabla_{X1} X1 stays in span{X1}, so the distribution-parallelism conclusion is unaffected"
    }
  ],
  "notes": [
    {"id": "constraint-signs", "text": "printed constraints x1 = y4, y1 = -x4 replaced by x1 = -y4, y1 = x4 so that the printed frame E1, E2 is tangent"},
    {"id": "umbilical-claim", "text": "published umbilical claim with H = 2/(1+4(y5)^2)^2 W is checked as an expectation; h(X2,X2) = 0 while g(X2,X2) = -1 and h(X1,X1) != 0, so the fit residual is nonzero"},
    {"id": "phi-image-overlap", "text": "phi L and phi D2 coincide (both span X2), so the screen splitting is checked as a span equality rather than a direct sum"}
  ]
})json";

// Great 2-sphere w = const in a hyperspherical chart of the unit 3-sphere.
const char* kSphereEquator = R"json({
  "schema_version": 1,
  "id": "s3-great-sphere",
  "params": {"w0": 0.9},
  "ambient": {
    "dim": 3,
    "coords": ["u", "v", "w"],
    "metric": {"diagonal": [1, "sin(u)^2", "sin(u)^2*sin(v)^2"]},
    "signature": {"negative": 0, "positive": 3}
  },
  "submanifold": {
    "params": ["a", "b"],
    "param_map": {"u": "a", "v": "b", "w": "w0"},
    "frames": {
      "rad": [],
      "screen": [{"name": "U", "components": {"u": 1}}, {"name": "V", "components": {"v": 1}}],
      "ltr": [],
      "stransversal": [{"name": "W", "components": {"w": "1/(sin(u)*sin(v))"}}]
    }
  },
  "sampling": {"count": 6, "seed": 7, "boxes": {"a": [0.5, 2.5], "b": [0.5, 2.5]}},
  "expect": {"umbilical": true, "geodesic": true, "irrotational": true}
})json";

// Small 2-sphere u = const: umbilical, not geodesic.
const char* kSphereLatitude = R"json({
  "schema_version": 1,
  "id": "s3-small-sphere",
  "params": {"u0": 0.7},
  "ambient": {
    "dim": 3,
    "coords": ["u", "v", "w"],
    "metric": {"diagonal": [1, "sin(u)^2", "sin(u)^2*sin(v)^2"]},
    "signature": {"negative": 0, "positive": 3}
  },
  "submanifold": {
    "params": ["a", "b"],
    "param_map": {"u": "u0", "v": "a", "w": "b"},
    "frames": {
      "rad": [],
      "screen": [{"name": "V", "components": {"v": 1}}, {"name": "W", "components": {"w": 1}}],
      "ltr": [],
      "stransversal": [{"name": "U", "components": {"u": 1}}]
    }
  },
  "sampling": {"count": 6, "seed": 7, "boxes": {"a": [0.5, 2.5], "b": [0.5, 2.5]}},
  "expect": {"umbilical": true, "geodesic": false}
})json";

// 1-null surface in a conformally flat Lorentzian 4-space (curved ambient).
const char* kConformalR1 = R"json({
  "schema_version": 1,
  "id": "conformal-r1",
  "params": {"p": 0.3, "q": 0.2, "s": 0.1},
  "ambient": {
    "dim": 4,
    "coords": ["t", "x", "y", "z"],
    "metric": {"diagonal": ["-exp(2*(p*x + q*y + s*z))", "exp(2*(p*x + q*y + s*z))",
                            "exp(2*(p*x + q*y + s*z))", "exp(2*(p*x + q*y + s*z))"]},
    "signature": {"negative": 1, "positive": 3}
  },
  "submanifold": {
    "params": ["a", "b"],
    "param_map": {"t": "a", "x": "a", "y": "b", "z": "b^2"},
    "frames": {
      "rad": [{"name": "E", "components": {"t": 1, "x": 1}}],
      "screen": [{"name": "X", "components": {"y": 1, "z": "2*y"}}],
      "ltr": [{"name": "N", "components": {"t": "-exp(-2*(p*x + q*y + s*z))/2", "x": "exp(-2*(p*x + q*y + s*z))/2"}}],
      "stransversal": [{"name": "W", "components": {"y": "-2*y", "z": 1}}]
    }
  },
  "sampling": {"count": 6, "seed": 11}
})json";

const std::map<std::string, std::string>& registry() {
  static const std::map<std::string, std::string> r{{"example-3.1", kExample31},
                                                    {"s3-great-sphere", kSphereEquator},
                                                    {"s3-small-sphere", kSphereLatitude},
                                                    {"conformal-r1", kConformalR1}};
  return r;
}

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

const std::string& builtin_text(const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end()) throw SchemaError("/", "unknown builtin '" + name + "'");
  return it->second;
}

}  // namespace nullgeo
