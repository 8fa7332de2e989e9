#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "nullgeo/errors.hpp"
#include "nullgeo/qgcr.hpp"
#include "nullgeo/scenario.hpp"

using namespace nullgeo;

namespace {

bool failed(const std::vector<CheckRecord>& rs, const std::string& id) {
  for (const auto& r : rs)
    if (r.check_id == id && r.verdict == Verdict::Fail) return true;
  return false;
}

class QgcrTest : public ::testing::Test {
 protected:
  ScenarioDocument doc = load_scenario("builtin:example-3.1");
  SubmanifoldScenario& sc = doc.sc;
  std::vector<SamplePoint> pts = sample_points(sc, 4, 3);

  GWTable table(std::size_t i) {
    PointFrame pf = evaluate_frame(sc, pts[i], static_cast<int>(i));
    return gauss_weingarten(sc, pf);
  }
};

}  // namespace

TEST_F(QgcrTest, BuiltinIsProperQgcr) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    GWTable gw = table(i);
    ASSERT_TRUE(gw.has_structure);
    QgcrVerdict v = verify_qgcr(sc, gw, static_cast<int>(i));
    for (const auto& r : v.records) EXPECT_NE(r.verdict, Verdict::Fail) << r.check_id << " " << r.residual;
    EXPECT_TRUE(v.qgcr);
    EXPECT_TRUE(v.proper);
    EXPECT_EQ(v.dims, (QgcrDims{3, 2, 1, 2, 7, 11}));
  }
}

// phi E3 = cos(theta) d/dx2 - sin(theta) d/dy2 = -X2 by hand.
TEST_F(QgcrTest, PhiOfE3IsMinusX2) {
  GWTable gw = table(0);
  const double th = M_PI / 4;
  Vec want = Vec::Zero(11);
  want(1) = std::cos(th);
  want(6) = -std::sin(th);
  EXPECT_LT((gw.phi * gw.frame.col(2) - want).norm(), 1e-14);
  EXPECT_LT((gw.phi * gw.frame.col(2) + gw.frame.col(4)).norm(), 1e-14);
}

// xi = d/dz = E3/2 + N3 by hand.
TEST_F(QgcrTest, XiDecomposition) {
  GWTable gw = table(1);
  XiDecomposition d = xi_decompose(gw);
  EXPECT_LT((d.a - (Vec(3) << 0, 0, 0.5).finished()).norm(), 1e-12);
  EXPECT_LT((d.b - (Vec(3) << 0, 0, 1.0).finished()).norm(), 1e-12);
  EXPECT_LT(d.xi_s.norm(), 1e-12);
  EXPECT_LT(d.c.norm(), 1e-12);
  EXPECT_LT(d.residual, 1e-12);
  Vec rebuilt = 0.5 * gw.frame.col(2) + gw.frame.col(9);
  EXPECT_LT((rebuilt - gw.xi).norm(), 1e-14);
}

TEST_F(QgcrTest, AscreenAndLemma) {
  GWTable gw = table(2);
  auto recs = verify_ascreen(sc, gw, 2);
  ASSERT_FALSE(recs.empty());
  for (const auto& r : recs) EXPECT_EQ(r.verdict, Verdict::Pass) << r.check_id;
  CheckRecord l = lemma52_check(sc, gw, 2, true);
  EXPECT_EQ(l.verdict, Verdict::Pass);
  EXPECT_LT(l.residual, 1e-12);
  EXPECT_EQ(lemma52_check(sc, gw, 2, false).verdict, Verdict::Skip);
}

TEST_F(QgcrTest, WrongRoleIsFrameError) {
  sc.qgcr.d0 = {"X3", "N1"};
  EXPECT_THROW(resolve_qgcr(sc), FrameError);
  sc.qgcr.d0 = {"X3", "Q9"};
  EXPECT_THROW(resolve_qgcr(sc), FrameError);
}

// phi E1 = E2, so {E1, E3} is not phi-invariant.
TEST_F(QgcrTest, NonInvariantD1Fails) {
  sc.qgcr.d1 = {"E1", "E3"};
  sc.qgcr.d2 = {"E2"};
  QgcrVerdict v = verify_qgcr(sc, table(0), 0);
  EXPECT_FALSE(v.qgcr);
  EXPECT_TRUE(failed(v.records, "qgcr.d1_invariant"));
}

TEST_F(QgcrTest, MovingXiOffTheRadicalBreaksAscreen) {
  // A d/dx5 component lies in span{X1, W}, outside Rad + ltr.
  sc.structure->xi.components[4] = Expression::parse("0.3", sc.coords);
  EXPECT_TRUE(failed(verify_ascreen(sc, table(0), 0), "ascreen.xi_in_rad_ltr"));
}
