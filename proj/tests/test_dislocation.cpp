#include <gtest/gtest.h>

#include <algorithm>

#include "vortex_atlas/catalog.hpp"
#include "vortex_atlas/dislocation.hpp"

using namespace vortex_atlas;

namespace {

std::vector<std::array<double, 2>> sorted_locations(const ScanResult& r) {
  std::vector<std::array<double, 2>> out;
  for (const auto& p : r.points) out.push_back({p.location[0], p.location[1]});
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Scan, RegularFieldHasOneZero) {
  const auto r = scan_zeros_2d(catalog_get("H2.regular"), Region::cube(2, -1, 1));
  ASSERT_EQ(r.points.size(), 1u);
  EXPECT_LT(std::hypot(r.points[0].location[0], r.points[0].location[1]), 1e-12);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Scan, CuspFamilyThreeZeros) {
  const auto r = scan_zeros_2d(catalog_get("H2.cusp-family"), Region::cube(2, -1, 1),
                               {{"a", 0.25}, {"b", 0.0}});
  const auto locs = sorted_locations(r);
  ASSERT_EQ(locs.size(), 3u);
  const std::array<std::array<double, 2>, 3> expected{{{-0.5, -0.25}, {0.0, -0.25}, {0.5, -0.25}}};
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(locs[k][0], expected[k][0], 1e-8);
    EXPECT_NEAR(locs[k][1], expected[k][1], 1e-8);
  }
}

TEST(Scan, HtPositiveTimeIsEmpty) {
  const auto r = scan_zeros_2d(catalog_get("H2.Ht"), Region::cube(2, -1, 1), {{"t", 0.25}});
  EXPECT_TRUE(r.points.empty());
}

TEST(Scan, DegenerateZerosAreKeptOnce) {
  for (const char* name : {"H2.hyperbolic", "H2.elliptic", "H2.cusp-normal", "H2.fold3-",
                           "H2.fold4+", "H2.helmholtz-cusp"}) {
    const auto r = scan_zeros_2d(catalog_get(name), Region::cube(2, -1, 1));
    ASSERT_EQ(r.points.size(), 1u) << name;
    EXPECT_TRUE(r.points[0].degenerate) << name;
    EXPECT_LT(std::hypot(r.points[0].location[0], r.points[0].location[1]), 1e-4) << name;
  }
}

TEST(Scan, ZerosReevaluateBelowTolerance) {
  const std::vector<std::pair<const char*, ParamMap>> cases = {
      {"H2.helmholtz-hyperbolic", {}},
      {"H2.helmholtz-hyperbolic-alt", {}},
      {"H2.cusp-family", {{"a", 0.1}, {"b", 0.01}}}};
  for (const auto& [name, params] : cases) {
    const FieldDef& def = catalog_get(name);
    const auto r = scan_zeros_2d(def, Region::cube(2, -1, 1), params);
    EXPECT_FALSE(r.points.empty()) << name;
    for (const auto& p : r.points)
      EXPECT_LT(std::abs(eval_field(def, p.location, params)), r.tau_zero) << name;
  }
}

TEST(Scan, DoublingResolutionKeepsCounts) {
  for (const auto& e : catalog_entries()) {
    if (e.def.dim != 2 || e.def.time_dependent) continue;
    const auto coarse = scan_zeros_2d(e.def, Region::cube(2, -1, 1, 51));
    const auto fine = scan_zeros_2d(e.def, Region::cube(2, -1, 1, 101));
    EXPECT_GE(fine.points.size(), coarse.points.size()) << e.def.name;
  }
}

TEST(Refine, Examples) {
  const auto p = refine_zero(catalog_get("H2.regular"), {0.1, 0.05});
  EXPECT_LT(std::hypot(p.location[0], p.location[1]), 1e-15);
  EXPECT_LE(p.newton_iters, 3);

  const auto q = refine_zero(catalog_get("H2.cusp-family"), {0.45, -0.2}, {{"a", 0.25}});
  EXPECT_NEAR(q.location[0], 0.5, 1e-12);
  EXPECT_NEAR(q.location[1], -0.25, 1e-12);

  EXPECT_THROW(refine_zero(catalog_get("H2.hyperbolic"), {0.0, 0.0}), SingularJacobian);
  EXPECT_THROW(refine_zero(catalog_get("H2.Ht"), {0.3, 0.0}, {{"t", 0.25}}), Error);
}

TEST(Refine, SingularJacobianCarriesIterate) {
  try {
    refine_zero(catalog_get("H2.hyperbolic"), {0.0, 0.0});
    FAIL();
  } catch (const SingularJacobian& e) {
    EXPECT_EQ(e.point().size(), 2u);
    EXPECT_EQ(e.residual(), 0.0);
  }
}

TEST(Scan, RadialCompositionMapsZerosByInverse) {
  // psi(S p) vanishes at S^-1 z for each zero z of psi
  const FieldDef& src = catalog_get("H2.cusp-family");
  const ParamMap params{{"a", 0.25}, {"b", 0.0}};
  const std::array<double, 4> s{1.0, 0.3, -0.2, 0.9};
  const FieldDef g = compose_radial(src, make_radial({0.8, 0.1, -0.3, 1.2}, "1 + u^2"), s);
  const auto a = scan_zeros_2d(src, Region::cube(2, -1, 1), params);
  const auto b = scan_zeros_2d(g, Region::cube(2, -1.5, 1.5), params);
  ASSERT_EQ(a.points.size(), b.points.size());
  const double det = s[0] * s[3] - s[1] * s[2];
  for (const auto& z : a.points) {
    const double x = (s[3] * z.location[0] - s[1] * z.location[1]) / det;
    const double y = (-s[2] * z.location[0] + s[0] * z.location[1]) / det;
    double best = 1e9;
    for (const auto& w : b.points) best = std::min(best, std::hypot(w.location[0] - x, w.location[1] - y));
    EXPECT_LT(best, 1e-6 * std::hypot(0.03, 0.03));
  }
}

TEST(Trace, DHtCircle) {
  const auto r = trace_dislocation_3d(catalog_get("H3.DHt"), Region::cube(3, -1, 1, 41),
                                      {{"t", -0.25}});
  ASSERT_EQ(r.curves.size(), 1u);
  const auto& c = r.curves[0];
  EXPECT_EQ(c.status, CurveStatus::Closed);
  EXPECT_EQ(c.vertices.front(), c.vertices.back());
  EXPECT_GT(c.vertices.size(), 20u);
  for (const auto& v : c.vertices) {
    EXPECT_NEAR(std::hypot(v[0], v[1]), 0.5, 1e-6);
    EXPECT_NEAR(v[2], 0.0, 1e-9);
  }
  EXPECT_LT(c.max_vertex_residual, r.tau_zero);
}

TEST(Trace, DEtIsolatedPoint) {
  const auto r = trace_dislocation_3d(catalog_get("H3.DEt"), Region::cube(3, -1, 1, 21));
  ASSERT_EQ(r.curves.size(), 1u);
  EXPECT_EQ(r.curves[0].status, CurveStatus::IsolatedPoint);
  EXPECT_EQ(r.curves[0].vertices.size(), 1u);
  const auto& p = r.curves[0].vertices[0];
  EXPECT_LT(std::hypot(p[0], p[1], p[2]), 1e-4);
}

TEST(Trace, ItHyperbolaBranches) {
  const auto r = trace_dislocation_3d(catalog_get("H3.It"), Region::cube(3, -1, 1, 31),
                                      {{"t", 0.25}});
  ASSERT_EQ(r.curves.size(), 2u);
  for (const auto& c : r.curves) {
    EXPECT_EQ(c.status, CurveStatus::OpenAtBoundary);
    for (const auto& v : c.vertices) {
      EXPECT_NEAR(v[2], 0.0, 1e-9);
      EXPECT_NEAR(v[0] * v[0] - v[1] * v[1], -0.25, 1e-9);
    }
  }
}

TEST(Trace, RegularLineThroughBox) {
  const auto r = trace_dislocation_3d(catalog_get("H3.regular"), Region::cube(3, -1, 1, 11));
  ASSERT_EQ(r.curves.size(), 1u);
  EXPECT_EQ(r.curves[0].status, CurveStatus::OpenAtBoundary);
  for (const auto& v : r.curves[0].vertices) EXPECT_LT(std::hypot(v[0], v[1]), 1e-12);
}

TEST(Sweep, HtCounts) {
  const auto s = sweep_parameter(catalog_get("H2.Ht"), Region::cube(2, -1, 1), "t",
                                 {-0.25, 0.0, 0.25});
  EXPECT_EQ(s.counts, (std::vector<int>{2, 1, 0}));
  ASSERT_EQ(s.events.size(), 2u);
  EXPECT_EQ(s.events[0].from, -0.25);
  EXPECT_EQ(s.events[0].to, 0.0);
  EXPECT_EQ(s.events[1].count_before, 1);
  EXPECT_EQ(s.events[1].count_after, 0);
}

TEST(Sweep, CuspFamilyThreePointBifurcation) {
  const auto s = sweep_parameter(catalog_get("H2.cusp-family"), Region::cube(2, -1, 1), "a",
                                 {-0.25, 0.0, 0.25}, {{"b", 0.0}});
  EXPECT_EQ(s.counts, (std::vector<int>{1, 1, 3}));
  ASSERT_EQ(s.events.size(), 1u);
  EXPECT_EQ(s.events[0].from, 0.0);
}

TEST(Sweep, ConstantFieldHasNoEvents) {
  const FieldDef def = make_field("still", 2, false, "x + i*y + 0*t", {{"t", 0.0}});
  const auto s = sweep_parameter(def, Region::cube(2, -1, 1, 21), "t", {0.0, 0.5, 1.0});
  EXPECT_TRUE(s.events.empty());
  EXPECT_THROW(sweep_parameter(def, Region::cube(2, -1, 1, 21), "q", {0.0}), BadParameter);
}

TEST(Region, Validation) {
  Region r = Region::cube(2, -1, 1);
  r.resolution[0] = 1;
  EXPECT_THROW(r.validate(), BadParameter);
  EXPECT_THROW(Region::cube(2, 1, -1), BadParameter);
  EXPECT_THROW(scan_zeros_2d(catalog_get("H3.DH"), Region::cube(2, -1, 1)), DimMismatch);
}
