#include <gtest/gtest.h>

#include <random>

#include "vortex_atlas/catalog.hpp"
#include "vortex_atlas/classify.hpp"
#include "oracles.hpp"

using namespace vortex_atlas;
using oracles::image_side_oracle;
using oracles::same_class;

namespace {

const std::vector<double> kOrigin2{0.0, 0.0};
const std::vector<double> kOrigin3{0.0, 0.0, 0.0};

ClassificationReport classify_expr(std::string_view text, int dim = 2) {
  const FieldDef def = make_field("f", dim, false, text);
  return classify_point(def, dim == 2 ? kOrigin2 : kOrigin3);
}

}  // namespace

TEST(Jet, Coordinates) {
  const auto s = CompiledField(make_field("f", 2, false, "x^2/2 - y^2/2 + i*y")).jet(kOrigin2, 6);
  const Jet2 j = jet2_from_series(s);
  EXPECT_EQ(j.a, Complex(0, 0));
  EXPECT_EQ(j.b, Complex(0, 0));
  EXPECT_EQ(j.c, Complex(0, 1));
  EXPECT_EQ(j.e, Complex(1, 0));
  EXPECT_EQ(j.f, Complex(0, 0));
  EXPECT_EQ(j.g, Complex(-1, 0));

  const auto r = CompiledField(make_field("f", 2, false, "x + i*y")).jet(kOrigin2, 3);
  const auto v = jet_from_series(r);
  ASSERT_TRUE(std::holds_alternative<Jet2>(v));
  const Jet2& k = std::get<Jet2>(v);
  EXPECT_EQ(k.b, Complex(1, 0));
  EXPECT_EQ(k.c, Complex(0, 1));
  for (Complex z : {k.a, k.e, k.f, k.g, k.h, k.k, k.l, k.m}) EXPECT_EQ(z, Complex(0, 0));

  EXPECT_THROW(jet_from_series(CompiledField(make_field("f", 2, false, "x + i*y")).jet(kOrigin2, 2)),
               InsufficientOrder);
  const auto s3 = make_field("g", 3, false, "x*y*z + i*z");
  EXPECT_EQ(jet3_from_series(CompiledField(s3).jet(kOrigin3, 4)).coeffs.size(), 20u);
}

TEST(Classify2D, HyperbolicDiagnostics) {
  const auto r = classify_expr("x^2 - y^2 + i*y");
  EXPECT_EQ(r.cls.kind, ClassKind::Hyperbolic);
  ASSERT_EQ(r.kernel.size(), 2u);
  EXPECT_NEAR(r.kernel[0], 1.0, 1e-12);
  EXPECT_NEAR(r.kernel[1], 0.0, 1e-12);
  EXPECT_NEAR(*r.vlambda, 2.0, 1e-12);
  EXPECT_NEAR(*r.curvature, -2.0, 1e-12);
  EXPECT_NEAR(*r.fold_opening_normal, 2.0, 1e-12);
  EXPECT_NEAR(*r.curvature_product, -4.0, 1e-12);
}

TEST(Classify2D, Examples) {
  const auto e = classify_expr("x^2 + y^2 + i*y");
  EXPECT_EQ(e.cls.kind, ClassKind::Elliptic);
  EXPECT_NEAR(*e.curvature_product, 4.0, 1e-12);

  const auto c = classify_expr("x^3 + x*y + i*y");
  EXPECT_EQ(c.cls.kind, ClassKind::Cusp);
  EXPECT_NEAR(*c.vlambda, 0.0, 1e-12);
  EXPECT_NEAR(*c.v2lambda, 6.0, 1e-12);
  EXPECT_NEAR(c.dlambda[0], 0.0, 1e-12);
  EXPECT_NEAR(c.dlambda[1], 1.0, 1e-12);
  ASSERT_TRUE(c.cusp_orders.has_value());
  EXPECT_EQ(*c.cusp_orders, (std::array<int, 2>{2, 3}));

  EXPECT_EQ(classify_expr("cos(y) - cos(x) + i*sin(y)").cls.kind, ClassKind::Hyperbolic);

  const auto f = classify_expr("x^2 - y^3 + i*y");
  EXPECT_EQ(f.cls.label(), "DegenerateFold(3,-)");

  EXPECT_EQ(classify_expr("x + i*y").cls.kind, ClassKind::Regular);
  const auto z = classify_expr("x^2 + i*y^2");
  EXPECT_EQ(z.cls.kind, ClassKind::Degenerate);
  EXPECT_EQ(z.cls.reason, "corank 2");
  const auto flat = classify_expr("x^2 + i*y");
  EXPECT_EQ(flat.cls.reason, "flat discriminant contact");
}

TEST(Classify2D, NotOnDislocation) {
  EXPECT_THROW(classify_expr("x + 1 + i*y"), NotOnDislocation);
  EXPECT_THROW(classify_point(catalog_get("H3.DH"), kOrigin2), Error);
}

TEST(ContactOrder, Examples) {
  auto jet = [](std::string_view text) {
    return jet2_from_series(CompiledField(make_field("f", 2, false, text)).jet(kOrigin2, 6));
  };
  const auto a = contact_order(jet("x^2 - y^2 + i*y"), {1, 0}, 5);
  EXPECT_EQ(a.m, 2);
  EXPECT_EQ(a.sign, -1);
  const auto b = contact_order(jet("x^2 + y^4 + i*y"), {1, 0}, 5);
  EXPECT_EQ(b.m, 4);
  EXPECT_EQ(b.sign, 1);
  EXPECT_THROW(contact_order(jet("x^2 + i*y"), {1, 0}, 5), AllOrdersVanish);
  EXPECT_THROW(contact_order(jet("x^2 + i*y"), {1, 0}, 6), InsufficientOrder);
}

TEST(Classify3D, Examples) {
  const auto dh = classify_expr("x^2 + y^2 - z^2 + i*z", 3);
  EXPECT_EQ(dh.cls.kind, ClassKind::DefiniteHyperbolic);
  ASSERT_EQ(dh.restricted_eigenvalues.size(), 2u);
  EXPECT_NEAR(dh.restricted_eigenvalues[0], 2.0, 1e-12);
  EXPECT_NEAR(dh.restricted_eigenvalues[1], 2.0, 1e-12);
  EXPECT_LT(*dh.curvature_product, 0.0);
  EXPECT_EQ(classify_expr("x^2 - y^2 - z^2 + i*z", 3).cls.kind, ClassKind::Indefinite);
  EXPECT_EQ(classify_expr("x^3 + x*y + z^2 + i*y", 3).cls.kind, ClassKind::SpatialCusp);
  EXPECT_EQ(classify_expr("x^2 + y^2 + z^2 + i*z", 3).cls.kind, ClassKind::DefiniteElliptic);
  EXPECT_EQ(classify_expr("x + i*y", 3).cls.kind, ClassKind::Regular);
}

TEST(Classify, CatalogLabels) {
  for (const auto& e : catalog_entries()) {
    if (e.expected_class.empty()) continue;
    const auto& pt = e.def.dim == 2 ? kOrigin2 : kOrigin3;
    const auto r = classify_point(e.def, pt);
    EXPECT_EQ(r.cls.label(), e.expected_class) << e.def.name;
  }
  const auto m4 = catalog_instantiate("H2.foldm", {{"m", 4}, {"sign", 1}});
  EXPECT_EQ(classify_point(m4, kOrigin2).cls.label(), "DegenerateFold(4,+)");
}

TEST(Classify, ScaleRobust) {
  for (const auto& e : catalog_entries()) {
    if (e.expected_class.empty()) continue;
    const auto& pt = e.def.dim == 2 ? kOrigin2 : kOrigin3;
    for (double c : {1e-3, 1.0, 1e3}) {
      FieldDef scaled = e.def;
      scaled.expr = expr::mul(expr::number(c), e.def.expr);
      EXPECT_EQ(classify_point(scaled, pt).cls.label(), e.expected_class)
          << e.def.name << " c=" << c;
    }
  }
}

TEST(Classify, RadialInvariance) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  int checked = 0;
  for (const auto& e : catalog_entries()) {
    if (e.def.dim != 2 || e.expected_class.empty()) continue;
    const auto base = classify_point(e.def, kOrigin2);
    if (base.cls.kind == ClassKind::Degenerate) continue;
    for (int trial = 0; trial < 4; ++trial) {
      std::array<double, 4> s{};
      do {
        for (auto& x : s) x = unit(rng);
      } while (std::abs(s[0] * s[3] - s[1] * s[2]) <= 0.1);
      std::array<double, 4> lin{};
      do {
        for (auto& x : lin) x = unit(rng);
      } while (std::abs(lin[0] * lin[3] - lin[1] * lin[2]) <= 0.1);
      const std::string rho = "1 + " + detail::format_number(0.5 * std::abs(unit(rng))) +
                              "*u^2 + " + detail::format_number(0.3 * unit(rng)) + "*w";
      const FieldDef g = compose_radial(e.def, make_radial(lin, rho), s);
      // the zero at the origin maps to the origin under any linear change
      const auto r = classify_point(g, kOrigin2);
      EXPECT_TRUE(same_class(r.cls, base.cls))
          << e.def.name << " got " << r.cls.label() << " trial " << trial;
      ++checked;
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(Classify, RadialInvarianceAwayFromOrigin) {
  // regular zero of H_t at (0.5, 0) maps to S^-1 (0.5, 0)
  const FieldDef src = catalog_get("H2.Ht");
  const ParamMap p{{"t", -0.25}};
  const std::array<double, 4> s{0.7, 0.2, -0.4, 0.9};
  const FieldDef g = compose_radial(src, make_radial({1.0, 0.5, 0.0, 1.0}, "2 + w^2"), s);
  const double det = s[0] * s[3] - s[1] * s[2];
  const std::vector<double> z{0.5, 0.0};
  const std::vector<double> pre{(s[3] * z[0] - s[1] * z[1]) / det,
                                (-s[2] * z[0] + s[0] * z[1]) / det};
  EXPECT_EQ(classify_point(src, z, p).cls.kind, ClassKind::Regular);
  EXPECT_EQ(classify_point(g, pre, p).cls.kind, ClassKind::Regular);
}


TEST(Classify, BruteForceConvexityOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  int decided = 0;
  for (int trial = 0; trial < 60; ++trial) {
    // rank-1 polynomial jets: u has no linear part, w = y + ...
    auto c = [&] { return detail::format_number(unit(rng)); };
    const std::string text = "(" + c() + ")*x^2 + (" + c() + ")*x*y + (" + c() + ")*y^2 + (" +
                             c() + ")*x^3 + (" + c() + ")*y^3 + i*(y + (" + c() + ")*x^2 + (" +
                             c() + ")*y^2)";
    const FieldDef def = make_field("poly", 2, false, text);
    const auto r = classify_point(def, kOrigin2);
    if (r.cls.kind != ClassKind::Hyperbolic && r.cls.kind != ClassKind::Elliptic) continue;
    const int oracle = image_side_oracle(CompiledField(def));
    if (oracle == 0) continue;
    EXPECT_EQ(oracle, r.cls.kind == ClassKind::Elliptic ? 1 : -1) << text;
    ++decided;
  }
  EXPECT_GT(decided, 30);
  for (const char* name : {"H2.hyperbolic", "H2.elliptic", "H2.helmholtz-hyperbolic",
                           "H2.helmholtz-hyperbolic-alt"}) {
    const auto& e = catalog_entry(name);
    EXPECT_EQ(image_side_oracle(CompiledField(e.def)), e.expected_class == "Elliptic" ? 1 : -1)
        << name;
  }
}

TEST(PhaseCritical, Examples) {
  auto kind = [](std::string_view text) {
    return classify_phase_critical(make_field("f", 2, false, text), kOrigin2).kind;
  };
  EXPECT_EQ(kind("exp(i*(x^2 + y^2))"), PhaseCriticalKind::Extremum);
  EXPECT_EQ(kind("exp(i*(x^2 - y^2))"), PhaseCriticalKind::Saddle);
  EXPECT_EQ(kind("exp(i*(x^3 + y^2))"), PhaseCriticalKind::DegenerateCritical);
  EXPECT_EQ(kind("2*exp(i*(1 - x^2 - 3*y^2))"), PhaseCriticalKind::Extremum);
  EXPECT_THROW(kind("exp(i*x)"), NotCritical);
  EXPECT_THROW(kind("x + i*y"), OnDislocation);
}
