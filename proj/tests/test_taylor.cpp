#include <gtest/gtest.h>

#include <random>

#include "vortex_atlas/taylor.hpp"

using namespace vortex_atlas;

namespace {

constexpr Complex I{0.0, 1.0};

TruncatedSeries X(int nvars, int order) { return seed_variable(0, 0.0, nvars, order); }
TruncatedSeries Y(int nvars, int order) { return seed_variable(1, 0.0, nvars, order); }
TruncatedSeries one(int nvars, int order) {
  return TruncatedSeries::constant(nvars, order, 1.0);
}

void expect_series_near(const TruncatedSeries& a, const TruncatedSeries& b, double tol) {
  ASSERT_TRUE(a.same_shape(b));
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_NEAR(std::abs(a[i] - b[i]), 0.0, tol) << "coefficient " << i;
}

TruncatedSeries random_series(std::mt19937_64& rng, int nvars, int order) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TruncatedSeries s(nvars, order);
  for (std::size_t i = 0; i < s.size(); ++i) s.set_coeff(s.exponents(i), Complex(u(rng), u(rng)));
  return s;
}

}  // namespace

TEST(Taylor, GradedLexLayout) {
  TruncatedSeries s(2, 2);
  ASSERT_EQ(s.size(), 6u);
  EXPECT_EQ(s.exponents(0), (MultiIndex{0, 0, 0, 0}));
  EXPECT_EQ(s.exponents(1), (MultiIndex{1, 0, 0, 0}));
  EXPECT_EQ(s.exponents(2), (MultiIndex{0, 1, 0, 0}));
  EXPECT_EQ(s.exponents(3), (MultiIndex{2, 0, 0, 0}));
  EXPECT_EQ(s.exponents(4), (MultiIndex{1, 1, 0, 0}));
  EXPECT_EQ(s.exponents(5), (MultiIndex{0, 2, 0, 0}));
}

TEST(Taylor, AddExamples) {
  const auto sum = (one(2, 2) + X(2, 2)) + (one(2, 2) + Y(2, 2));
  EXPECT_EQ(sum.coeff({0, 0}), Complex(2.0));
  EXPECT_EQ(sum.coeff({1, 0}), Complex(1.0));
  EXPECT_EQ(sum.coeff({0, 1}), Complex(1.0));

  const auto s = X(2, 3) * Complex(0.5, 2.0);
  expect_series_near(s + TruncatedSeries(2, 3), s, 0.0);

  const auto jet = cos(Y(2, 2)) + (-cos(X(2, 2)));
  EXPECT_NEAR(std::abs(jet.coeff({0, 0})), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(jet.coeff({2, 0}) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(jet.coeff({0, 2}) + 0.5), 0.0, 1e-15);
}

TEST(Taylor, MulExamples) {
  const auto p = (one(2, 2) + X(2, 2)) * (one(2, 2) + Y(2, 2));
  EXPECT_EQ(p.coeff({1, 1}), Complex(1.0));
  EXPECT_EQ(p.coeff({2, 0}), Complex(0.0));

  const auto t = X(2, 1) * Y(2, 1);
  EXPECT_EQ(t.max_abs(), 0.0);

  const auto z = X(2, 2) + Y(2, 2) * I;
  const auto sq = z * z;
  EXPECT_EQ(sq.coeff({2, 0}), Complex(1.0));
  EXPECT_EQ(sq.coeff({1, 1}), Complex(0.0, 2.0));
  EXPECT_EQ(sq.coeff({0, 2}), Complex(-1.0));
}

TEST(Taylor, ElementaryExamples) {
  const auto s = sin(X(2, 3));
  EXPECT_NEAR(std::abs(s.coeff({1, 0}) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s.coeff({3, 0}) + 1.0 / 6.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s.coeff({2, 0})), 0.0, 1e-15);

  const auto c = cos(Y(2, 3));
  EXPECT_NEAR(std::abs(c.coeff({0, 0}) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c.coeff({0, 2}) + 0.5), 0.0, 1e-15);

  const auto e = exp(X(2, 2) * I);
  EXPECT_NEAR(std::abs(e.coeff({0, 0}) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(e.coeff({1, 0}) - I), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(e.coeff({2, 0}) + 0.5), 0.0, 1e-15);

  EXPECT_EQ(elementary(Elementary::Neg, X(2, 2)).coeff({1, 0}), Complex(-1.0));
}

TEST(Taylor, ReciprocalGuard) {
  EXPECT_THROW(reciprocal(X(2, 3)), DivisionNearZero);
  const auto r = reciprocal(one(2, 3) + X(2, 3));
  // 1/(1+X) = 1 - X + X^2 - X^3
  EXPECT_NEAR(std::abs(r.coeff({3, 0}) + 1.0), 0.0, 1e-15);
}

TEST(Taylor, SeedVariable) {
  const auto s = seed_variable(0, 0.5, 2, 3);
  EXPECT_EQ(s.constant_term(), Complex(0.5));
  EXPECT_EQ(s.coeff({1, 0}), Complex(1.0));
  EXPECT_EQ(seed_variable(1, 0.0, 2, 2).constant_term(), Complex(0.0));
  const auto z = seed_variable(0, 0.3, 2, 2) + seed_variable(1, -0.2, 2, 2) * I;
  EXPECT_EQ(z.constant_term(), Complex(0.3, -0.2));
}

TEST(Taylor, ShapeMismatchThrows) {
  EXPECT_THROW(X(2, 2) + X(2, 3), ShapeError);
  EXPECT_THROW(X(2, 2) * X(3, 2), ShapeError);
  EXPECT_THROW(TruncatedSeries(5, 2), ShapeError);
  EXPECT_THROW(TruncatedSeries(2, 11), ShapeError);
}

TEST(Taylor, RingAxiomsOnRandomSeries) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const int nvars = 2 + trial % 3;
    const int order = 2 + trial % 5;
    const auto a = random_series(rng, nvars, order);
    const auto b = random_series(rng, nvars, order);
    const auto c = random_series(rng, nvars, order);
    expect_series_near(a + b, b + a, 1e-14);
    expect_series_near((a + b) + c, a + (b + c), 1e-14);
    expect_series_near(a * b, b * a, 1e-12);
    expect_series_near((a * b) * c, a * (b * c), 1e-11);
    expect_series_near(a * (b + c), a * b + a * c, 1e-11);
  }
}

TEST(Taylor, SineDerivativeIdentity) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int order = 4 + trial % 3;
    auto s = random_series(rng, 2, order);
    for (int var = 0; var < 2; ++var) {
      const auto lhs = sin(s).derivative(var);
      const auto rhs = cos(s) * s.derivative(var);
      // the derivative loses one degree, compare up to order - 1
      for (std::size_t i = 0; i < lhs.size(); ++i) {
        if (degree(lhs.exponents(i)) > order - 1) continue;
        EXPECT_NEAR(std::abs(lhs[i] - rhs[i]), 0.0, 1e-11);
      }
    }
  }
}

TEST(Taylor, ComposeMatchesDirectEvaluation) {
  // f(u, v) = u^2 v composed with u = 1 + X + Y, v = X - Y
  TruncatedSeries f(2, 3);
  f.set_coeff({2, 1}, 1.0);
  const int n = 2, ord = 3;
  const std::vector<TruncatedSeries> args = {one(n, ord) + X(n, ord) + Y(n, ord),
                                             X(n, ord) - Y(n, ord)};
  const auto composed = f.compose<Complex>(args);
  const auto direct = args[0] * args[0] * args[1];
  expect_series_near(composed, direct, 1e-14);
}

TEST(Taylor, DerivativeValueUsesFactorials) {
  const auto s = sin(X(2, 5));
  EXPECT_NEAR(std::abs(s.derivative_value({3, 0}) + 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(s.derivative_value({5, 0}) - 1.0), 0.0, 1e-14);
}

TEST(Taylor, EvaluateIsPolynomialValue) {
  const auto e = exp(X(2, 10));
  const std::array<double, 2> d{0.1, 0.0};
  EXPECT_NEAR(std::abs(e.evaluate(d) - std::exp(0.1)), 0.0, 1e-14);
}
