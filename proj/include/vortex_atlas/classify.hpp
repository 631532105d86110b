/**
 * @file classify.hpp
 * @brief Classification of phase singularities at dislocation zeros from
 * their jets, and of phase critical points off the zero set.
 *
 * Decisions use computable invariants (rank of the real differential,
 * derivatives of the Jacobian determinant lambda along the kernel, the
 * curvature of the discriminant against the fold opening, contact order).
 * No normalizing transformation is constructed.
 */
#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vortex_atlas/errors.hpp"
#include "vortex_atlas/field.hpp"
#include "vortex_atlas/linalg.hpp"
#include "vortex_atlas/taylor.hpp"

namespace vortex_atlas {

/// All thresholds are relative to the jet norm (max |d^alpha psi|,
/// 1 <= |alpha| <= 3) raised to the homogeneity degree of the quantity.
struct ToleranceSet {
  double zero = 1e-8;     ///< |psi(p)| allowed at a "zero", relative
  double rank = 1e-7;     ///< singular-value ratio
  double fold = 1e-7;     ///< v(lambda), v^2(lambda), dlambda
  double curv = 1e-7;     ///< |kappa_n * Q_n|
  double contact = 1e-7;  ///< normal coefficients of the discriminant
  double grad = 1e-8;     ///< phase gradient at a critical point
  double hess = 1e-8;     ///< phase Hessian determinant
};

/// Coefficients a..m with the factorial convention
/// a + bX + cY + (e/2)X^2 + fXY + (g/2)Y^2 + (h/6)X^3 + (k/2)X^2Y + (l/2)XY^2 + (m/6)Y^3.
struct Jet2 {
  std::array<double, 2> basepoint{};
  Complex a, b, c, e, f, g, h, k, l, m;
  TruncatedSeries series;  ///< full expansion (order >= 3)
};

/// Degree <= 3 coefficients in graded-lex order; coeffs[i] multiplies the
/// monomial series.exponents(i).
struct Jet3 {
  std::array<double, 3> basepoint{};
  std::vector<Complex> coeffs;
  TruncatedSeries series;
};

inline Jet2 jet2_from_series(const TruncatedSeries& s, std::array<double, 2> basepoint = {}) {
  if (s.nvars() != 2) throw DimMismatch("Jet2 needs a 2-variable series");
  if (s.order() < 3) throw InsufficientOrder("jet coordinates need series order >= 3");
  Jet2 j;
  j.basepoint = basepoint;
  j.a = s.coeff({0, 0});
  j.b = s.coeff({1, 0});
  j.c = s.coeff({0, 1});
  j.e = 2.0 * s.coeff({2, 0});
  j.f = s.coeff({1, 1});
  j.g = 2.0 * s.coeff({0, 2});
  j.h = 6.0 * s.coeff({3, 0});
  j.k = 2.0 * s.coeff({2, 1});
  j.l = 2.0 * s.coeff({1, 2});
  j.m = 6.0 * s.coeff({0, 3});
  j.series = s;
  return j;
}

inline Jet3 jet3_from_series(const TruncatedSeries& s, std::array<double, 3> basepoint = {}) {
  if (s.nvars() != 3) throw DimMismatch("Jet3 needs a 3-variable series");
  if (s.order() < 3) throw InsufficientOrder("jet coordinates need series order >= 3");
  Jet3 j;
  j.basepoint = basepoint;
  for (std::size_t i = 0; i < s.size() && degree(s.exponents(i)) <= 3; ++i)
    j.coeffs.push_back(s[i]);
  j.series = s;
  return j;
}

/// jet_from_series: Jet2 or Jet3 by variable count.
inline std::variant<Jet2, Jet3> jet_from_series(const TruncatedSeries& s) {
  if (s.nvars() == 2) return jet2_from_series(s);
  if (s.nvars() == 3) return jet3_from_series(s);
  throw DimMismatch("jets are defined for 2 or 3 variables");
}

enum class ClassKind {
  Regular,
  Hyperbolic,
  Elliptic,
  DegenerateFold,
  Cusp,
  DefiniteHyperbolic,
  DefiniteElliptic,
  Indefinite,
  SpatialCusp,
  Degenerate,
};

inline const char* to_string(ClassKind k) {
  switch (k) {
    case ClassKind::Regular: return "Regular";
    case ClassKind::Hyperbolic: return "Hyperbolic";
    case ClassKind::Elliptic: return "Elliptic";
    case ClassKind::DegenerateFold: return "DegenerateFold";
    case ClassKind::Cusp: return "Cusp";
    case ClassKind::DefiniteHyperbolic: return "DefiniteHyperbolic";
    case ClassKind::DefiniteElliptic: return "DefiniteElliptic";
    case ClassKind::Indefinite: return "Indefinite";
    case ClassKind::SpatialCusp: return "SpatialCusp";
    case ClassKind::Degenerate: return "Degenerate";
  }
  return "Unknown";
}

struct SingularityClass {
  ClassKind kind = ClassKind::Degenerate;
  int order = 0;       ///< DegenerateFold: contact order m
  int sign = 0;        ///< DegenerateFold: +1 or -1
  std::string reason;  ///< Degenerate: machine-readable reason

  /// "DegenerateFold(3,-)" for degenerate folds, the bare kind otherwise.
  std::string label() const {
    if (kind == ClassKind::DegenerateFold)
      return "DegenerateFold(" + std::to_string(order) + "," + (sign < 0 ? "-" : "+") + ")";
    return to_string(kind);
  }
  bool operator==(const SingularityClass& o) const {
    return kind == o.kind && order == o.order && sign == o.sign;
  }
};

struct ClassificationReport {
  SingularityClass cls;
  int dim = 2;
  std::vector<double> basepoint;
  double jet_norm = 0.0;
  double value_abs = 0.0;  ///< |psi| at the basepoint
  std::vector<double> singular_values;
  int rank = 0;
  std::vector<double> kernel;   ///< unit kernel vector (2D) or null direction (3D cusp test)
  std::optional<double> vlambda;
  std::optional<double> v2lambda;
  std::vector<double> dlambda;
  std::vector<double> fold_opening;  ///< Q = d^2 psi(v, v) as (Re, Im)
  std::optional<double> fold_opening_normal;
  std::vector<double> tangent;       ///< unit tangent of the discriminant
  std::vector<double> normal;
  std::optional<double> curvature;   ///< normal curvature of the discriminant
  std::optional<double> curvature_product;
  std::optional<int> contact_order;
  std::optional<int> contact_sign;
  std::optional<std::array<int, 2>> cusp_orders;
  std::vector<double> restricted_eigenvalues;  ///< 3D: eigenvalues of q on the kernel
  std::vector<std::string> notes;
  ToleranceSet tolerances;
};

struct ContactOrder {
  int m = 0;
  int sign = 0;
};

namespace detail {

inline double jet_norm(const TruncatedSeries& s) {
  double n = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const int d = degree(s.exponents(i));
    if (d > 3) break;
    n = std::max(n, std::abs(s.derivative_value(s.exponents(i))));
  }
  return n;
}

inline MultiIndex unit_index(int v) {
  MultiIndex a{};
  a[v] = 1;
  return a;
}

inline std::vector<double> gradient(const RealSeries& s) {
  std::vector<double> g(s.nvars());
  for (int v = 0; v < s.nvars(); ++v) g[v] = s.coeff(unit_index(v));
  return g;
}

inline linalg::Mat hessian(const RealSeries& s) {
  const int n = s.nvars();
  linalg::Mat h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      MultiIndex a{};
      ++a[i];
      ++a[j];
      h(i, j) = s.derivative_value(a);
    }
  return h;
}

/// Directional derivative along a constant vector.
inline RealSeries along(const RealSeries& s, const std::vector<double>& v) {
  RealSeries out(s.nvars(), s.order());
  for (int i = 0; i < s.nvars(); ++i)
    if (v[i] != 0.0) out += s.derivative(i) * v[i];
  return out;
}

inline double quad(const linalg::Mat& h, const std::vector<double>& v) {
  double q = 0.0;
  for (int i = 0; i < h.rows; ++i)
    for (int j = 0; j < h.cols; ++j) q += v[i] * h(i, j) * v[j];
  return q;
}

/// Deterministic sign: largest-magnitude component positive.
inline void orient(std::vector<double>& v) {
  std::size_t big = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[big]) + 1e-12) big = i;
  if (v[big] < 0)
    for (auto& x : v) x = -x;
}

/// Planar Jacobian determinant lambda = u_x w_y - u_y w_x, valid to
/// order - 1.
inline RealSeries jacobian_determinant(const RealSeries& u, const RealSeries& w) {
  const RealSeries ux = u.derivative(0), uy = u.derivative(1);
  const RealSeries wx = w.derivative(0), wy = w.derivative(1);
  return (ux * wy - uy * wx).with_order(u.order() - 1);
}

/// Critical curve {lambda = lambda(0)} through the origin as 1-variable
/// series: the coordinate with the larger |d lambda| is solved for, the
/// other one is the parameter s (increasing).
struct CriticalCurve {
  int solved = 0;
  std::vector<RealSeries> coords;  ///< (x(s), y(s))
};

inline CriticalCurve critical_curve(const RealSeries& lambda) {
  const int order = lambda.order();
  const double gx = lambda.coeff({1, 0}), gy = lambda.coeff({0, 1});
  CriticalCurve cc;
  cc.solved = std::abs(gx) >= std::abs(gy) ? 0 : 1;
  const double g = cc.solved == 0 ? gx : gy;
  if (g == 0.0) throw NearSingularMatrix("critical set is not a smooth curve");
  RealSeries lam = lambda;
  lam.add_constant(-lambda.constant_term());
  const RealSeries s = RealSeries::variable(0, 0.0, 1, order);
  RealSeries solved(1, order);
  cc.coords = cc.solved == 0 ? std::vector<RealSeries>{solved, s} : std::vector<RealSeries>{s, solved};
  for (int it = 0; it <= order + 1; ++it) {
    const RealSeries r = lam.compose<double>(cc.coords);
    cc.coords[cc.solved] -= r * (1.0 / g);
  }
  return cc;
}

/// Discriminant gamma(s) = psi(critical(s)) as (Re, Im) coefficient pairs.
inline std::vector<std::array<double, 2>> discriminant(const TruncatedSeries& psi,
                                                       const CriticalCurve& cc) {
  const TruncatedSeries gamma = psi.with_order(cc.coords[0].order()).compose<double>(cc.coords);
  std::vector<std::array<double, 2>> out;
  for (int k = 0; k <= gamma.order(); ++k) {
    const Complex c = gamma.coeff({k});
    out.push_back({c.real(), c.imag()});
  }
  return out;
}

struct FoldGeometry {
  std::vector<std::array<double, 2>> gamma;
  std::array<double, 2> tangent{}, normal{};
  double curvature = 0.0;
  std::array<double, 2> q{};
  double q_normal = 0.0;
};

inline FoldGeometry fold_geometry(const TruncatedSeries& psi, const std::vector<double>& v,
                                  const RealSeries& lambda) {
  FoldGeometry fg;
  fg.gamma = discriminant(psi, critical_curve(lambda));
  const auto& g1 = fg.gamma[1];
  const double speed = std::hypot(g1[0], g1[1]);
  if (!(speed > 0.0)) throw NearSingularMatrix("discriminant has no tangent");
  fg.tangent = {g1[0] / speed, g1[1] / speed};
  fg.normal = {fg.tangent[1], -fg.tangent[0]};
  const auto& g2 = fg.gamma[2];
  fg.curvature = 2.0 * (g2[0] * fg.normal[0] + g2[1] * fg.normal[1]) / (speed * speed);
  const linalg::Mat hu = hessian(real_part(psi)), hw = hessian(imag_part(psi));
  fg.q = {quad(hu, v), quad(hw, v)};
  fg.q_normal = fg.q[0] * fg.normal[0] + fg.q[1] * fg.normal[1];
  return fg;
}

inline std::optional<ContactOrder> contact_from_geometry(const FoldGeometry& fg, int mmax,
                                                         double threshold) {
  for (int m = 2; m <= mmax && m < static_cast<int>(fg.gamma.size()); ++m) {
    const double alpha = fg.gamma[m][0] * fg.normal[0] + fg.gamma[m][1] * fg.normal[1];
    if (std::abs(alpha) > threshold) return ContactOrder{m, alpha * fg.q_normal > 0 ? 1 : -1};
  }
  return std::nullopt;
}

inline std::string fmt(double v) { return detail::format_number(v); }

inline SingularityClass degenerate(std::string reason) {
  return SingularityClass{ClassKind::Degenerate, 0, 0, std::move(reason)};
}

}  // namespace detail

/// contact_order: first non-vanishing normal coefficient of the
/// discriminant (2 <= m <= mmax) and its sign against the fold opening Q_n.
inline ContactOrder contact_order(const Jet2& j, std::array<double, 2> kernel, int mmax,
                                  const ToleranceSet& tol = {}) {
  const auto& s = j.series;
  if (mmax > s.order() - 1)
    throw InsufficientOrder("contact order " + std::to_string(mmax) + " needs series order " +
                            std::to_string(mmax + 1));
  const RealSeries lambda = detail::jacobian_determinant(real_part(s), imag_part(s));
  const auto fg = detail::fold_geometry(s, {kernel[0], kernel[1]}, lambda);
  const auto c = detail::contact_from_geometry(fg, mmax, tol.contact * detail::jet_norm(s));
  if (!c) throw AllOrdersVanish("discriminant is flat up to order " + std::to_string(mmax));
  return *c;
}

/// classify_jet_2d: decision procedure on the planar jet.
inline ClassificationReport classify_jet_2d(const Jet2& j, const ToleranceSet& tol = {}) {
  const TruncatedSeries& s = j.series;
  if (s.nvars() != 2) throw DimMismatch("classify_jet_2d needs a planar jet");
  if (s.order() < 3) throw InsufficientOrder("classification needs series order >= 3");
  ClassificationReport rep;
  rep.dim = 2;
  rep.basepoint = {j.basepoint[0], j.basepoint[1]};
  rep.tolerances = tol;
  rep.jet_norm = detail::jet_norm(s);
  rep.value_abs = std::abs(s.constant_term());
  const double norm = rep.jet_norm;
  if (rep.value_abs > tol.zero * norm || (norm == 0.0 && rep.value_abs > 0.0))
    throw NotOnDislocation("|psi| = " + detail::fmt(rep.value_abs) + " exceeds " +
                           detail::fmt(tol.zero) + " x jet norm " + detail::fmt(norm));

  const RealSeries u = real_part(s), w = imag_part(s);
  linalg::Mat d(2, 2);
  const auto gu = detail::gradient(u), gw = detail::gradient(w);
  d(0, 0) = gu[0];
  d(0, 1) = gu[1];
  d(1, 0) = gw[0];
  d(1, 1) = gw[1];
  const auto sv = linalg::svd(d);
  rep.singular_values = sv.singular;
  if (!(sv.singular[0] > tol.rank * norm)) {
    rep.rank = 0;
    rep.cls = detail::degenerate("corank 2");
    return rep;
  }
  if (sv.singular[1] > tol.rank * sv.singular[0]) {
    rep.rank = 2;
    rep.cls = SingularityClass{ClassKind::Regular};
    return rep;
  }
  rep.rank = 1;
  std::vector<double> v{sv.v(0, 1), sv.v(1, 1)};
  detail::orient(v);
  rep.kernel = v;

  const RealSeries lambda = detail::jacobian_determinant(u, w);
  rep.dlambda = detail::gradient(lambda);
  const double n2 = norm * norm;
  const double vl = rep.dlambda[0] * v[0] + rep.dlambda[1] * v[1];
  rep.vlambda = vl;

  if (std::abs(vl) > tol.fold * n2) {
    const auto fg = detail::fold_geometry(s, v, lambda);
    rep.fold_opening = {fg.q[0], fg.q[1]};
    rep.fold_opening_normal = fg.q_normal;
    rep.tangent = {fg.tangent[0], fg.tangent[1]};
    rep.normal = {fg.normal[0], fg.normal[1]};
    rep.curvature = fg.curvature;
    const double product = fg.curvature * fg.q_normal;
    rep.curvature_product = product;
    if (std::abs(product) > tol.curv) {
      rep.cls = SingularityClass{product > 0 ? ClassKind::Elliptic : ClassKind::Hyperbolic};
      rep.contact_order = 2;
      rep.contact_sign = product > 0 ? 1 : -1;
      return rep;
    }
    const auto c = detail::contact_from_geometry(fg, s.order() - 1, tol.contact * norm);
    if (!c) {
      rep.cls = detail::degenerate("flat discriminant contact");
      return rep;
    }
    rep.contact_order = c->m;
    rep.contact_sign = c->sign;
    if (c->m == 2) {
      rep.cls = detail::degenerate("curvature product near tolerance");
      return rep;
    }
    rep.cls = SingularityClass{ClassKind::DegenerateFold, c->m, c->sign};
    return rep;
  }

  // cusp test with the kernel field eta, which is tangent to the kernel of
  // d psi at every point of the critical set
  const bool use_w = std::hypot(gw[0], gw[1]) >= std::hypot(gu[0], gu[1]);
  const RealSeries& base = use_w ? w : u;
  const int lo = lambda.order();
  RealSeries ex = base.derivative(1).with_order(lo), ey = base.derivative(0).with_order(lo) * -1.0;
  std::vector<double> eta0{ex.constant_term(), ey.constant_term()};
  if (eta0[0] * v[0] + eta0[1] * v[1] < 0) {
    ex *= -1.0;
    ey *= -1.0;
    eta0 = {-eta0[0], -eta0[1]};
  }
  const double eta_sq = eta0[0] * eta0[0] + eta0[1] * eta0[1];
  const RealSeries eta_lambda = lambda.derivative(0) * ex + lambda.derivative(1) * ey;
  const auto grad_el = detail::gradient(eta_lambda);
  const double v2l = (grad_el[0] * eta0[0] + grad_el[1] * eta0[1]) / eta_sq;
  rep.v2lambda = v2l;
  const double dl = std::hypot(rep.dlambda[0], rep.dlambda[1]);
  if (dl > tol.fold * n2 && std::abs(v2l) > tol.fold * n2) {
    rep.cls = SingularityClass{ClassKind::Cusp};
    try {
      const auto cc = detail::critical_curve(lambda);
      const auto gamma = detail::discriminant(s, cc);
      const double thr = tol.contact * norm;
      int n = 0;
      std::array<double, 2> dir{};
      for (int k = 1; k < static_cast<int>(gamma.size()); ++k) {
        const double len = std::hypot(gamma[k][0], gamma[k][1]);
        if (n == 0 && len > thr) {
          n = k;
          dir = {gamma[k][0] / len, gamma[k][1] / len};
        } else if (n != 0 && std::abs(gamma[k][0] * dir[1] - gamma[k][1] * dir[0]) > thr) {
          rep.cusp_orders = std::array<int, 2>{n, k};
          break;
        }
      }
    } catch (const NearSingularMatrix&) {
      rep.notes.push_back("critical curve not parametrizable for cusp orders");
    }
    return rep;
  }
  rep.cls = detail::degenerate("beyond fold/cusp");
  return rep;
}

namespace detail {

/// Series in (alpha, beta, s) for the point alpha k1 + beta k2 + sigma g,
/// with sigma solved from T(p) = |grad T| s.
inline std::vector<RealSeries> fold_chart(const RealSeries& t, const std::array<double, 3>& k1,
                                          const std::array<double, 3>& k2,
                                          const std::array<double, 3>& g, double gt) {
  const int order = t.order();
  const RealSeries a = RealSeries::variable(0, 0.0, 3, order);
  const RealSeries b = RealSeries::variable(1, 0.0, 3, order);
  const RealSeries s = RealSeries::variable(2, 0.0, 3, order);
  RealSeries t0 = t;
  t0.add_constant(-t.constant_term());
  RealSeries sigma = s;
  std::vector<RealSeries> p(3, RealSeries(3, order));
  auto assemble = [&] {
    for (int c = 0; c < 3; ++c) p[c] = a * k1[c] + b * k2[c] + sigma * g[c];
  };
  for (int it = 0; it <= order + 1; ++it) {
    assemble();
    const RealSeries r = t0.compose<double>(p) - s * gt;
    sigma -= r * (1.0 / gt);
  }
  assemble();
  return p;
}

/// Solves grad_{vars} F = 0 for the listed variables as series in the
/// remaining ones, by fixed-point iteration with the constant Hessian.
inline std::vector<RealSeries> eliminate(const RealSeries& f, const std::vector<int>& vars) {
  const int n = f.nvars(), order = f.order();
  const int k = static_cast<int>(vars.size());
  linalg::Mat h(k, k);
  const linalg::Mat full = hessian(f);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) h(i, j) = full(vars[i], vars[j]);
  std::vector<RealSeries> args;
  for (int v = 0; v < n; ++v) args.push_back(RealSeries::variable(v, 0.0, n, order));
  for (int v : vars) args[v] = RealSeries(n, order);
  std::vector<RealSeries> grads;
  for (int v : vars) grads.push_back(f.derivative(v));
  for (int it = 0; it <= order + 1; ++it) {
    std::vector<RealSeries> r;
    for (const auto& gr : grads) r.push_back(gr.compose<double>(args));
    // args[vars] -= H^-1 r, coefficient by coefficient
    for (std::size_t c = 0; c < r[0].size(); ++c) {
      linalg::Vec rhs(k);
      for (int i = 0; i < k; ++i) rhs[i] = r[i][c];
      const auto delta = linalg::solve(h, rhs, 0.0);
      for (int i = 0; i < k; ++i) {
        RealSeries& target = args[vars[i]];
        target.set_coeff(target.exponents(c), target[c] - delta[i]);
      }
    }
  }
  return args;
}

}  // namespace detail

/// classify_jet_3d: regular / definite fold (DH, DE) / indefinite /
/// spatial cusp, from a spatial jet.
inline ClassificationReport classify_jet_3d(const Jet3& j, const ToleranceSet& tol = {}) {
  const TruncatedSeries& s = j.series;
  if (s.nvars() != 3) throw DimMismatch("classify_jet_3d needs a spatial jet");
  if (s.order() < 3) throw InsufficientOrder("classification needs series order >= 3");
  ClassificationReport rep;
  rep.dim = 3;
  rep.basepoint = {j.basepoint[0], j.basepoint[1], j.basepoint[2]};
  rep.tolerances = tol;
  rep.jet_norm = detail::jet_norm(s);
  rep.value_abs = std::abs(s.constant_term());
  const double norm = rep.jet_norm;
  if (rep.value_abs > tol.zero * norm || (norm == 0.0 && rep.value_abs > 0.0))
    throw NotOnDislocation("|psi| = " + detail::fmt(rep.value_abs) + " exceeds " +
                           detail::fmt(tol.zero) + " x jet norm " + detail::fmt(norm));

  const RealSeries u = real_part(s), w = imag_part(s);
  const auto gu = detail::gradient(u), gw = detail::gradient(w);
  linalg::Mat dt(3, 2);  // transpose of the 2x3 differential
  for (int i = 0; i < 3; ++i) {
    dt(i, 0) = gu[i];
    dt(i, 1) = gw[i];
  }
  const auto sv = linalg::svd(dt);
  rep.singular_values = sv.singular;
  if (!(sv.singular[0] > tol.rank * norm)) {
    rep.rank = 0;
    rep.cls = detail::degenerate("corank 2");
    return rep;
  }
  if (sv.singular[1] > tol.rank * sv.singular[0]) {
    rep.rank = 2;
    rep.cls = SingularityClass{ClassKind::Regular};
    return rep;
  }
  rep.rank = 1;
  // image line of d psi is spanned by the top right singular vector of D^T
  std::array<double, 2> tau{sv.v(0, 0), sv.v(1, 0)};
  {
    std::vector<double> t{tau[0], tau[1]};
    detail::orient(t);
    tau = {t[0], t[1]};
  }
  const std::array<double, 2> nrm{tau[1], -tau[0]};
  rep.tangent = {tau[0], tau[1]};
  rep.normal = {nrm[0], nrm[1]};
  const RealSeries tser = u * tau[0] + w * tau[1];
  const RealSeries nser = u * nrm[0] + w * nrm[1];
  const auto gt_vec = detail::gradient(tser);
  const double gt = linalg::norm(gt_vec);
  std::array<double, 3> g{gt_vec[0] / gt, gt_vec[1] / gt, gt_vec[2] / gt};
  // orthonormal basis of the kernel plane
  std::array<double, 3> k1{}, k2{};
  {
    int least = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(g[i]) < std::abs(g[least])) least = i;
    std::array<double, 3> e{};
    e[least] = 1.0;
    const double proj = e[0] * g[0] + e[1] * g[1] + e[2] * g[2];
    for (int i = 0; i < 3; ++i) k1[i] = e[i] - proj * g[i];
    const double n1 = std::sqrt(k1[0] * k1[0] + k1[1] * k1[1] + k1[2] * k1[2]);
    for (auto& x : k1) x /= n1;
    k2 = {g[1] * k1[2] - g[2] * k1[1], g[2] * k1[0] - g[0] * k1[2], g[0] * k1[1] - g[1] * k1[0]};
  }
  const linalg::Mat hn = detail::hessian(nser);
  linalg::Mat q(2, 2);
  const std::vector<double> k1v(k1.begin(), k1.end()), k2v(k2.begin(), k2.end());
  const linalg::Vec hk1 = hn * k1v, hk2 = hn * k2v;
  q(0, 0) = linalg::dot(k1v, hk1);
  q(0, 1) = linalg::dot(k1v, hk2);
  q(1, 0) = q(0, 1);
  q(1, 1) = linalg::dot(k2v, hk2);
  const auto eig = linalg::sym_eigen(q);
  rep.restricted_eigenvalues = eig.values;
  const double thr = tol.fold * norm;
  const double mu0 = eig.values[0], mu1 = eig.values[1];
  const bool null0 = std::abs(mu0) <= thr, null1 = std::abs(mu1) <= thr;

  if (!null0 && !null1 && (mu0 > 0) != (mu1 > 0)) {
    rep.cls = SingularityClass{ClassKind::Indefinite};
    return rep;
  }
  if (!null0 && !null1) {
    const auto chart = detail::fold_chart(tser, k1, k2, g, gt);
    const RealSeries f = nser.compose<double>(chart);
    const auto crit = detail::eliminate(f, {0, 1});
    // phi(s): F on the critical set; restrict to the s axis
    const RealSeries phi3 = f.compose<double>(crit);
    const double phi2 = phi3.coeff({0, 0, 2});
    const double curvature = 2.0 * phi2 / (gt * gt);
    const double qn = 0.5 * (mu0 + mu1);
    rep.curvature = curvature;
    rep.fold_opening_normal = qn;
    const double product = curvature * qn;
    rep.curvature_product = product;
    if (std::abs(product) > tol.curv) {
      rep.cls = SingularityClass{product > 0 ? ClassKind::DefiniteElliptic
                                             : ClassKind::DefiniteHyperbolic};
    } else {
      rep.cls = detail::degenerate("flat contact");
    }
    return rep;
  }
  if (null0 && null1) {
    rep.cls = detail::degenerate("restricted form vanishes");
    return rep;
  }
  // one null eigenvalue: eliminate along the non-null direction, then test
  // the reduced function G(beta, s) for a cusp
  const int nn = null0 ? 1 : 0;
  const int nl = 1 - nn;
  std::array<double, 3> kn{}, kz{};
  for (int i = 0; i < 3; ++i) {
    kn[i] = eig.vectors(0, nn) * k1[i] + eig.vectors(1, nn) * k2[i];
    kz[i] = eig.vectors(0, nl) * k1[i] + eig.vectors(1, nl) * k2[i];
  }
  rep.kernel = {kz[0], kz[1], kz[2]};
  detail::orient(rep.kernel);
  const auto chart = detail::fold_chart(tser, kn, kz, g, gt);
  const RealSeries f = nser.compose<double>(chart);
  const auto red = detail::eliminate(f, {0});
  const RealSeries gred = f.compose<double>(red);
  const double g_bbb = gred.derivative_value({0, 3, 0});
  const double g_bs = gred.derivative_value({0, 1, 1});
  rep.v2lambda = g_bbb;
  rep.vlambda = gred.derivative_value({0, 2, 0});
  rep.notes.push_back("reduced G_bbb = " + detail::fmt(g_bbb) + ", G_bs = " + detail::fmt(g_bs));
  if (std::abs(g_bbb) > thr && std::abs(g_bs) > thr) {
    rep.cls = SingularityClass{ClassKind::SpatialCusp};
  } else {
    rep.cls = detail::degenerate("beyond spatial fold/cusp");
  }
  return rep;
}

/// Classifies the zero at point of def (time frozen via params).
inline ClassificationReport classify_point(const FieldDef& def, std::span<const double> point,
                                           const ParamMap& params = {},
                                           const ToleranceSet& tol = {},
                                           int order = kDefaultOrder) {
  const CompiledField f(def, params);
  if (f.arity() != f.dim())
    throw BadParameter("field '" + def.name + "' is time dependent; give t as a parameter");
  const TruncatedSeries jet = f.jet(point, order);
  if (f.dim() == 2) return classify_jet_2d(jet2_from_series(jet, {point[0], point[1]}), tol);
  return classify_jet_3d(jet3_from_series(jet, {point[0], point[1], point[2]}), tol);
}

inline ClassificationReport classify_series(const TruncatedSeries& jet,
                                            std::span<const double> point,
                                            const ToleranceSet& tol = {}) {
  if (jet.nvars() == 2) return classify_jet_2d(jet2_from_series(jet, {point[0], point[1]}), tol);
  if (jet.nvars() == 3)
    return classify_jet_3d(jet3_from_series(jet, {point[0], point[1], point[2]}), tol);
  throw DimMismatch("classification needs a 2 or 3 variable jet");
}

// ---------------------------------------------------------------------------
// phase critical points

enum class PhaseCriticalKind { Extremum, Saddle, DegenerateCritical };

inline const char* to_string(PhaseCriticalKind k) {
  switch (k) {
    case PhaseCriticalKind::Extremum: return "Extremum";
    case PhaseCriticalKind::Saddle: return "Saddle";
    case PhaseCriticalKind::DegenerateCritical: return "DegenerateCritical";
  }
  return "Unknown";
}

struct PhaseCriticalReport {
  PhaseCriticalKind kind = PhaseCriticalKind::DegenerateCritical;
  std::vector<double> gradient;
  std::array<double, 3> hessian{};  ///< theta_xx, theta_xy, theta_yy
  double determinant = 0.0;
};

/// classify_phase_critical: type of a critical point of theta = arg psi
/// off the zero set (planar fields).
inline PhaseCriticalReport classify_phase_critical(const FieldDef& def,
                                                   std::span<const double> point,
                                                   const ParamMap& params = {},
                                                   const ToleranceSet& tol = {}) {
  const CompiledField f(def, params);
  if (f.arity() != 2) throw DimMismatch("phase critical points are classified in the plane");
  const TruncatedSeries s = f.jet(point, 3);
  const Complex psi0 = s.constant_term();
  const double norm = std::max(detail::jet_norm(s), std::abs(psi0));
  if (!(std::abs(psi0) > tol.zero * norm))
    throw OnDislocation("|psi| = " + detail::fmt(std::abs(psi0)) + " is on the dislocation set");
  // log(psi) about psi0: log psi0 + sum (-1)^(k+1) h^k / (k psi0^k)
  std::vector<Complex> taylor(s.order() + 1);
  for (int k = 1; k <= s.order(); ++k)
    taylor[k] = (k % 2 ? 1.0 : -1.0) / (static_cast<double>(k) * std::pow(psi0, k));
  const TruncatedSeries lg = compose_univariate<Complex>(s, taylor);
  PhaseCriticalReport rep;
  rep.gradient = {lg.coeff({1, 0}).imag(), lg.coeff({0, 1}).imag()};
  if (std::hypot(rep.gradient[0], rep.gradient[1]) >= tol.grad)
    throw NotCritical("|grad theta| = " +
                      detail::fmt(std::hypot(rep.gradient[0], rep.gradient[1])));
  rep.hessian = {2.0 * lg.coeff({2, 0}).imag(), lg.coeff({1, 1}).imag(),
                 2.0 * lg.coeff({0, 2}).imag()};
  rep.determinant = rep.hessian[0] * rep.hessian[2] - rep.hessian[1] * rep.hessian[1];
  if (rep.determinant > tol.hess) rep.kind = PhaseCriticalKind::Extremum;
  else if (rep.determinant < -tol.hess) rep.kind = PhaseCriticalKind::Saddle;
  else rep.kind = PhaseCriticalKind::DegenerateCritical;
  return rep;
}

}  // namespace vortex_atlas
