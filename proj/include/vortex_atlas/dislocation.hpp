/**
 * @file dislocation.hpp
 * @brief Zero sets of complex fields: isolated points in the plane, curves
 * in space, and zero counts across parameter sweeps.
 *
 * Thresholds are relative to the field scale on the grid:
 *   tau_zero  = zero_rel  * (1 + sup |psi|)
 *   tau_merge = merge_rel * cell diagonal
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <tuple>
#include <string>
#include <vector>

#include "vortex_atlas/errors.hpp"
#include "vortex_atlas/field.hpp"
#include "vortex_atlas/linalg.hpp"
#include "vortex_atlas/parallel.hpp"
#include "vortex_atlas/taylor.hpp"

namespace vortex_atlas {

struct Region {
  int dim = 2;
  std::array<double, 3> lower{-1.0, -1.0, -1.0};
  std::array<double, 3> upper{1.0, 1.0, 1.0};
  std::array<int, 3> resolution{101, 101, 101};

  static Region cube(int dim, double lo, double hi, int res = 101) {
    Region r;
    r.dim = dim;
    r.lower.fill(lo);
    r.upper.fill(hi);
    r.resolution.fill(res);
    r.validate();
    return r;
  }

  void validate() const {
    if (dim != 2 && dim != 3) throw BadParameter("region dimension must be 2 or 3");
    for (int a = 0; a < dim; ++a) {
      if (!(lower[a] < upper[a])) throw BadParameter("region lower bound must be below upper");
      if (resolution[a] < 2) throw BadParameter("region resolution must be at least 2");
    }
  }

  double step(int axis) const { return (upper[axis] - lower[axis]) / (resolution[axis] - 1); }
  double coordinate(int axis, int i) const {
    return i == resolution[axis] - 1 ? upper[axis] : lower[axis] + i * step(axis);
  }
  double cell_diagonal() const {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += step(a) * step(a);
    return std::sqrt(s);
  }
  std::size_t node_count() const {
    std::size_t n = 1;
    for (int a = 0; a < dim; ++a) n *= resolution[a];
    return n;
  }
  /// Coordinates of node idx (x fastest, then y, then z).
  std::array<double, 3> node(std::size_t idx) const {
    std::array<double, 3> p{};
    for (int a = 0; a < dim; ++a) {
      p[a] = coordinate(a, static_cast<int>(idx % resolution[a]));
      idx /= resolution[a];
    }
    return p;
  }
  /// Within `margin` of the box.
  bool contains(std::span<const double> p, double margin = 0.0) const {
    for (int a = 0; a < dim; ++a)
      if (p[a] < lower[a] - margin || p[a] > upper[a] + margin) return false;
    return true;
  }
};

struct ZeroOptions {
  int max_iter = 25;         ///< Newton iterations to reach tau_zero
  int polish_iter = 60;      ///< extra iterations once converged
  double rank_tol = 1e-7;    ///< singular-value ratio for a singular Jacobian
  double zero_rel = 1e-10;
  double merge_rel = 1e-6;
  int jet_order = kDefaultOrder;
  int threads = 0;
};

struct DislocationPoint {
  std::vector<double> location;
  double residual = 0.0;
  int newton_iters = 0;
  bool degenerate = false;  ///< Jacobian rank deficient at the zero
  TruncatedSeries jet;
};

struct ScanResult {
  std::vector<DislocationPoint> points;
  std::vector<std::string> warnings;
  double tau_zero = 0.0;
  double tau_merge = 0.0;
};

enum class CurveStatus { Closed, OpenAtBoundary, IsolatedPoint };

inline const char* to_string(CurveStatus s) {
  switch (s) {
    case CurveStatus::Closed: return "closed";
    case CurveStatus::OpenAtBoundary: return "open_at_boundary";
    case CurveStatus::IsolatedPoint: return "isolated_point";
  }
  return "unknown";
}

struct DislocationCurve {
  std::vector<std::array<double, 3>> vertices;  ///< closed curves repeat the first vertex
  CurveStatus status = CurveStatus::OpenAtBoundary;
  double max_vertex_residual = 0.0;
  double max_segment_residual = 0.0;

  bool closed() const { return status == CurveStatus::Closed; }
};

struct TraceResult {
  std::vector<DislocationCurve> curves;
  std::vector<std::string> warnings;
  double tau_zero = 0.0;
};

namespace detail {

/// Rows (Re, Im), columns d/dx_i, from an order >= 1 jet.
inline linalg::Mat real_jacobian(const TruncatedSeries& jet, int n) {
  linalg::Mat j(2, n);
  for (int v = 0; v < n; ++v) {
    MultiIndex alpha{};
    alpha[v] = 1;
    const Complex d = jet.coeff(alpha);
    j(0, v) = d.real();
    j(1, v) = d.imag();
  }
  return j;
}

inline bool rank_deficient(const linalg::Mat& j, double rank_tol) {
  const auto s = linalg::svd(j.rows <= j.cols ? j.transpose() : j).singular;
  return !(s[0] > 0.0) || s[1] <= rank_tol * s[0];
}

/// Newton step for the square (2x2) case.
inline std::vector<double> newton_step(const linalg::Mat& j, Complex value) {
  return linalg::solve(j, {-value.real(), -value.imag()}, 0.0);
}

/// Damped minimum-norm Gauss-Newton on |psi|^2. Used as a fallback for
/// degenerate zeros, where Newton stalls on a singular Jacobian.
inline std::vector<double> minimize_residual(const CompiledField& f, std::vector<double> p,
                                             int max_iter, double tau_zero) {
  const int n = f.dim();
  double mu = 1e-3;
  Complex v = f(p);
  for (int it = 0; it < max_iter && std::abs(v) >= tau_zero * 1e-3; ++it) {
    const auto jet = f.jet(p, 1);
    const linalg::Mat j = real_jacobian(jet, n);
    const linalg::Mat jjt = j * j.transpose();
    bool improved = false;
    for (int tries = 0; tries < 30 && !improved; ++tries) {
      linalg::Mat a = jjt;
      const double scale = std::max(jjt(0, 0) + jjt(1, 1), 1e-300);
      a(0, 0) += mu * scale;
      a(1, 1) += mu * scale;
      std::vector<double> y;
      try {
        y = linalg::solve(a, {v.real(), v.imag()}, 0.0);
      } catch (const NearSingularMatrix&) {
        return p;
      }
      std::vector<double> q = p;
      for (int c = 0; c < n; ++c) q[c] -= j(0, c) * y[0] + j(1, c) * y[1];
      const Complex vq = f(q);
      if (std::abs(vq) < std::abs(v)) {
        p = std::move(q);
        v = vq;
        mu = std::max(mu * 0.1, 1e-15);
        improved = true;
      } else {
        mu *= 10.0;
      }
    }
    if (!improved) break;
  }
  return p;
}

}  // namespace detail

/// refine_zero with an explicit tolerance; see the overload below.
inline DislocationPoint refine_zero(const CompiledField& f, std::vector<double> p,
                                    double tau_zero, const ZeroOptions& opt = {}) {
  if (f.arity() != 2) throw BadParameter("refine_zero needs a planar field with time frozen");
  if (static_cast<int>(p.size()) != 2) throw DimMismatch("guess must have 2 coordinates");
  int it = 0;
  for (;; ++it) {
    const auto jet = f.jet(p, 1);
    const Complex v = jet.constant_term();
    const double r = std::abs(v);
    const linalg::Mat j = detail::real_jacobian(jet, 2);
    if (detail::rank_deficient(j, opt.rank_tol))
      throw SingularJacobian(p, r, "singular Jacobian during Newton refinement");
    if (r < tau_zero) break;
    if (it >= opt.max_iter)
      throw NoConvergence("Newton did not reach the zero tolerance in " +
                          std::to_string(opt.max_iter) + " iterations");
    const auto step = detail::newton_step(j, v);
    p[0] += step[0];
    p[1] += step[1];
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) throw NoConvergence("Newton diverged");
  }
  // polish: keep stepping while the residual drops and the Jacobian stays regular
  double best = std::abs(f(p));
  for (int k = 0; k < opt.polish_iter && best > 0.0; ++k) {
    const auto jet = f.jet(p, 1);
    const linalg::Mat j = detail::real_jacobian(jet, 2);
    if (detail::rank_deficient(j, opt.rank_tol)) break;
    const auto step = detail::newton_step(j, jet.constant_term());
    std::vector<double> q{p[0] + step[0], p[1] + step[1]};
    const double rq = std::abs(f(q));
    const double moved = std::hypot(step[0], step[1]);
    if (!(rq <= best) || moved == 0.0) break;
    p = q;
    best = rq;
    ++it;
    if (moved < 1e-16 * (1.0 + std::hypot(p[0], p[1]))) break;
  }
  DislocationPoint out;
  out.location = p;
  out.residual = best;
  out.newton_iters = it;
  out.jet = f.jet(p, opt.jet_order);
  out.degenerate = detail::rank_deficient(detail::real_jacobian(out.jet, 2), opt.rank_tol);
  return out;
}

/// refine_zero: Newton on (Re psi, Im psi) from guess. tau_zero defaults to
/// zero_rel * (1 + |psi(guess)|).
inline DislocationPoint refine_zero(const FieldDef& def, std::vector<double> guess,
                                    const ParamMap& params = {}, const ZeroOptions& opt = {}) {
  const CompiledField f(def, params);
  if (f.arity() != 2) throw BadParameter("refine_zero needs a planar field with time frozen");
  if (guess.size() != 2) throw DimMismatch("guess must have 2 coordinates");
  const double tau = opt.zero_rel * (1.0 + std::abs(f(guess)));
  return refine_zero(f, std::move(guess), tau, opt);
}

namespace detail {

/// Merge rule: closer than tau_merge, or within one cell with |psi| below
/// tau_zero along the joining segment (a degenerate zero reached from two
/// sides converges slowly and lands on slightly different points).
inline bool same_zero(const CompiledField& f, std::span<const double> a, std::span<const double> b,
                      double tau_merge, double cell, double tau_zero) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  const double d = std::sqrt(d2);
  if (d < tau_merge) return true;
  if (d > cell) return false;
  std::vector<double> q(a.size());
  for (int k = 1; k < 8; ++k) {
    for (std::size_t i = 0; i < a.size(); ++i) q[i] = a[i] + (b[i] - a[i]) * k / 8.0;
    if (!(std::abs(f(q)) < tau_zero)) return false;
  }
  return true;
}

struct Candidate {
  std::vector<double> start;
  bool from_sign_change = false;
};

inline std::string format_point(std::span<const double> p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += detail::format_number(p[i]);
  }
  return s + ")";
}

}  // namespace detail

/// scan_zeros_2d on a compiled planar field.
inline ScanResult scan_zeros_2d(const CompiledField& f, const Region& region,
                                const ZeroOptions& opt = {}) {
  region.validate();
  if (region.dim != 2 || f.arity() != 2)
    throw DimMismatch("scan_zeros_2d needs a planar field (time frozen) and a 2D region");
  const int nx = region.resolution[0], ny = region.resolution[1];
  std::vector<Complex> grid(static_cast<std::size_t>(nx) * ny);
  parallel_for(grid.size(), opt.threads, [&](std::size_t idx) {
    const std::array<double, 2> p{region.coordinate(0, static_cast<int>(idx % nx)),
                                  region.coordinate(1, static_cast<int>(idx / nx))};
    grid[idx] = f(p);
  });
  auto at = [&](int i, int j) { return grid[static_cast<std::size_t>(j) * nx + i]; };
  double sup = 0.0;
  for (const Complex& v : grid) sup = std::max(sup, std::abs(v));

  ScanResult result;
  result.tau_zero = opt.zero_rel * (1.0 + sup);
  result.tau_merge = opt.merge_rel * region.cell_diagonal();
  const double cell = region.cell_diagonal();

  // candidates in ascending cell index order, then grid minima
  std::vector<detail::Candidate> candidates;
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const std::array<Complex, 4> c = {at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)};
      double re_lo = c[0].real(), re_hi = re_lo, im_lo = c[0].imag(), im_hi = im_lo;
      for (const Complex& v : c) {
        re_lo = std::min(re_lo, v.real());
        re_hi = std::max(re_hi, v.real());
        im_lo = std::min(im_lo, v.imag());
        im_hi = std::max(im_hi, v.imag());
      }
      if (re_lo <= 0.0 && re_hi >= 0.0 && im_lo <= 0.0 && im_hi >= 0.0) {
        candidates.push_back({{0.5 * (region.coordinate(0, i) + region.coordinate(0, i + 1)),
                               0.5 * (region.coordinate(1, j) + region.coordinate(1, j + 1))},
                              true});
      }
    }
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double m = std::norm(at(i, j));
      bool minimum = true;
      for (int dj = -1; dj <= 1 && minimum; ++dj)
        for (int di = -1; di <= 1; ++di) {
          if ((di == 0 && dj == 0) || i + di < 0 || j + dj < 0 || i + di >= nx || j + dj >= ny)
            continue;
          if (std::norm(at(i + di, j + dj)) < m) {
            minimum = false;
            break;
          }
        }
      if (minimum) candidates.push_back({{region.coordinate(0, i), region.coordinate(1, j)}, false});
    }
  }

  struct Outcome {
    bool found = false;
    DislocationPoint point;
    std::string warning;
  };
  std::vector<Outcome> outcomes(candidates.size());
  parallel_for(candidates.size(), opt.threads, [&](std::size_t k) {
    const auto& cand = candidates[k];
    Outcome& out = outcomes[k];
    std::vector<double> fallback_start = cand.start;
    try {
      out.point = refine_zero(f, cand.start, result.tau_zero, opt);
      out.found = true;
    } catch (const SingularJacobian& e) {
      fallback_start = e.point();
    } catch (const NoConvergence&) {
    } catch (const NearSingularMatrix&) {
    } catch (const EvalError&) {
    }
    if (!out.found) {
      // degenerate zeros: minimize |psi| and keep the point if it is a zero
      auto p = detail::minimize_residual(f, fallback_start, 400, result.tau_zero);
      const double r = std::abs(f(p));
      if (r < result.tau_zero) {
        out.point.location = p;
        out.point.residual = r;
        out.point.newton_iters = opt.max_iter;
        out.point.jet = f.jet(p, opt.jet_order);
        out.point.degenerate =
            detail::rank_deficient(detail::real_jacobian(out.point.jet, 2), opt.rank_tol);
        out.found = true;
      } else if (cand.from_sign_change) {
        out.warning = "candidate near " + detail::format_point(cand.start) +
                      " did not converge (residual " + detail::format_number(r) + ")";
      }
    }
    if (out.found && !region.contains(out.point.location, cell)) {
      out.found = false;
    }
  });

  for (auto& o : outcomes) {
    if (!o.warning.empty()) result.warnings.push_back(o.warning);
    if (!o.found) continue;
    bool merged = false;
    for (auto& kept : result.points) {
      if (detail::same_zero(f, kept.location, o.point.location, result.tau_merge, cell,
                            result.tau_zero)) {
        if (o.point.residual < kept.residual) kept = std::move(o.point);
        merged = true;
        break;
      }
    }
    if (!merged) result.points.push_back(std::move(o.point));
  }
  return result;
}

/// scan_zeros_2d: isolated zeros of a planar field on a grid region.
inline ScanResult scan_zeros_2d(const FieldDef& def, const Region& region,
                                const ParamMap& params = {}, const ZeroOptions& opt = {}) {
  return scan_zeros_2d(CompiledField(def, params), region, opt);
}

// ---------------------------------------------------------------------------
// 3D curve tracing

namespace detail {

using Vec3 = std::array<double, 3>;

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double dist3(const Vec3& a, const Vec3& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                   (a[2] - b[2]) * (a[2] - b[2]));
}

/// Newton on the plane through p normal to the local curve direction
/// grad(Re) x grad(Im). Returns false if the Jacobian degenerates or the
/// tolerance is not reached.
inline bool project_to_curve(const CompiledField& f, Vec3& p, double tau_zero, int max_iter,
                             double rank_tol) {
  for (int it = 0; it <= max_iter; ++it) {
    const auto jet = f.jet(p, 1);
    const Complex v = jet.constant_term();
    const linalg::Mat j = real_jacobian(jet, 3);
    const Vec3 gu{j(0, 0), j(0, 1), j(0, 2)}, gw{j(1, 0), j(1, 1), j(1, 2)};
    if (rank_deficient(j, rank_tol)) return std::abs(v) < tau_zero;
    if (std::abs(v) < tau_zero && it > 0) return true;
    // the normal plane is spanned by the two gradients
    linalg::Mat a(2, 2);
    a(0, 0) = dot3(gu, gu);
    a(0, 1) = dot3(gu, gw);
    a(1, 0) = a(0, 1);
    a(1, 1) = dot3(gw, gw);
    const auto c = linalg::solve(a, {-v.real(), -v.imag()}, 0.0);
    for (int k = 0; k < 3; ++k) p[k] += c[0] * gu[k] + c[1] * gw[k];
    if (!std::isfinite(p[0] + p[1] + p[2])) return false;
  }
  return std::abs(f(p)) < tau_zero;
}

struct FaceKey {
  std::array<std::int64_t, 3> ids;
  bool operator<(const FaceKey& o) const { return ids < o.ids; }
};

struct EdgePoint {
  Vec3 p;
  double w;
  std::int64_t lo, hi;  ///< global ids of the tet edge, lo < hi
};

}  // namespace detail

/// trace_dislocation_3d on a compiled spatial field.
inline TraceResult trace_dislocation_3d(const CompiledField& f, const Region& region,
                                        const ZeroOptions& opt = {}) {
  region.validate();
  if (region.dim != 3 || f.arity() != 3)
    throw DimMismatch("trace_dislocation_3d needs a spatial field (time frozen) and a 3D region");
  using detail::Vec3;
  const int nx = region.resolution[0], ny = region.resolution[1], nz = region.resolution[2];
  const std::size_t total = region.node_count();
  std::vector<Complex> grid(total);
  parallel_for(total, opt.threads, [&](std::size_t idx) {
    const std::array<double, 3> p{region.coordinate(0, static_cast<int>(idx % nx)),
                                  region.coordinate(1, static_cast<int>((idx / nx) % ny)),
                                  region.coordinate(2, static_cast<int>(idx / (nx * ny)))};
    grid[idx] = f(p);
  });
  double sup = 0.0;
  for (const Complex& v : grid) sup = std::max(sup, std::abs(v));
  TraceResult result;
  result.tau_zero = opt.zero_rel * (1.0 + sup);
  const double cell = region.cell_diagonal();
  const double tau_merge = opt.merge_rel * cell;

  auto node_id = [&](int i, int j, int k) {
    return static_cast<std::int64_t>(i) + static_cast<std::int64_t>(nx) * (j + static_cast<std::int64_t>(ny) * k);
  };
  auto node_pos = [&](std::int64_t id) {
    return Vec3{region.coordinate(0, static_cast<int>(id % nx)),
                region.coordinate(1, static_cast<int>((id / nx) % ny)),
                region.coordinate(2, static_cast<int>(id / (static_cast<std::int64_t>(nx) * ny)))};
  };
  // exact zeros count as positive (symbolic +delta), so every sign test is strict
  auto negative = [](double v) { return v < 0.0; };

  auto edge_point = [&](std::int64_t a, std::int64_t b) {
    if (a > b) std::swap(a, b);
    const Complex va = grid[a], vb = grid[b];
    const double t = va.real() / (va.real() - vb.real());
    const Vec3 pa = node_pos(a), pb = node_pos(b);
    detail::EdgePoint e;
    for (int c = 0; c < 3; ++c) e.p[c] = pa[c] + t * (pb[c] - pa[c]);
    e.w = va.imag() + t * (vb.imag() - va.imag());
    e.lo = a;
    e.hi = b;
    return e;
  };

  std::map<detail::FaceKey, int> face_index;
  std::vector<Vec3> nodes;
  std::vector<std::vector<int>> adjacency;
  auto node_for = [&](const detail::FaceKey& key, const Vec3& p) {
    auto [it, inserted] = face_index.emplace(key, static_cast<int>(nodes.size()));
    if (inserted) {
      nodes.push_back(p);
      adjacency.emplace_back();
    }
    return it->second;
  };

  static constexpr std::array<std::array<int, 3>, 6> perms = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (int k = 0; k + 1 < nz; ++k) {
    for (int j = 0; j + 1 < ny; ++j) {
      for (int i = 0; i + 1 < nx; ++i) {
        for (const auto& perm : perms) {
          // Kuhn simplex: walk from corner 000 to 111 one axis at a time
          std::array<std::int64_t, 4> tet;
          std::array<int, 3> c{i, j, k};
          tet[0] = node_id(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[perm[s]];
            tet[s + 1] = node_id(c[0], c[1], c[2]);
          }
          std::vector<int> neg, pos;
          for (int v = 0; v < 4; ++v) (negative(grid[tet[v]].real()) ? neg : pos).push_back(v);
          if (neg.empty() || pos.empty()) continue;
          std::vector<std::pair<int, int>> edges;
          if (neg.size() == 2) {
            edges = {{neg[0], pos[0]}, {neg[0], pos[1]}, {neg[1], pos[1]}, {neg[1], pos[0]}};
          } else {
            const auto& lone = neg.size() == 1 ? neg : pos;
            const auto& rest = neg.size() == 1 ? pos : neg;
            for (int r : rest) edges.push_back({lone[0], r});
          }
          std::vector<detail::EdgePoint> poly;
          for (auto [a, b] : edges) poly.push_back(edge_point(tet[a], tet[b]));
          std::vector<int> hits;
          for (std::size_t e = 0; e < poly.size(); ++e) {
            const auto* p0 = &poly[e];
            const auto* p1 = &poly[(e + 1) % poly.size()];
            if (negative(p0->w) == negative(p1->w)) continue;
            // canonical orientation so both tets on this face compute the same point
            if (std::tie(p0->lo, p0->hi) > std::tie(p1->lo, p1->hi)) std::swap(p0, p1);
            const double t = p0->w / (p0->w - p1->w);
            Vec3 q;
            for (int d = 0; d < 3; ++d) q[d] = p0->p[d] + t * (p1->p[d] - p0->p[d]);
            std::array<std::int64_t, 4> ids{p0->lo, p0->hi, p1->lo, p1->hi};
            std::sort(ids.begin(), ids.end());
            detail::FaceKey key{};
            int n = 0;
            for (int m = 0; m < 4; ++m)
              if (m == 0 || ids[m] != ids[m - 1]) key.ids[n++] = ids[m];
            hits.push_back(node_for(key, q));
          }
          if (hits.size() == 2 && hits[0] != hits[1]) {
            adjacency[hits[0]].push_back(hits[1]);
            adjacency[hits[1]].push_back(hits[0]);
          }
        }
      }
    }
  }

  // chain: open polylines start at degree-1 nodes, the rest are cycles
  std::vector<char> visited(nodes.size(), 0);
  std::vector<std::pair<std::vector<int>, bool>> chains;
  auto walk = [&](int start) {
    std::vector<int> chain{start};
    visited[start] = 1;
    int prev = -1, cur = start;
    for (;;) {
      int next = -1;
      for (int nb : adjacency[cur])
        if (nb != prev && !visited[nb]) {
          next = nb;
          break;
        }
      if (next < 0) {
        const bool closes = chain.size() > 2 &&
                            std::find(adjacency[cur].begin(), adjacency[cur].end(), start) !=
                                adjacency[cur].end();
        return std::make_pair(chain, closes);
      }
      visited[next] = 1;
      chain.push_back(next);
      prev = cur;
      cur = next;
    }
  };
  for (std::size_t n = 0; n < nodes.size(); ++n)
    if (!visited[n] && adjacency[n].size() == 1) chains.push_back(walk(static_cast<int>(n)));
  for (std::size_t n = 0; n < nodes.size(); ++n)
    if (!visited[n] && !adjacency[n].empty()) chains.push_back(walk(static_cast<int>(n)));

  std::vector<Vec3> isolated;
  for (const auto& [chain, closed] : chains) {
    std::vector<Vec3> verts(chain.size());
    std::vector<char> ok(chain.size(), 0);
    parallel_for(chain.size(), opt.threads, [&](std::size_t v) {
      Vec3 p = nodes[chain[v]];
      ok[v] = detail::project_to_curve(f, p, result.tau_zero, opt.max_iter, opt.rank_tol);
      verts[v] = p;
    });
    DislocationCurve curve;
    int dropped = 0;
    for (std::size_t v = 0; v < verts.size(); ++v) {
      if (!ok[v]) {
        ++dropped;
        continue;
      }
      if (!curve.vertices.empty() &&
          detail::dist3(curve.vertices.back(), verts[v]) < 1e-6 * cell)
        continue;
      curve.vertices.push_back(verts[v]);
    }
    if (dropped)
      result.warnings.push_back(std::to_string(dropped) +
                                " curve vertices failed to project onto the zero set");
    if (curve.vertices.empty()) continue;
    double extent = 0.0;
    for (const auto& v : curve.vertices)
      extent = std::max(extent, detail::dist3(v, curve.vertices.front()));
    if (extent < cell) {
      // a loop that collapsed onto a single degenerate zero
      isolated.push_back(curve.vertices.front());
      continue;
    }
    curve.status = closed ? CurveStatus::Closed : CurveStatus::OpenAtBoundary;
    if (closed) {
      if (detail::dist3(curve.vertices.back(), curve.vertices.front()) < 1e-6 * cell)
        curve.vertices.back() = curve.vertices.front();
      else
        curve.vertices.push_back(curve.vertices.front());
    }
    for (std::size_t v = 0; v < curve.vertices.size(); ++v) {
      curve.max_vertex_residual = std::max(curve.max_vertex_residual, std::abs(f(curve.vertices[v])));
      if (v + 1 < curve.vertices.size()) {
        Vec3 mid;
        for (int d = 0; d < 3; ++d) mid[d] = 0.5 * (curve.vertices[v][d] + curve.vertices[v + 1][d]);
        curve.max_segment_residual = std::max(curve.max_segment_residual, std::abs(f(mid)));
      }
    }
    result.curves.push_back(std::move(curve));
  }

  // isolated degenerate zeros: grid minima of |psi| away from traced curves
  auto near_curve = [&](const Vec3& p) {
    for (const auto& c : result.curves)
      for (const auto& v : c.vertices)
        if (detail::dist3(p, v) < 2.0 * cell) return true;
    return false;
  };
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double m = std::norm(grid[node_id(i, j, k)]);
        bool minimum = true;
        for (int dk = -1; dk <= 1 && minimum; ++dk)
          for (int dj = -1; dj <= 1 && minimum; ++dj)
            for (int di = -1; di <= 1; ++di) {
              const int a = i + di, b = j + dj, c = k + dk;
              if ((di | dj | dk) == 0 || a < 0 || b < 0 || c < 0 || a >= nx || b >= ny || c >= nz)
                continue;
              if (std::norm(grid[node_id(a, b, c)]) < m) {
                minimum = false;
                break;
              }
            }
        if (!minimum) continue;
        const Vec3 start = node_pos(node_id(i, j, k));
        if (near_curve(start)) continue;
        auto p = detail::minimize_residual(f, {start[0], start[1], start[2]}, 400, result.tau_zero);
        if (std::abs(f(p)) < result.tau_zero) isolated.push_back({p[0], p[1], p[2]});
      }
    }
  }
  std::vector<Vec3> kept;
  for (const auto& p : isolated) {
    if (!region.contains(p, cell) || near_curve(p)) continue;
    bool dup = false;
    for (const auto& q : kept)
      if (detail::same_zero(f, p, q, tau_merge, cell, result.tau_zero)) dup = true;
    if (!dup) kept.push_back(p);
  }
  for (const auto& p : kept) {
    DislocationCurve c;
    c.vertices = {p};
    c.status = CurveStatus::IsolatedPoint;
    c.max_vertex_residual = std::abs(f(p));
    result.curves.push_back(std::move(c));
  }
  return result;
}

/// trace_dislocation_3d: zero curves of a spatial field.
inline TraceResult trace_dislocation_3d(const FieldDef& def, const Region& region,
                                        const ParamMap& params = {}, const ZeroOptions& opt = {}) {
  return trace_dislocation_3d(CompiledField(def, params), region, opt);
}

// ---------------------------------------------------------------------------
// parameter sweeps

struct SweepEvent {
  double from = 0.0;  ///< parameter bracket [from, to]
  double to = 0.0;
  int count_before = 0;
  int count_after = 0;
};

struct SweepResult {
  std::string parameter;
  std::vector<double> values;
  std::vector<int> counts;
  std::vector<ScanResult> scans;    ///< planar fields
  std::vector<TraceResult> traces;  ///< spatial fields
  std::vector<SweepEvent> events;
  std::vector<std::string> warnings;
};

/// sweep_parameter: zero set per parameter value and the brackets where
/// the count changes. Spatial fields count curves (isolated points included).
inline SweepResult sweep_parameter(const FieldDef& def, const Region& region,
                                   const std::string& param, const std::vector<double>& values,
                                   const ParamMap& params = {}, const ZeroOptions& opt = {}) {
  if (!def.params.count(param) && !(param == "t" && def.time_dependent))
    throw BadParameter("field '" + def.name + "' has no parameter '" + param + "'");
  SweepResult out;
  out.parameter = param;
  out.values = values;
  for (double v : values) {
    ParamMap p = params;
    p[param] = v;
    const CompiledField f(def, p);
    int count = 0;
    const std::string tag = param + "=" + detail::format_number(v) + ": ";
    if (region.dim == 2) {
      auto scan = scan_zeros_2d(f, region, opt);
      count = static_cast<int>(scan.points.size());
      for (const auto& w : scan.warnings) out.warnings.push_back(tag + w);
      out.scans.push_back(std::move(scan));
    } else {
      auto trace = trace_dislocation_3d(f, region, opt);
      count = static_cast<int>(trace.curves.size());
      for (const auto& w : trace.warnings) out.warnings.push_back(tag + w);
      out.traces.push_back(std::move(trace));
    }
    if (!out.counts.empty() && out.counts.back() != count)
      out.events.push_back({out.values[out.counts.size() - 1], v, out.counts.back(), count});
    out.counts.push_back(count);
  }
  return out;
}

}  // namespace vortex_atlas
