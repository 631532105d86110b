/**
 * @file helmholtz.hpp
 * @brief Helmholtz and wave equation residuals, Helmholtz field
 * constructors, and the definiteness test on the Hessian pencil.
 */
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vortex_atlas/dislocation.hpp"
#include "vortex_atlas/errors.hpp"
#include "vortex_atlas/field.hpp"
#include "vortex_atlas/linalg.hpp"
#include "vortex_atlas/parallel.hpp"
#include "vortex_atlas/taylor.hpp"

namespace vortex_atlas {

struct ResidualReport {
  double sup_abs = 0.0;
  Region region;
  double constant = 1.0;            ///< k for Helmholtz, c for waves
  std::vector<double> argmax;       ///< grid point (and time) of the sup
  std::size_t points = 0;
};

namespace detail {

inline MultiIndex twice(int v) {
  MultiIndex a{};
  a[v] = 2;
  return a;
}

/// Max over slots with ties broken by slot order.
inline std::size_t argmax_slot(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace detail

/// helmholtz_residual: sup over the grid of |lap psi + k^2 psi|, second
/// derivatives from order-2 jets.
inline ResidualReport helmholtz_residual(const FieldDef& def, const Region& region, double k = 1.0,
                                         const ParamMap& params = {}, int threads = 0) {
  region.validate();
  if (region.dim != def.dim) throw DimMismatch("region and field dimensions differ");
  const CompiledField f(def, params);
  if (f.arity() != f.dim())
    throw BadParameter("field '" + def.name + "' is time dependent; give t as a parameter");
  const std::size_t n = region.node_count();
  std::vector<double> res(n);
  parallel_for(n, threads, [&](std::size_t idx) {
    const auto node = region.node(idx);
    const TruncatedSeries s = f.jet(std::span<const double>(node.data(), def.dim), 2);
    Complex lap = 0.0;
    for (int v = 0; v < def.dim; ++v) lap += s.derivative_value(detail::twice(v));
    res[idx] = std::abs(lap + k * k * s.constant_term());
  });
  ResidualReport rep;
  rep.region = region;
  rep.constant = k;
  rep.points = n;
  const std::size_t best = detail::argmax_slot(res);
  rep.sup_abs = res[best];
  const auto p = region.node(best);
  rep.argmax.assign(p.begin(), p.begin() + def.dim);
  return rep;
}

/// wave_residual: sup over grid x times of |Psi_tt - c^2 lap Psi|.
inline ResidualReport wave_residual(const FieldDef& def, const Region& region,
                                    const std::vector<double>& times, double c = 1.0,
                                    const ParamMap& params = {}, int threads = 0) {
  if (!def.time_dependent)
    throw NotTimeDependent("field '" + def.name + "' is not time dependent");
  region.validate();
  if (region.dim != def.dim) throw DimMismatch("region and field dimensions differ");
  if (times.empty()) throw BadParameter("wave_residual needs at least one time");
  ParamMap p = params;
  p.erase("t");
  const CompiledField f(def, p);
  const std::size_t nodes = region.node_count(), n = nodes * times.size();
  std::vector<double> res(n);
  parallel_for(n, threads, [&](std::size_t idx) {
    const auto node = region.node(idx % nodes);
    std::array<double, 4> pt{};
    for (int a = 0; a < def.dim; ++a) pt[a] = node[a];
    pt[def.dim] = times[idx / nodes];
    const TruncatedSeries s = f.jet(std::span<const double>(pt.data(), def.dim + 1), 2);
    Complex lap = 0.0;
    for (int v = 0; v < def.dim; ++v) lap += s.derivative_value(detail::twice(v));
    res[idx] = std::abs(s.derivative_value(detail::twice(def.dim)) - c * c * lap);
  });
  ResidualReport rep;
  rep.region = region;
  rep.constant = c;
  rep.points = n;
  const std::size_t best = detail::argmax_slot(res);
  rep.sup_abs = res[best];
  const auto node = region.node(best % nodes);
  rep.argmax.assign(node.begin(), node.begin() + def.dim);
  rep.argmax.push_back(times[best / nodes]);
  return rep;
}

// ---------------------------------------------------------------------------
// Cauchy data

/// Derivative rows along y = y0: psi0[i] = d_x^i psi(x0, y0) and
/// psi1[i] = d_x^i psi_y(x0, y0). Missing entries are zero.
struct CauchyData {
  double x0 = 0.0;
  std::vector<Complex> psi0;
  std::vector<Complex> psi1;
  double k = 1.0;
};

/// helmholtz_series_from_cauchy: c_{i,j+2} = -c_{i+2,j} - k^2 c_{i,j},
/// returned in Taylor convention (divided by i! j!).
inline TruncatedSeries helmholtz_series_from_cauchy(const CauchyData& data, int order) {
  if (order < 0 || order > kMaxOrder)
    throw BadParameter("series order must be in 0.." + std::to_string(kMaxOrder));
  if (!(data.k > 0)) throw BadParameter("wavenumber must be positive");
  const int n = order + 1;
  std::vector<std::vector<Complex>> c(n + 2, std::vector<Complex>(n + 2, 0.0));
  for (int i = 0; i < n + 2; ++i) {
    if (i < static_cast<int>(data.psi0.size())) c[i][0] = data.psi0[i];
    if (i < static_cast<int>(data.psi1.size())) c[i][1] = data.psi1[i];
  }
  const double k2 = data.k * data.k;
  for (int j = 0; j + 2 <= order; ++j)
    for (int i = 0; i + j + 2 <= order; ++i) c[i][j + 2] = -c[i + 2][j] - k2 * c[i][j];
  TruncatedSeries s(2, order);
  for (int i = 0; i <= order; ++i)
    for (int j = 0; i + j <= order; ++j)
      s.set_coeff({i, j}, c[i][j] / (detail::factorial(i) * detail::factorial(j)));
  return s;
}

/// Largest violation of the jet relations e+g+k^2 a = 0, h+l+k^2 b = 0,
/// k+m+k^2 c = 0 (coefficients in derivative convention).
struct JetRelationCheck {
  std::string relation;
  double violation = 0.0;
};

inline JetRelationCheck helmholtz_jet_violation(const TruncatedSeries& s, double k = 1.0) {
  if (s.nvars() != 2) throw DimMismatch("jet relations are planar");
  if (s.order() < 3) throw InsufficientOrder("jet relations need series order >= 3");
  const double k2 = k * k;
  auto d = [&](int i, int j) { return s.derivative_value({i, j}); };
  const std::array<std::pair<const char*, double>, 3> rel{{
      {"e+g+a=0", std::abs(d(2, 0) + d(0, 2) + k2 * d(0, 0))},
      {"h+l+b=0", std::abs(d(3, 0) + d(1, 2) + k2 * d(1, 0))},
      {"k+m+c=0", std::abs(d(2, 1) + d(0, 3) + k2 * d(0, 1))},
  }};
  JetRelationCheck out{rel[0].first, rel[0].second};
  for (const auto& [name, v] : rel)
    if (v > out.violation) out = {name, v};
  return out;
}

/// Throws NotHelmholtzJet when a relation fails by more than tol x scale.
inline void require_helmholtz_jet(const TruncatedSeries& s, double k = 1.0, double tol = 1e-13) {
  const auto chk = helmholtz_jet_violation(s, k);
  const double scale = std::max(1.0, s.max_abs());
  if (chk.violation > tol * scale) throw NotHelmholtzJet(chk.relation, chk.violation);
}

// ---------------------------------------------------------------------------
// plane waves

struct PlaneWave {
  Complex amplitude;
  std::vector<double> angles;  ///< {angle} in 2D, {polar, azimuth} in 3D
};

struct PlaneWaveSum {
  int dim = 2;
  double k = 1.0;
  std::vector<PlaneWave> terms;
};

inline std::array<double, 3> direction(const PlaneWave& w, int dim) {
  if (dim == 2) return {std::cos(w.angles.at(0)), std::sin(w.angles.at(0)), 0.0};
  const double th = w.angles.at(0), ph = w.angles.at(1);
  return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
}

/// sum amplitude * exp(i k <direction, position>) as an exact expression.
inline FieldDef plane_wave_field(const PlaneWaveSum& sum, std::string name = "planewaves") {
  if (sum.dim != 2 && sum.dim != 3) throw BadParameter("plane-wave dimension must be 2 or 3");
  if (!(sum.k > 0)) throw BadParameter("wavenumber must be positive");
  using namespace expr;
  const char* vars[3] = {"x", "y", "z"};
  Expr total;
  for (const auto& w : sum.terms) {
    if (static_cast<int>(w.angles.size()) != sum.dim - 1)
      throw BadParameter("plane wave needs " + std::to_string(sum.dim - 1) + " angle(s)");
    const auto d = direction(w, sum.dim);
    Expr phase;
    for (int a = 0; a < sum.dim; ++a) {
      const Expr term = mul(number(sum.k * d[a]), symbol(vars[a]));
      phase = phase ? add(phase, term) : term;
    }
    const Expr amp = add(number(w.amplitude.real()), mul(number(w.amplitude.imag()), imag_unit()));
    const Expr wave = mul(amp, call(Function::Exp, mul(imag_unit(), phase)));
    total = total ? add(total, wave) : wave;
  }
  if (!total) total = number(0.0);
  FieldDef def{std::move(name), sum.dim, false, total, {}, "plane-wave superposition"};
  validate(def);
  return def;
}

namespace detail {

/// Platform-independent uniform in [0, 1).
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Box-Muller pair; std::normal_distribution is implementation defined.
inline std::array<double, 2> gaussian_pair(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng), u2 = uniform01(rng);
  const double r = std::sqrt(-2.0 * std::log(u1)), a = 2.0 * M_PI * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace detail

/// Complex Gaussian amplitudes (unit variance per component) and directions
/// uniform on the circle or sphere, from mt19937_64(seed).
inline PlaneWaveSum random_plane_wave_sum(std::uint64_t seed, int n_terms, int dim,
                                          double k = 1.0) {
  if (n_terms < 3) throw BadParameter("random Helmholtz fields need at least 3 terms");
  if (dim != 2 && dim != 3) throw BadParameter("plane-wave dimension must be 2 or 3");
  if (!(k > 0)) throw BadParameter("wavenumber must be positive");
  std::mt19937_64 rng(seed);
  PlaneWaveSum sum{dim, k, {}};
  for (int i = 0; i < n_terms; ++i) {
    const auto g = detail::gaussian_pair(rng);
    PlaneWave w{Complex(g[0], g[1]), {}};
    if (dim == 2) {
      w.angles = {2.0 * M_PI * detail::uniform01(rng)};
    } else {
      const double cz = 2.0 * detail::uniform01(rng) - 1.0;
      w.angles = {std::acos(cz), 2.0 * M_PI * detail::uniform01(rng)};
    }
    sum.terms.push_back(std::move(w));
  }
  return sum;
}

inline FieldDef random_helmholtz_field(std::uint64_t seed, int n_terms, int dim, double k = 1.0) {
  return plane_wave_field(random_plane_wave_sum(seed, n_terms, dim, k),
                          "random(seed=" + std::to_string(seed) + ")");
}

/// CSV with header re,im,angle (2D) or re,im,polar,azimuth (3D); k is not
/// stored.
inline void write_plane_waves_csv(const PlaneWaveSum& sum, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IOError("cannot write '" + path + "'");
  out << (sum.dim == 2 ? "re,im,angle\n" : "re,im,polar,azimuth\n");
  out.precision(17);
  for (const auto& w : sum.terms) {
    out << w.amplitude.real() << ',' << w.amplitude.imag();
    for (double a : w.angles) out << ',' << a;
    out << '\n';
  }
  if (!out) throw IOError("write failed for '" + path + "'");
}

inline PlaneWaveSum read_plane_waves_csv(const std::string& path, double k = 1.0) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot read '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IOError("empty plane-wave file '" + path + "'");
  PlaneWaveSum sum;
  sum.k = k;
  const std::string header = trim(line);
  if (header == "re,im,angle") sum.dim = 2;
  else if (header == "re,im,polar,azimuth") sum.dim = 3;
  else throw IOError("unrecognized plane-wave header '" + header + "'");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      cols.push_back(parse_double(trim(cell), "plane-wave column at line " + std::to_string(lineno)));
    if (static_cast<int>(cols.size()) != sum.dim + 1)
      throw IOError("line " + std::to_string(lineno) + " of '" + path + "' has " +
                    std::to_string(cols.size()) + " columns");
    sum.terms.push_back({Complex(cols[0], cols[1]), {cols.begin() + 2, cols.end()}});
  }
  return sum;
}

// ---------------------------------------------------------------------------
// wave constructors

/// monochromatic_wave: Psi = psi cos t + phi sin t.
inline FieldDef monochromatic_wave(const FieldDef& psi, const FieldDef& phi) {
  if (psi.dim != phi.dim) throw DimMismatch("monochromatic_wave needs equal dimensions");
  if (psi.time_dependent || phi.time_dependent)
    throw BadParameter("monochromatic_wave takes static fields");
  ParamMap params = phi.params;
  for (const auto& [k, v] : psi.params) params[k] = v;
  if (params.count("t")) throw BadParameter("inputs may not declare parameter t");
  using namespace expr;
  const Expr t = symbol("t");
  FieldDef out{"wave(" + psi.name + "," + phi.name + ")", psi.dim, true,
               add(mul(psi.expr, call(Function::Cos, t)), mul(phi.expr, call(Function::Sin, t))),
               std::move(params), "monochromatic wave"};
  validate(out);
  return out;
}

/// rescale_wave: x -> k x (each spatial variable) and t -> c k t, taking a
/// k = 1, c = 1 solution to one at (k, c).
inline FieldDef rescale_wave(const FieldDef& def, double k, double c = 1.0) {
  if (!(k > 0) || !(c > 0)) throw BadParameter("k and c must be positive");
  using namespace expr;
  std::map<std::string, Expr> bind;
  bind["x"] = mul(number(k), symbol("x"));
  bind["y"] = mul(number(k), symbol("y"));
  if (def.dim == 3) bind["z"] = mul(number(k), symbol("z"));
  if (def.time_dependent) bind["t"] = mul(number(c * k), symbol("t"));
  FieldDef out = def;
  out.expr = substitute(def.expr, bind);
  out.name = "rescaled(" + def.name + ")";
  return out;
}

// ---------------------------------------------------------------------------
// Hessian pencil

struct PencilResult {
  bool definite = false;
  std::optional<std::array<double, 2>> witness;  ///< (lambda, mu), positive definite
};

/// hessian_pencil_definite: whether lambda Re Hess + mu Im Hess is definite
/// for some real (lambda, mu). Sweeps 3600 angles; in 2D the exact maximum
/// of det over the circle is also used.
inline PencilResult hessian_pencil_definite(const TruncatedSeries& jet, double zero_tol = 1e-8,
                                            double def_tol = 1e-10) {
  const int n = jet.nvars();
  if (n != 2 && n != 3) throw DimMismatch("pencil test needs a 2 or 3 variable jet");
  if (jet.order() < 2) throw InsufficientOrder("pencil test needs series order >= 2");
  double scale = 0.0;
  linalg::Mat a(n, n), b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      MultiIndex al{};
      ++al[i];
      ++al[j];
      const Complex h = jet.derivative_value(al);
      a(i, j) = h.real();
      b(i, j) = h.imag();
      scale = std::max({scale, std::abs(h.real()), std::abs(h.imag())});
    }
  for (std::size_t i = 1; i < jet.size() && degree(jet.exponents(i)) <= 2; ++i)
    scale = std::max(scale, std::abs(jet.derivative_value(jet.exponents(i))));
  if (std::abs(jet.constant_term()) > zero_tol * std::max(scale, 1e-300) ||
      (scale == 0.0 && jet.constant_term() != Complex(0.0)))
    throw NotOnDislocation("pencil test needs a jet at a dislocation zero");
  PencilResult out;
  if (scale == 0.0) return out;
  auto pencil = [&](double lam, double mu) {
    linalg::Mat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = lam * a(i, j) + mu * b(i, j);
    return m;
  };
  // returns +1 / -1 when positive / negative definite
  auto definiteness = [&](const linalg::Mat& m) {
    const auto e = linalg::sym_eigen(m);
    const double thr = def_tol * scale;
    if (e.values.front() > thr) return 1;
    if (e.values.back() < -thr) return -1;
    return 0;
  };
  if (n == 2) {
    // det(lam A + mu B) is the quadratic form [[det A, m/2], [m/2, det B]]
    const double mixed = a(0, 0) * b(1, 1) + a(1, 1) * b(0, 0) - 2.0 * a(0, 1) * b(0, 1);
    linalg::Mat q(2, 2);
    q(0, 0) = a(0, 0) * a(1, 1) - a(0, 1) * a(0, 1);
    q(1, 1) = b(0, 0) * b(1, 1) - b(0, 1) * b(0, 1);
    q(0, 1) = q(1, 0) = 0.5 * mixed;
    const auto e = linalg::sym_eigen(q);
    if (e.values.back() > def_tol * scale * scale) {
      const double lam = e.vectors(0, 1), mu = e.vectors(1, 1);
      const int sgn = definiteness(pencil(lam, mu)) < 0 ? -1 : 1;
      out.definite = true;
      out.witness = std::array<double, 2>{sgn * lam, sgn * mu};
      return out;
    }
  }
  double tr_a = 0.0, tr_b = 0.0;
  for (int i = 0; i < n; ++i) {
    tr_a += a(i, i);
    tr_b += b(i, i);
  }
  for (int i = 0; i < 3600; ++i) {
    const double ang = M_PI * i / 3600.0;
    const double lam = std::cos(ang), mu = std::sin(ang);
    // all eigenvalues beyond thr in absolute value with one sign force |trace| > n thr
    if (std::abs(lam * tr_a + mu * tr_b) <= n * def_tol * scale) continue;
    const int d = definiteness(pencil(lam, mu));
    if (d != 0) {
      out.definite = true;
      out.witness = std::array<double, 2>{d * lam, d * mu};
      return out;
    }
  }
  return out;
}

}  // namespace vortex_atlas
