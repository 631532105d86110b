/**
 * @file strata.hpp
 * @brief Coordinates on the Helmholtz 3-jet space, strata membership and
 * the Monte-Carlo genericity harness.
 */
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "vortex_atlas/classify.hpp"
#include "vortex_atlas/dislocation.hpp"
#include "vortex_atlas/errors.hpp"
#include "vortex_atlas/field.hpp"
#include "vortex_atlas/helmholtz.hpp"
#include "vortex_atlas/parallel.hpp"

namespace vortex_atlas {

/// Free coordinates (a, b, c, e, f, h, k) of a Helmholtz 3-jet; g, l, m
/// are derived from the relations.
struct HelmholtzJet3 {
  std::array<double, 2> basepoint{};
  double wavenumber = 1.0;
  Complex a, b, c, e, f, h, k;

  Complex g() const { return -wavenumber * wavenumber * a - e; }
  Complex l() const { return -wavenumber * wavenumber * b - h; }
  Complex m() const { return -wavenumber * wavenumber * c - k; }

  /// a1, a2, b1, ..., k2.
  std::array<double, 14> reals() const {
    std::array<double, 14> r{};
    const Complex* z[7] = {&a, &b, &c, &e, &f, &h, &k};
    for (int i = 0; i < 7; ++i) {
      r[2 * i] = z[i]->real();
      r[2 * i + 1] = z[i]->imag();
    }
    return r;
  }

  HelmholtzJet3 scaled(double s) const {
    HelmholtzJet3 o = *this;
    for (Complex* z : {&o.a, &o.b, &o.c, &o.e, &o.f, &o.h, &o.k}) *z *= s;
    return o;
  }
};

/// project_to_helmholtz_jet: checks the three relations (relative to the
/// jet norm) and keeps the free coordinates.
inline HelmholtzJet3 project_to_helmholtz_jet(const Jet2& j, double k = 1.0, double tol = 1e-8) {
  const double k2 = k * k;
  const double norm = detail::jet_norm(j.series);
  const std::array<std::pair<const char*, double>, 3> rel{{
      {"e+g+a=0", std::abs(j.e + j.g + k2 * j.a)},
      {"h+l+b=0", std::abs(j.h + j.l + k2 * j.b)},
      {"k+m+c=0", std::abs(j.k + j.m + k2 * j.c)},
  }};
  for (const auto& [name, v] : rel)
    if (v > tol * norm) throw NotHelmholtzJet(name, v);
  return HelmholtzJet3{j.basepoint, k, j.a, j.b, j.c, j.e, j.f, j.h, j.k};
}

enum class StratumId { W1, W3, W4, W5, Unresolved };

inline const char* to_string(StratumId s) {
  switch (s) {
    case StratumId::W1: return "W1";
    case StratumId::W3: return "W3";
    case StratumId::W4: return "W4";
    case StratumId::W5: return "W5";
    case StratumId::Unresolved: return "Unresolved";
  }
  return "Unknown";
}

/// Codimension in the Helmholtz 3-jet space; 0 for Unresolved.
inline int codimension(StratumId s) {
  switch (s) {
    case StratumId::W1: return 6;
    case StratumId::W3: return 4;
    case StratumId::W4: return 3;
    case StratumId::W5: return 2;
    case StratumId::Unresolved: return 0;
  }
  return 0;
}

struct StratumResiduals {
  double a = 0.0;      ///< |a|
  double bc = 0.0;     ///< max(|b|, |c|)
  double cross = 0.0;  ///< b1 c2 - b2 c1
  double d1 = 0.0;
  double d2 = 0.0;
  double bordered1 = 0.0;  ///< D1 c1 - D2 b1
  double bordered2 = 0.0;  ///< D1 c2 - D2 b2
};

struct StratumReport {
  StratumId stratum = StratumId::Unresolved;
  StratumResiduals residuals;
  double tolerance = 1e-8;  ///< relative; equation of degree d uses tolerance * norm^d
  double norm = 0.0;
  std::string note;
};

inline StratumResiduals stratum_residuals(const HelmholtzJet3& j) {
  const double a1 = j.a.real(), a2 = j.a.imag(), b1 = j.b.real(), b2 = j.b.imag();
  const double c1 = j.c.real(), c2 = j.c.imag(), e1 = j.e.real(), e2 = j.e.imag();
  const double f1 = j.f.real(), f2 = j.f.imag();
  StratumResiduals r;
  r.a = std::abs(j.a);
  r.bc = std::max(std::abs(j.b), std::abs(j.c));
  r.cross = b1 * c2 - b2 * c1;
  r.d1 = (e1 * c2 - e2 * c1) + (b1 * f2 - b2 * f1);
  r.d2 = (f1 * c2 - f2 * c1) - (b1 * (a2 + e2) - b2 * (a1 + e1));
  r.bordered1 = r.d1 * c1 - r.d2 * b1;
  r.bordered2 = r.d1 * c2 - r.d2 * b2;
  return r;
}

/// stratum_membership: finest stratum whose equations hold, testing
/// W1, W3, W4, W5 in that order. A residual between tol and
/// kAmbiguity x tol makes the decision Unresolved.
inline StratumReport stratum_membership(const HelmholtzJet3& j, double tol = 1e-8) {
  constexpr double kAmbiguity = 1e3;
  StratumReport rep;
  rep.tolerance = tol;
  rep.residuals = stratum_residuals(j);
  for (const Complex& z : {j.a, j.b, j.c, j.e, j.f, j.h, j.k})
    rep.norm = std::max(rep.norm, std::abs(z));
  const double n = rep.norm;
  enum class Test { Holds, Ambiguous, Fails };
  auto test = [&](double v, int deg) {
    const double t = tol * std::pow(n, deg);
    if (std::abs(v) <= t) return Test::Holds;
    if (std::abs(v) <= kAmbiguity * t) return Test::Ambiguous;
    return Test::Fails;
  };
  // returns true when the stratum decision is final
  auto decide = [&](std::initializer_list<Test> eqs, StratumId s) {
    bool all = true, any_fail = false;
    for (Test t : eqs) {
      all = all && t == Test::Holds;
      any_fail = any_fail || t == Test::Fails;
    }
    if (all) {
      rep.stratum = s;
      return true;
    }
    if (!any_fail) {
      rep.stratum = StratumId::Unresolved;
      rep.note = std::string("near the boundary of ") + to_string(s);
      return true;
    }
    return false;
  };
  const auto& r = rep.residuals;
  const Test ta = test(r.a, 1), tbc = test(r.bc, 1), tx = test(r.cross, 2);
  const Test tb1 = test(r.bordered1, 3), tb2 = test(r.bordered2, 3);
  if (decide({ta, tbc}, StratumId::W1)) return rep;
  if (decide({ta, tx, tb1, tb2}, StratumId::W3)) {
    // D1 = D2 = 0 makes both bordered equations trivial; such jets lie in
    // the more degenerate locus that has no equations
    if (rep.stratum == StratumId::W3 && test(r.d1, 2) != Test::Fails &&
        test(r.d2, 2) != Test::Fails) {
      rep.stratum = StratumId::Unresolved;
      rep.note = "iterated Jacobian vanishes";
    }
    return rep;
  }
  if (decide({ta, tx}, StratumId::W4)) return rep;
  if (decide({ta}, StratumId::W5)) return rep;
  rep.stratum = StratumId::Unresolved;
  rep.note = "not on the dislocation locus";
  return rep;
}

// ---------------------------------------------------------------------------
// cross-check against the classifier

enum class Consistency { Consistent, Unresolved, Inconsistent };

inline const char* to_string(Consistency c) {
  switch (c) {
    case Consistency::Consistent: return "consistent";
    case Consistency::Unresolved: return "unresolved";
    case Consistency::Inconsistent: return "inconsistent";
  }
  return "unknown";
}

struct ConsistencyReport {
  std::vector<double> location;
  StratumReport stratum;
  ClassificationReport classification;
  Consistency status = Consistency::Inconsistent;
};

inline Consistency stratum_class_consistency(StratumId s, ClassKind k) {
  const bool fold = k == ClassKind::Hyperbolic || k == ClassKind::Elliptic ||
                    k == ClassKind::DegenerateFold;
  switch (s) {
    case StratumId::W5:
      return k == ClassKind::Regular ? Consistency::Consistent : Consistency::Inconsistent;
    case StratumId::W4: return fold ? Consistency::Consistent : Consistency::Inconsistent;
    case StratumId::W3:
      return k == ClassKind::Cusp ? Consistency::Consistent : Consistency::Inconsistent;
    case StratumId::W1:
      return k == ClassKind::Degenerate ? Consistency::Consistent : Consistency::Inconsistent;
    case StratumId::Unresolved:
      return k == ClassKind::Degenerate ? Consistency::Consistent : Consistency::Unresolved;
  }
  return Consistency::Inconsistent;
}

/// stratum_vs_classifier_crosscheck at a planar zero of a Helmholtz field.
inline ConsistencyReport stratum_vs_classifier_crosscheck(const FieldDef& def,
                                                          std::span<const double> zero,
                                                          const ParamMap& params = {},
                                                          double k = 1.0,
                                                          const ToleranceSet& tol = {}) {
  if (def.dim != 2) throw DimMismatch("strata are defined for planar jets");
  const CompiledField f(def, params);
  if (f.arity() != 2)
    throw BadParameter("field '" + def.name + "' is time dependent; give t as a parameter");
  const TruncatedSeries jet = f.jet(zero, kDefaultOrder);
  const Jet2 j = jet2_from_series(jet, {zero[0], zero[1]});
  ConsistencyReport rep;
  rep.location.assign(zero.begin(), zero.end());
  rep.stratum = stratum_membership(project_to_helmholtz_jet(j, k));
  rep.classification = classify_jet_2d(j, tol);
  rep.status = stratum_class_consistency(rep.stratum.stratum, rep.classification.cls.kind);
  return rep;
}

// ---------------------------------------------------------------------------
// Monte Carlo

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Per-sample seed derived from the master seed.
inline std::uint64_t sample_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15ull);
}

struct MonteCarloOptions {
  int n_terms = 8;
  double k = 1.0;
  int threads = 0;
  ToleranceSet tol;
};

struct MonteCarloRow {
  std::size_t sample = 0;
  std::uint64_t seed = 0;
  int zero_index = 0;
  int curve_index = -1;  ///< 3D: curve the vertex belongs to
  std::vector<double> location;
  std::string cls;
  std::string stratum;  ///< "n/a" in 3D
  StratumResiduals residuals;
  std::string consistency;  ///< "n/a" in 3D
  bool pencil_definite = false;
  std::string error;  ///< set when a classification step threw
};

struct MonteCarloResult {
  std::uint64_t master_seed = 0;
  std::size_t samples = 0;
  int dim = 2;
  Region region;
  std::vector<MonteCarloRow> rows;
  std::map<std::string, int> class_counts;
  std::map<std::string, int> stratum_counts;
  std::map<std::string, int> consistency_counts;
  int pencil_definite_count = 0;
  int error_count = 0;
  std::vector<std::string> warnings;

  std::size_t zeros() const { return rows.size(); }
  int count_class(const std::string& c) const {
    const auto it = class_counts.find(c);
    return it == class_counts.end() ? 0 : it->second;
  }
};

namespace detail {

inline MonteCarloRow examine_zero(const FieldDef& f, std::span<const double> p, double k,
                                  const ToleranceSet& tol) {
  MonteCarloRow row;
  row.location.assign(p.begin(), p.end());
  row.stratum = "n/a";
  row.consistency = "n/a";
  try {
    const TruncatedSeries jet = eval_field_jet(f, p, {}, kDefaultOrder);
    row.pencil_definite = hessian_pencil_definite(jet, 1e-6).definite;
    if (f.dim == 2) {
      const Jet2 j = jet2_from_series(jet, {p[0], p[1]});
      const auto cls = classify_jet_2d(j, tol);
      const auto st = stratum_membership(project_to_helmholtz_jet(j, k));
      row.cls = cls.cls.label();
      row.stratum = to_string(st.stratum);
      row.residuals = st.residuals;
      row.consistency = to_string(stratum_class_consistency(st.stratum, cls.cls.kind));
    } else {
      row.cls = classify_jet_3d(jet3_from_series(jet, {p[0], p[1], p[2]}), tol).cls.label();
    }
  } catch (const Error& e) {
    row.cls = "error";
    row.error = e.what();
  }
  return row;
}

}  // namespace detail

/// monte_carlo_genericity: random plane-wave Helmholtz fields, zeros located
/// (2D scan or 3D trace vertices), each classified, stratified (2D) and
/// pencil-tested. Deterministic for a fixed master seed and thread count.
inline MonteCarloResult monte_carlo_genericity(std::uint64_t master_seed, std::size_t n_samples,
                                               const Region& region,
                                               const MonteCarloOptions& opt = {}) {
  if (n_samples < 1) throw BadParameter("n_samples must be at least 1");
  region.validate();
  MonteCarloResult res;
  res.master_seed = master_seed;
  res.samples = n_samples;
  res.dim = region.dim;
  res.region = region;
  std::vector<std::vector<MonteCarloRow>> per_sample(n_samples);
  std::vector<std::vector<std::string>> per_warn(n_samples);
  ZeroOptions zopt;
  zopt.threads = 1;
  parallel_for(n_samples, opt.threads, [&](std::size_t i) {
    const std::uint64_t seed = sample_seed(master_seed, i);
    const FieldDef f = random_helmholtz_field(seed, opt.n_terms, region.dim, opt.k);
    const CompiledField cf(f);
    auto& rows = per_sample[i];
    if (region.dim == 2) {
      const auto scan = scan_zeros_2d(cf, region, zopt);
      for (const auto& w : scan.warnings) per_warn[i].push_back(w);
      for (const auto& z : scan.points) rows.push_back(detail::examine_zero(f, z.location, opt.k, opt.tol));
    } else {
      const auto tr = trace_dislocation_3d(cf, region, zopt);
      for (const auto& w : tr.warnings) per_warn[i].push_back(w);
      for (std::size_t c = 0; c < tr.curves.size(); ++c) {
        const auto& verts = tr.curves[c].vertices;
        // closed curves repeat the first vertex at the end
        const std::size_t n = tr.curves[c].closed() && verts.size() > 1 ? verts.size() - 1 : verts.size();
        for (std::size_t v = 0; v < n; ++v) {
          rows.push_back(detail::examine_zero(f, verts[v], opt.k, opt.tol));
          rows.back().curve_index = static_cast<int>(c);
        }
      }
    }
    for (std::size_t z = 0; z < rows.size(); ++z) {
      rows[z].sample = i;
      rows[z].seed = seed;
      rows[z].zero_index = static_cast<int>(z);
    }
  });
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (auto& w : per_warn[i]) res.warnings.push_back("sample " + std::to_string(i) + ": " + w);
    for (auto& row : per_sample[i]) {
      ++res.class_counts[row.cls];
      if (res.dim == 2) {
        ++res.stratum_counts[row.stratum];
        ++res.consistency_counts[row.consistency];
      }
      if (row.pencil_definite) ++res.pencil_definite_count;
      if (!row.error.empty()) ++res.error_count;
      res.rows.push_back(std::move(row));
    }
  }
  return res;
}

/// CSV: sample,seed,zero_index,curve,x,y[,z],class,stratum,consistency,
/// pencil_definite,res_a,res_cross,res_bordered1,res_bordered2.
inline void write_monte_carlo_csv(const MonteCarloResult& r, std::ostream& out) {
  out << "sample,seed,zero_index,curve,x,y";
  if (r.dim == 3) out << ",z";
  out << ",class,stratum,consistency,pencil_definite,res_a,res_cross,res_bordered1,res_bordered2\n";
  out.precision(17);
  for (const auto& row : r.rows) {
    out << row.sample << ',' << row.seed << ',' << row.zero_index << ',' << row.curve_index;
    for (double v : row.location) out << ',' << v;
    out << ',' << row.cls << ',' << row.stratum << ',' << row.consistency << ','
        << (row.pencil_definite ? 1 : 0) << ',' << row.residuals.a << ',' << row.residuals.cross
        << ',' << row.residuals.bordered1 << ',' << row.residuals.bordered2 << '\n';
  }
}

inline void write_monte_carlo_csv(const MonteCarloResult& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IOError("cannot write '" + path + "'");
  write_monte_carlo_csv(r, out);
  if (!out) throw IOError("write failed for '" + path + "'");
}

}  // namespace vortex_atlas
