// Acceptance gate: one [PASS]/[FAIL] line per criterion. `--only N` runs a
// single criterion; exit status is nonzero if any selected criterion fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "vortex_atlas/vortex_atlas.hpp"

using namespace vortex_atlas;

namespace {

// pinned tolerances and sizes
constexpr double kResidualBound = 1e-10;
constexpr int kResidualGrid = 101;
constexpr std::uint64_t kMasterSeed = 20240611;
constexpr std::size_t kSamples2D = 1000;
constexpr std::size_t kSamples3D = 200;
constexpr int kTerms = 8;
constexpr int kMonteCarloGrid2D = 121;  // [-3,3]^2, spacing 0.05
constexpr int kMonteCarloGrid3D = 25;   // [-2,2]^3, spacing 1/6
constexpr double kLocationTol = 1e-8;
constexpr double kRadiusTol = 1e-6;
constexpr double kJetRelationTol = 1e-13;
constexpr double kMonteCarloConsistentFraction = 0.99;
constexpr int kRadialPairs = 50;
constexpr int kFoldJets = 100;
constexpr double kCurvatureMargin = 10.0;  // |kappa Q| > margin * tol.curv
constexpr double kFiniteDifferenceTol = 1e-6;
constexpr double kFiniteDifferenceStep = 0.02;
constexpr double kRayDeviation = 1e-3;

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (failures.size() < 8) failures.push_back(what);
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

const std::vector<double> kO2{0.0, 0.0};
const std::vector<double> kO3{0.0, 0.0, 0.0};

const MonteCarloResult& monte_carlo_2d() {
  static const MonteCarloResult r = [] {
    MonteCarloOptions opt;
    opt.n_terms = kTerms;
    return monte_carlo_genericity(kMasterSeed, kSamples2D,
                                  Region::cube(2, -3, 3, kMonteCarloGrid2D), opt);
  }();
  return r;
}

// 1 -------------------------------------------------------------------------
Outcome catalog_labels() {
  Outcome o;
  int n = 0;
  for (const auto& e : catalog_entries()) {
    if (e.expected_class.empty()) continue;
    const auto r = classify_point(e.def, e.def.dim == 2 ? kO2 : kO3);
    o.require(r.cls.label() == e.expected_class,
              e.def.name + ": " + r.cls.label() + " != " + e.expected_class);
    ++n;
  }
  o.detail = std::to_string(n) + " normal forms labelled";
  return o;
}

// 2 -------------------------------------------------------------------------
Outcome helmholtz_realizations() {
  Outcome o;
  struct Case {
    const char* name;
    const char* cls;
  };
  const Case cases[] = {{"H2.helmholtz-hyperbolic", "Hyperbolic"},
                        {"H2.helmholtz-cusp", "Cusp"},
                        {"H2.helmholtz-hyperbolic-alt", "Hyperbolic"},
                        {"H3.helmholtz-DHt", "DefiniteHyperbolic"},
                        {"H3.helmholtz-It", "Indefinite"},
                        {"H3.helmholtz-cusp", "SpatialCusp"}};
  double worst = 0.0;
  for (const auto& c : cases) {
    const FieldDef& def = catalog_get(c.name);
    const ParamMap at0 = def.time_dependent ? ParamMap{{"t", 0.0}} : ParamMap{};
    const auto res =
        helmholtz_residual(def, Region::cube(def.dim, -1, 1, kResidualGrid), 1.0, at0);
    worst = std::max(worst, res.sup_abs);
    o.require(res.sup_abs < kResidualBound, std::string(c.name) + " residual " + fmt(res.sup_abs));
    const auto cls = classify_point(def, def.dim == 2 ? kO2 : kO3, at0);
    o.require(cls.cls.label() == c.cls, std::string(c.name) + " classified " + cls.cls.label());
  }
  double worst_wave = 0.0;
  for (const char* name : {"H2.helmholtz-hyperbolic-wave", "H2.helmholtz-cusp-wave",
                           "H3.helmholtz-DHt", "H3.helmholtz-It"}) {
    const FieldDef& def = catalog_get(name);
    const std::vector<double> times =
        def.dim == 2 ? std::vector<double>{0.0, 0.7, 1.9, -2.3} : std::vector<double>{0.0, 1.3};
    const auto res = wave_residual(def, Region::cube(def.dim, -1, 1, kResidualGrid), times);
    worst_wave = std::max(worst_wave, res.sup_abs);
    o.require(res.sup_abs < kResidualBound, std::string(name) + " wave residual " + fmt(res.sup_abs));
  }
  o.detail = "max Helmholtz residual " + fmt(worst) + ", max wave residual " + fmt(worst_wave) +
             " (bound " + fmt(kResidualBound) + ", 101/axis); origin classes match";
  return o;
}

// 3 -------------------------------------------------------------------------
Outcome elliptic_obstruction() {
  Outcome o;
  const auto& r2 = monte_carlo_2d();
  MonteCarloOptions opt;
  opt.n_terms = kTerms;
  const auto r3 =
      monte_carlo_genericity(kMasterSeed, kSamples3D, Region::cube(3, -2, 2, kMonteCarloGrid3D), opt);
  o.require(r2.zeros() > 0 && r3.zeros() > 0, "no zeros found");
  o.require(r2.count_class("Elliptic") == 0,
            "2D Elliptic count " + std::to_string(r2.count_class("Elliptic")));
  o.require(r3.count_class("DefiniteElliptic") == 0,
            "3D DefiniteElliptic count " + std::to_string(r3.count_class("DefiniteElliptic")));
  o.require(r2.pencil_definite_count == 0 && r3.pencil_definite_count == 0,
            "definite pencils: " + std::to_string(r2.pencil_definite_count) + " / " +
                std::to_string(r3.pencil_definite_count));

  // determinism across thread counts
  MonteCarloOptions a = opt, b = opt;
  a.threads = 1;
  b.threads = 3;
  const Region small = Region::cube(2, -3, 3, kMonteCarloGrid2D);
  std::ostringstream sa, sb;
  write_monte_carlo_csv(monte_carlo_genericity(kMasterSeed, 40, small, a), sa);
  write_monte_carlo_csv(monte_carlo_genericity(kMasterSeed, 40, small, b), sb);
  o.require(sa.str() == sb.str(), "Monte-Carlo output depends on the thread count");

  o.detail = std::to_string(kSamples2D) + " planar fields, " + std::to_string(r2.zeros()) +
             " zeros (" + std::to_string(r2.count_class("Regular")) + " Regular, " +
             std::to_string(r2.error_count) + " errors); " + std::to_string(kSamples3D) +
             " spatial fields, " + std::to_string(r3.zeros()) + " curve vertices; 0 Elliptic, " +
             "0 DefiniteElliptic, 0 definite pencils";
  return o;
}

// 4 -------------------------------------------------------------------------
Outcome bifurcation_counts() {
  Outcome o;
  const Region sq = Region::cube(2, -1, 1, 101);
  auto near = [](const std::vector<double>& p, double x, double y) {
    return std::abs(p[0] - x) <= kLocationTol && std::abs(p[1] - y) <= kLocationTol;
  };
  auto has = [&](const ScanResult& s, double x, double y) {
    for (const auto& z : s.points)
      if (near(z.location, x, y)) return true;
    return false;
  };
  const auto ht = sweep_parameter(catalog_get("H2.Ht"), sq, "t", {-0.25, 0.0, 0.25});
  o.require(ht.counts == std::vector<int>{2, 1, 0}, "H_t counts");
  o.require(has(ht.scans[0], 0.5, 0.0) && has(ht.scans[0], -0.5, 0.0), "H_t zeros at t=-0.25");

  const auto cusp = sweep_parameter(catalog_get("H2.cusp-family"), sq, "a", {-0.25, 0.0, 0.25},
                                    {{"b", 0.0}});
  o.require(cusp.counts == std::vector<int>{1, 1, 3}, "cusp family counts");
  o.require(has(cusp.scans[2], 0.0, -0.25) && has(cusp.scans[2], 0.5, -0.25) &&
                has(cusp.scans[2], -0.5, -0.25),
            "cusp family zeros at a=0.25");

  const auto tr = trace_dislocation_3d(CompiledField(catalog_get("H3.DHt"), {{"t", -0.25}}),
                                       Region::cube(3, -1, 1, 101));
  o.require(tr.curves.size() == 1 && tr.curves[0].closed(), "DH_t: expected one closed curve");
  double dev = 0.0;
  if (!tr.curves.empty())
    for (const auto& v : tr.curves[0].vertices)
      dev = std::max({dev, std::abs(std::hypot(v[0], v[1]) - 0.5), std::abs(v[2])});
  o.require(dev <= kRadiusTol, "DH_t circle deviation " + fmt(dev));
  o.detail = "H_t 2/1/0, cusp family 1/1/3, DH_t circle radius deviation " + fmt(dev);
  return o;
}

// 5 -------------------------------------------------------------------------
Outcome jet_relations_and_strata() {
  Outcome o;
  std::mt19937_64 rng(kMasterSeed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    CauchyData d;
    for (int i = 0; i < 9; ++i) {
      d.psi0.emplace_back(unit(rng), unit(rng));
      d.psi1.emplace_back(unit(rng), unit(rng));
    }
    worst = std::max(worst, helmholtz_jet_violation(helmholtz_series_from_cauchy(d, 6)).violation);
  }
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const FieldDef f = random_helmholtz_field(sample_seed(kMasterSeed, seed), kTerms, 2);
    const std::vector<double> p{3 * unit(rng), 3 * unit(rng)};
    worst = std::max(worst, helmholtz_jet_violation(eval_field_jet(f, p, {}, 3)).violation);
  }
  o.require(worst < kJetRelationTol, "jet relation violation " + fmt(worst));

  int catalog_zeros = 0;
  for (const auto& e : catalog_entries()) {
    if (!e.helmholtz || e.def.dim != 2) continue;
    for (const auto& z : scan_zeros_2d(e.def, Region::cube(2, -1, 1)).points) {
      const auto c = stratum_vs_classifier_crosscheck(e.def, z.location);
      o.require(c.status == Consistency::Consistent,
                e.def.name + " crosscheck " + to_string(c.status));
      ++catalog_zeros;
    }
  }
  o.require(catalog_zeros > 0, "no catalog zeros");

  const auto& mc = monte_carlo_2d();
  auto count = [&](const char* k) {
    const auto it = mc.consistency_counts.find(k);
    return it == mc.consistency_counts.end() ? 0 : it->second;
  };
  const int consistent = count("consistent"), unresolved = count("unresolved"),
            inconsistent = count("inconsistent");
  const double frac = mc.zeros() ? double(consistent) / double(mc.zeros()) : 0.0;
  o.require(inconsistent == 0, std::to_string(inconsistent) + " inconsistent Monte-Carlo zeros");
  o.require(consistent + unresolved == static_cast<int>(mc.zeros()),
            "Monte-Carlo zeros without a verdict");
  o.require(frac >= kMonteCarloConsistentFraction, "consistent fraction " + fmt(frac));
  o.detail = "max relation violation " + fmt(worst) + "; catalog " + std::to_string(catalog_zeros) +
             "/" + std::to_string(catalog_zeros) + " consistent; Monte Carlo " +
             std::to_string(consistent) + "/" + std::to_string(mc.zeros()) + " consistent, " +
             std::to_string(unresolved) + " unresolved";
  return o;
}

// 6 -------------------------------------------------------------------------
Outcome radial_invariance() {
  Outcome o;
  std::mt19937_64 rng(kMasterSeed + 6);
  std::vector<const CatalogEntry*> forms;
  for (const auto& e : catalog_entries())
    if (e.def.dim == 2 && !e.expected_class.empty()) forms.push_back(&e);
  int cases = 0;
  for (int k = 0; k < kRadialPairs; ++k) {
    const auto pair = oracles::random_radial_pair(rng);
    const RadialTransform tau = make_radial(pair.tau_linear, pair.rho);
    for (const auto* e : forms) {
      const auto base = classify_point(e->def, kO2);
      const auto g = classify_point(compose_radial(e->def, tau, pair.sigma), kO2);
      o.require(oracles::same_class(g.cls, base.cls),
                e->def.name + " pair " + std::to_string(k) + ": " + g.cls.label());
      ++cases;
    }
  }
  o.detail = std::to_string(kRadialPairs) + " pairs x " + std::to_string(forms.size()) +
             " planar normal forms = " + std::to_string(cases) + " cases, class preserved";
  return o;
}

// 7 -------------------------------------------------------------------------
Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(kMasterSeed + 7);
  const ToleranceSet tol;
  int eligible = 0, elliptic = 0;
  for (int k = 0; k < kFoldJets; ++k) {
    const std::string text = oracles::random_fold_jet(rng);
    const FieldDef def = make_field("jet", 2, false, text);
    const auto r = classify_point(def, kO2, {}, tol);
    if (!r.curvature_product || std::abs(*r.curvature_product) <= kCurvatureMargin * tol.curv)
      continue;
    ++eligible;
    const int want = r.cls.kind == ClassKind::Elliptic ? 1 : r.cls.kind == ClassKind::Hyperbolic ? -1 : 0;
    const int got = oracles::image_side_oracle(CompiledField(def));
    elliptic += want == 1;
    o.require(want != 0 && got == want, text + ": classifier " + r.cls.label() + ", oracle " +
                                            std::to_string(got));
  }
  o.require(eligible > kFoldJets / 2, "only " + std::to_string(eligible) + " eligible jets");
  o.detail = std::to_string(eligible) + "/" + std::to_string(kFoldJets) +
             " jets above the curvature margin (" + std::to_string(elliptic) +
             " elliptic), all match the sampling oracle";
  return o;
}

// 8 -------------------------------------------------------------------------
Outcome series_correctness() {
  Outcome o;
  // stencil self-check against the tabulated 9-point first-derivative weights
  std::vector<double> x;
  for (int i = -4; i <= 4; ++i) x.push_back(i);
  const auto w = oracles::fd_weights(3, x);
  o.require(std::abs(w[1][5] - 0.8) < 1e-14 && std::abs(w[1][8] + 1.0 / 280) < 1e-14,
            "finite-difference weights");

  double worst = 0.0;
  int coefficients = 0;
  for (const auto& e : catalog_entries()) {
    const CompiledField f(e.def);
    const int n = f.arity();
    const std::vector<std::vector<double>> points{std::vector<double>(n, 0.0),
                                                  {0.3, -0.2, 0.1, 0.4}};
    for (auto p : points) {
      p.resize(n);
      const TruncatedSeries jet = f.jet(p, 3);
      for (std::size_t i = 0; i < jet.size(); ++i) {
        const MultiIndex a = jet.exponents(i);
        std::vector<int> alpha(a.begin(), a.begin() + n);
        const Complex exact = jet.derivative_value(a);
        const Complex fd = oracles::fd_partial(
            [&](const std::vector<double>& q) { return f(q); }, p, alpha, kFiniteDifferenceStep);
        const double err = std::abs(exact - fd) / std::max(1.0, std::abs(exact));
        worst = std::max(worst, err);
        o.require(err < kFiniteDifferenceTol, e.def.name + " coefficient " + std::to_string(i) +
                                                  " error " + fmt(err));
        ++coefficients;
      }
    }
  }

  const auto levels = default_levels(12);
  const auto set = trace_equiphase(catalog_get("H2.regular"), Region::cube(2, -1, 1, 201), levels);
  double dev = 0.0;
  o.require(set.polyline_count() == levels.size(), "expected one ray per level");
  for (std::size_t l = 0; l < levels.size(); ++l)
    for (const auto& line : set.polylines[l])
      for (const auto& p : line) {
        if (std::hypot(p[0], p[1]) > 0.5) continue;
        const double along = p[0] * std::cos(levels[l]) + p[1] * std::sin(levels[l]);
        const double off = std::abs(p[0] * std::sin(levels[l]) - p[1] * std::cos(levels[l]));
        dev = std::max(dev, along > 0 ? off : std::hypot(p[0], p[1]));
      }
  o.require(dev < kRayDeviation, "ray deviation " + fmt(dev));
  o.detail = std::to_string(coefficients) + " jet coefficients, max relative error vs finite "
             "differences " + fmt(worst) + "; ray deviation " + fmt(dev);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance gate"};
  int only = 0;
  app.add_option("--only", only, "run one criterion")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"catalog label soundness", catalog_labels},
      {"Helmholtz realizations", helmholtz_realizations},
      {"elliptic obstruction", elliptic_obstruction},
      {"bifurcation counts", bifurcation_counts},
      {"jet relations and strata", jet_relations_and_strata},
      {"radial invariance", radial_invariance},
      {"oracle equivalence", oracle_equivalence},
      {"series correctness", series_correctness}};
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), secs);
    for (const auto& f : o.failures) std::printf("       %s\n", f.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
