/**
 * @file cli.hpp
 * @brief The vortex-atlas command line. `run_cli` parses arguments, runs
 * one subcommand and returns the process exit code.
 *
 * Exit codes: 0 ok, 2 usage or unknown name, 3 degenerate zero under
 * --strict, 4 failed precondition, 5 numeric failure.
 */
#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vortex_atlas/json_io.hpp"

namespace vortex_atlas::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kStrictDegenerate = 3, kPrecondition = 4, kNumeric = 5 };

inline const char* error_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Shape: return "ShapeError";
    case ErrorKind::DivisionNearZero: return "DivisionNearZero";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::Eval: return "EvalError";
    case ErrorKind::UnknownField: return "UnknownField";
    case ErrorKind::NearSingularMatrix: return "NearSingularMatrix";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::InsufficientOrder: return "InsufficientOrder";
    case ErrorKind::NotOnDislocation: return "NotOnDislocation";
    case ErrorKind::AllOrdersVanish: return "AllOrdersVanish";
    case ErrorKind::NotCritical: return "NotCritical";
    case ErrorKind::OnDislocation: return "OnDislocation";
    case ErrorKind::NotTimeDependent: return "NotTimeDependent";
    case ErrorKind::BadParameter: return "BadParameter";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::NotHelmholtzJet: return "NotHelmholtzJet";
    case ErrorKind::IO: return "IOError";
  }
  return "Error";
}

inline int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Syntax:
    case ErrorKind::UnknownField:
    case ErrorKind::BadParameter:
      return kUsage;
    case ErrorKind::DivisionNearZero:
    case ErrorKind::NonFinite:
    case ErrorKind::Eval:
    case ErrorKind::NearSingularMatrix:
    case ErrorKind::SingularJacobian:
    case ErrorKind::NoConvergence:
    case ErrorKind::AllOrdersVanish:
      return kNumeric;
    default:
      return kPrecondition;
  }
}

/// Every flag, with defaults. Zero resolution means the per-command default.
struct RunConfig {
  std::string command;
  std::string action;  ///< catalog: list or show
  std::string name;    ///< catalog show
  std::string field;
  std::vector<std::string> params;
  int dim = 0;
  std::string region;
  int res = 0;
  std::string point;
  bool auto_scan = false;
  bool strict = false;
  bool json = false;
  ToleranceSet tol;
  int order = kDefaultOrder;
  std::uint64_t seed = 0;
  int n = 100;
  int terms = 8;
  double k = 1.0;
  std::optional<double> helmholtz;
  std::optional<double> wave;
  std::string times = "0,0.5,1,1.5,2";
  std::string values;
  std::vector<std::string> panels;
  int levels = 12;
  std::string format = "csv";
  std::string out;
  std::string config;
  int threads = 0;
};

inline Json to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  if (c.command == "catalog") {
    j["action"] = c.action;
    j["name"] = c.name;
  }
  j["field"] = c.field;
  j["param"] = c.params;
  j["dim"] = c.dim;
  j["region"] = c.region;
  j["res"] = c.res;
  j["point"] = c.point;
  j["auto"] = c.auto_scan;
  j["strict"] = c.strict;
  j["tolerances"] = vortex_atlas::to_json(c.tol);
  j["order"] = c.order;
  j["seed"] = c.seed;
  j["n"] = c.n;
  j["terms"] = c.terms;
  j["k"] = c.k;
  j["helmholtz"] = c.helmholtz ? Json(*c.helmholtz) : Json(nullptr);
  j["wave"] = c.wave ? Json(*c.wave) : Json(nullptr);
  j["times"] = c.times;
  j["values"] = c.values;
  j["panel"] = c.panels;
  j["levels"] = c.levels;
  j["format"] = c.format;
  j["out"] = c.out;
  j["config"] = c.config;
  j["threads"] = c.threads;
  return j;
}

namespace detail {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw UsageError("empty entry in " + what);
    try {
      out.push_back(parse_double(item, what));
    } catch (const Error&) {
      throw UsageError("bad number '" + item + "' in " + what);
    }
  }
  return out;
}

/// Assignments (k=v) and bare names from the --param flags.
struct ParamFlags {
  ParamMap assign;
  std::vector<std::string> bare;
};

inline ParamFlags split_params(const std::vector<std::string>& flags) {
  ParamFlags out;
  for (const auto& f : flags) {
    if (f.find('=') == std::string::npos) {
      out.bare.push_back(trim(f));
      continue;
    }
    for (const auto& [k, v] : parse_param_list(f)) out.assign[k] = v;
  }
  return out;
}

/// --field accepts a catalog name, @file or an expression in x, y[, z][, t];
/// free identifiers of an expression must be assigned with --param.
inline FieldDef resolve_field(const std::string& src, const ParamMap& assign, int dim) {
  if (src.empty()) throw UsageError("--field is required");
  if (src.front() == '@') return read_field_file(src.substr(1));
  if (catalog_contains(src)) return catalog_instantiate(src, assign);
  if (src.rfind("H2.", 0) == 0 || src.rfind("H3.", 0) == 0)
    throw UnknownField("unknown catalog field '" + src + "'");
  const Expr e = parse_field(src);
  const auto vars = collect_symbols(e, NodeKind::Variable);
  if (dim == 0) dim = vars.count("z") ? 3 : 2;
  ParamMap declared;
  for (const auto& p : collect_symbols(e, NodeKind::Parameter)) {
    const auto it = assign.find(p);
    if (it == assign.end())
      throw BadParameter("expression parameter '" + p + "' needs a value (--param " + p + "=...)");
    declared[p] = it->second;
  }
  FieldDef def{"expr", dim, vars.count("t") > 0, e, declared, "command line"};
  validate(def);
  return def;
}

inline Region resolve_region(const std::string& text, int dim, int res, double lo = -1.0,
                             double hi = 1.0) {
  Region r = Region::cube(dim, lo, hi, res);
  if (!text.empty()) {
    const auto v = parse_list(text, "--region");
    if (v.size() == 2) {
      r = Region::cube(dim, v[0], v[1], res);
    } else if (static_cast<int>(v.size()) == 2 * dim) {
      for (int a = 0; a < dim; ++a) {
        r.lower[a] = v[2 * a];
        r.upper[a] = v[2 * a + 1];
      }
    } else {
      throw UsageError("--region takes lo,hi or " + std::to_string(2 * dim) + " bounds");
    }
  }
  try {
    r.validate();
  } catch (const Error& e) {
    throw UsageError(std::string("--region: ") + e.what());
  }
  return r;
}

inline std::vector<double> resolve_point(const std::string& text, int dim) {
  const auto p = parse_list(text, "--point");
  if (static_cast<int>(p.size()) != dim)
    throw UsageError("--point needs " + std::to_string(dim) + " coordinates");
  return p;
}

struct Output {
  std::string text;
  int code = kOk;
  bool json = true;
};

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline Json envelope(const RunConfig& cfg, const FieldDef* def = nullptr) {
  Json j;
  j["command"] = cfg.command;
  j["config"] = to_json(cfg);
  if (def) j["field"] = vortex_atlas::to_json(*def);
  return j;
}

// ---------------------------------------------------------------------------
// commands

inline Output cmd_catalog(const RunConfig& cfg) {
  Output out;
  if (cfg.action == "list") {
    if (cfg.json) {
      Json j = envelope(cfg);
      j["count"] = catalog_entries().size();
      j["entries"] = Json::array();
      for (const auto& e : catalog_entries()) j["entries"].push_back(vortex_atlas::to_json(e));
      out.text = dump(j);
    } else {
      out.json = false;
      for (const auto& e : catalog_entries())
        out.text += e.def.name + "\t" + e.def.expression() + "\t" + e.def.provenance + "\n";
    }
    return out;
  }
  if (cfg.action == "show") {
    if (cfg.name.empty()) throw UsageError("catalog show needs a field name");
    const CatalogEntry& e = catalog_entry(cfg.name);
    if (cfg.json) {
      Json j = envelope(cfg);
      j["entry"] = vortex_atlas::to_json(e);
      out.text = dump(j);
    } else {
      out.json = false;
      std::ostringstream s;
      s << "name: " << e.def.name << "\n"
        << "expression: " << e.def.expression() << "\n"
        << "dim: " << e.def.dim << (e.def.time_dependent ? " (time dependent)" : "") << "\n"
        << "params: " << format_param_list(e.def.params) << "\n"
        << "provenance: " << e.def.provenance << "\n";
      if (!e.expected_class.empty()) s << "class: " << e.expected_class << "\n";
      out.text = s.str();
    }
    return out;
  }
  throw UsageError("catalog takes 'list' or 'show <name>'");
}

inline Json classify_curve(const FieldDef& def, const ParamMap& params, const DislocationCurve& c,
                           std::size_t index, const ToleranceSet& tol, int order, bool& degenerate) {
  std::map<std::string, int> counts;
  Json special = Json::array();
  std::size_t n = c.vertices.size();
  if (c.closed() && n > 1) --n;  // closing vertex repeats the first
  for (std::size_t v = 0; v < n; ++v) {
    const auto& p = c.vertices[v];
    std::string label;
    try {
      const auto r = classify_point(def, p, params, tol, order);
      label = r.cls.label();
      if (r.cls.kind != ClassKind::Regular) special.push_back(vortex_atlas::to_json(r));
      if (r.cls.kind == ClassKind::Degenerate) degenerate = true;
    } catch (const Error& e) {
      label = std::string("error:") + error_name(e.kind());
    }
    ++counts[label];
  }
  Json cj = Json::object();
  for (const auto& [k, v] : counts) cj[k] = v;
  return Json{{"curve", index},
              {"status", to_string(c.status)},
              {"vertices", n},
              {"class_counts", cj},
              {"non_regular", special}};
}

inline Output cmd_classify(const RunConfig& cfg) {
  const auto pf = split_params(cfg.params);
  const FieldDef def = resolve_field(cfg.field, pf.assign, cfg.dim);
  if (cfg.point.empty() == !cfg.auto_scan)
    throw UsageError("classify needs exactly one of --point or --auto");
  Json j = envelope(cfg, &def);
  j["reports"] = Json::array();
  bool degenerate = false;
  if (!cfg.point.empty()) {
    const auto p = resolve_point(cfg.point, def.dim);
    const auto r = classify_point(def, p, pf.assign, cfg.tol, cfg.order);
    degenerate = r.cls.kind == ClassKind::Degenerate;
    j["reports"].push_back(vortex_atlas::to_json(r));
  } else {
    const Region region = resolve_region(cfg.region, def.dim, cfg.res ? cfg.res : 101);
    ZeroOptions zopt;
    zopt.threads = cfg.threads;
    const CompiledField f(def, pf.assign);
    if (def.dim == 2) {
      const auto scan = scan_zeros_2d(f, region, zopt);
      j["warnings"] = scan.warnings;
      for (const auto& z : scan.points) {
        const auto r = classify_point(def, z.location, pf.assign, cfg.tol, cfg.order);
        degenerate = degenerate || r.cls.kind == ClassKind::Degenerate;
        j["reports"].push_back(vortex_atlas::to_json(r));
      }
    } else {
      const auto tr = trace_dislocation_3d(f, region, zopt);
      j["warnings"] = tr.warnings;
      j["curves"] = Json::array();
      for (std::size_t c = 0; c < tr.curves.size(); ++c) {
        const auto& curve = tr.curves[c];
        if (curve.status == CurveStatus::IsolatedPoint) {
          const auto r = classify_point(def, curve.vertices.front(), pf.assign, cfg.tol, cfg.order);
          degenerate = degenerate || r.cls.kind == ClassKind::Degenerate;
          j["reports"].push_back(vortex_atlas::to_json(r));
        } else {
          j["curves"].push_back(
              classify_curve(def, pf.assign, curve, c, cfg.tol, cfg.order, degenerate));
        }
      }
    }
  }
  j["degenerate"] = degenerate;
  Output out{dump(j)};
  if (cfg.strict && degenerate) out.code = kStrictDegenerate;
  return out;
}

inline Output cmd_scan(const RunConfig& cfg) {
  const auto pf = split_params(cfg.params);
  const FieldDef def = resolve_field(cfg.field, pf.assign, cfg.dim);
  if (def.dim != 2) throw DimMismatch("scan locates planar zeros; use trace for spatial fields");
  const Region region = resolve_region(cfg.region, 2, cfg.res ? cfg.res : 101);
  ZeroOptions zopt;
  zopt.threads = cfg.threads;
  Json j = envelope(cfg, &def);
  j["region"] = vortex_atlas::to_json(region);
  j["result"] = vortex_atlas::to_json(scan_zeros_2d(CompiledField(def, pf.assign), region, zopt));
  return {dump(j)};
}

inline Output cmd_trace(const RunConfig& cfg) {
  const auto pf = split_params(cfg.params);
  const FieldDef def = resolve_field(cfg.field, pf.assign, cfg.dim);
  if (def.dim != 3) throw DimMismatch("trace follows spatial curves; use scan for planar fields");
  const Region region = resolve_region(cfg.region, 3, cfg.res ? cfg.res : 101);
  ZeroOptions zopt;
  zopt.threads = cfg.threads;
  Json j = envelope(cfg, &def);
  j["region"] = vortex_atlas::to_json(region);
  j["result"] =
      vortex_atlas::to_json(trace_dislocation_3d(CompiledField(def, pf.assign), region, zopt));
  return {dump(j)};
}

inline Output cmd_sweep(const RunConfig& cfg) {
  const auto pf = split_params(cfg.params);
  if (pf.bare.size() != 1) throw UsageError("sweep needs one --param <name> to vary");
  if (cfg.values.empty()) throw UsageError("sweep needs --values v1,v2,...");
  const FieldDef def = resolve_field(cfg.field, pf.assign, cfg.dim);
  const auto values = parse_list(cfg.values, "--values");
  const Region region = resolve_region(cfg.region, def.dim, cfg.res ? cfg.res : 101);
  ZeroOptions zopt;
  zopt.threads = cfg.threads;
  Json j = envelope(cfg, &def);
  j["region"] = vortex_atlas::to_json(region);
  j["result"] =
      vortex_atlas::to_json(sweep_parameter(def, region, pf.bare[0], values, pf.assign, zopt));
  return {dump(j)};
}

inline Output cmd_verify(const RunConfig& cfg) {
  if (cfg.helmholtz.has_value() == cfg.wave.has_value())
    throw UsageError("verify needs exactly one of --helmholtz k or --wave c");
  const auto pf = split_params(cfg.params);
  const FieldDef def = resolve_field(cfg.field, pf.assign, cfg.dim);
  const Region region = resolve_region(cfg.region, def.dim, cfg.res ? cfg.res : 101);
  Json j = envelope(cfg, &def);
  ResidualReport rep;
  if (cfg.helmholtz) {
    j["equation"] = "helmholtz";
    rep = helmholtz_residual(def, region, *cfg.helmholtz, pf.assign, cfg.threads);
  } else {
    j["equation"] = "wave";
    rep = wave_residual(def, region, parse_list(cfg.times, "--times"), *cfg.wave, pf.assign,
                        cfg.threads);
  }
  j["result"] = vortex_atlas::to_json(rep);
  return {dump(j)};
}

inline Output cmd_strata(const RunConfig& cfg) {
  const auto pf = split_params(cfg.params);
  const FieldDef def = resolve_field(cfg.field, pf.assign, cfg.dim);
  if (def.dim != 2) throw DimMismatch("strata are defined for planar jets");
  if (cfg.point.empty() == !cfg.auto_scan)
    throw UsageError("strata needs exactly one of --point or --auto");
  std::vector<std::vector<double>> zeros;
  Json j = envelope(cfg, &def);
  if (!cfg.point.empty()) {
    zeros.push_back(resolve_point(cfg.point, 2));
  } else {
    ZeroOptions zopt;
    zopt.threads = cfg.threads;
    const auto scan = scan_zeros_2d(CompiledField(def, pf.assign),
                                    resolve_region(cfg.region, 2, cfg.res ? cfg.res : 101), zopt);
    j["warnings"] = scan.warnings;
    for (const auto& z : scan.points) zeros.push_back(z.location);
  }
  j["wavenumber"] = cfg.k;
  j["reports"] = Json::array();
  for (const auto& z : zeros) {
    const CompiledField f(def, pf.assign);
    const Jet2 jet = jet2_from_series(f.jet(z, kDefaultOrder), {z[0], z[1]});
    const HelmholtzJet3 hj = project_to_helmholtz_jet(jet, cfg.k);
    const auto cc = stratum_vs_classifier_crosscheck(def, z, pf.assign, cfg.k, cfg.tol);
    Json r = vortex_atlas::to_json(cc);
    r["jet"] = vortex_atlas::to_json(hj);
    j["reports"].push_back(r);
  }
  return {dump(j)};
}

inline Output cmd_montecarlo(const RunConfig& cfg) {
  const int dim = cfg.dim ? cfg.dim : 2;
  if (dim != 2 && dim != 3) throw UsageError("--dim must be 2 or 3");
  if (cfg.n < 1) throw UsageError("--n must be at least 1");
  const Region region = resolve_region(cfg.region, dim, cfg.res ? cfg.res : (dim == 2 ? 121 : 25),
                                       -3.0, 3.0);
  MonteCarloOptions opt;
  opt.n_terms = cfg.terms;
  opt.k = cfg.k;
  opt.threads = cfg.threads;
  opt.tol = cfg.tol;
  const auto res = monte_carlo_genericity(cfg.seed, static_cast<std::size_t>(cfg.n), region, opt);
  if (cfg.json) {
    Json j = envelope(cfg);
    j["result"] = vortex_atlas::to_json(res);
    return {dump(j)};
  }
  std::ostringstream s;
  write_monte_carlo_csv(res, s);
  return {s.str(), kOk, false};
}

inline Output cmd_render(const RunConfig& cfg) {
  const auto pf = split_params(cfg.params);
  const FieldDef def = resolve_field(cfg.field, pf.assign, cfg.dim);
  PanelSpec spec;
  spec.field = def;
  spec.levels = default_levels(cfg.levels);
  spec.region = resolve_region(cfg.region, def.dim, cfg.res ? cfg.res : (def.dim == 2 ? 201 : 41));
  spec.format = cfg.format;
  spec.out_dir = cfg.out.empty() ? "." : cfg.out;
  spec.options.threads = cfg.threads;
  if (pf.bare.size() > 1) throw UsageError("render varies at most one --param <name>");
  if (!pf.bare.empty() && !cfg.panels.empty())
    throw UsageError("use either --param <name> --values or --panel, not both");
  if (!pf.bare.empty()) {
    if (cfg.values.empty()) throw UsageError("--param " + pf.bare[0] + " needs --values");
    for (double v : parse_list(cfg.values, "--values")) {
      ParamMap p = pf.assign;
      p[pf.bare[0]] = v;
      spec.panels.push_back(p);
    }
  } else if (!cfg.panels.empty()) {
    for (const auto& text : cfg.panels) {
      ParamMap p = pf.assign;
      for (const auto& [k, v] : parse_param_list(text)) p[k] = v;
      spec.panels.push_back(p);
    }
  } else {
    spec.panels.push_back(pf.assign);
  }
  const auto results = render_panels(spec);
  Json j = envelope(cfg, &def);
  j["panels"] = Json::array();
  for (const auto& r : results) j["panels"].push_back(vortex_atlas::to_json(r));
  return {dump(j)};
}

inline Output dispatch(const RunConfig& cfg) {
  if (cfg.command == "catalog") return cmd_catalog(cfg);
  if (cfg.command == "classify") return cmd_classify(cfg);
  if (cfg.command == "scan") return cmd_scan(cfg);
  if (cfg.command == "trace") return cmd_trace(cfg);
  if (cfg.command == "sweep") return cmd_sweep(cfg);
  if (cfg.command == "verify") return cmd_verify(cfg);
  if (cfg.command == "strata") return cmd_strata(cfg);
  if (cfg.command == "montecarlo") return cmd_montecarlo(cfg);
  if (cfg.command == "render") return cmd_render(cfg);
  throw UsageError("unknown command '" + cfg.command + "'");
}

inline void write_output(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  // render uses --out as its directory
  if (cfg.out.empty() || cfg.command == "render") {
    out << text;
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) throw IOError("cannot write '" + cfg.out + "'");
  file << text;
  if (!file) throw IOError("write failed for '" + cfg.out + "'");
}

}  // namespace detail

inline const std::pair<const char*, const char*> kCommands[] = {
    {"catalog", "list catalog fields or show one"},
    {"classify", "classify the zero at --point, or every zero with --auto"},
    {"scan", "locate isolated zeros of a planar field"},
    {"trace", "trace dislocation curves of a spatial field"},
    {"sweep", "count zeros as one parameter varies"},
    {"verify", "Helmholtz or wave equation residuals"},
    {"strata", "stratum membership of planar zeros"},
    {"montecarlo", "classify zeros of random Helmholtz fields"},
    {"render", "equi-phase line panels"},
};

/// Comma lists arrive split from config files; join them back.
inline void list_option(CLI::Option* opt) {
  opt->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::Join);
}

/// Runs one command. args excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Phase singularities of complex scalar wave fields", "vortex-atlas"};
  app.set_config("--config", "", "flat key = value file; keys are long flag names");
  app.require_subcommand(1, 1);

  app.add_option("--field", cfg.field, "catalog name, expression in x,y[,z][,t], or @file");
  app.add_option("--param", cfg.params, "k=v assignment, or a bare name to vary (sweep, render)")
      ->take_all()
      ->allow_extra_args(false);
  app.add_option("--dim", cfg.dim, "dimension of an expression field or Monte-Carlo sample")
      ->check(CLI::IsMember({0, 2, 3}));
  list_option(app.add_option("--region", cfg.region, "lo,hi or x0,x1,y0,y1[,z0,z1]"));
  app.add_option("--res", cfg.res, "grid points per axis")->check(CLI::Range(2, 100000));
  list_option(app.add_option("--point", cfg.point, "x,y[,z]"));
  app.add_flag("--auto", cfg.auto_scan, "scan for zeros and process each");
  app.add_flag("--strict", cfg.strict, "exit 3 if any zero is degenerate");
  app.add_flag("--json", cfg.json, "JSON instead of text or CSV");
  app.add_option("--tol-zero", cfg.tol.zero)->check(CLI::PositiveNumber);
  app.add_option("--tol-rank", cfg.tol.rank)->check(CLI::PositiveNumber);
  app.add_option("--tol-fold", cfg.tol.fold)->check(CLI::PositiveNumber);
  app.add_option("--tol-curv", cfg.tol.curv)->check(CLI::PositiveNumber);
  app.add_option("--tol-contact", cfg.tol.contact)->check(CLI::PositiveNumber);
  app.add_option("--tol-grad", cfg.tol.grad)->check(CLI::PositiveNumber);
  app.add_option("--tol-hess", cfg.tol.hess)->check(CLI::PositiveNumber);
  app.add_option("--order", cfg.order, "jet order")->check(CLI::Range(3, kMaxOrder));
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--n", cfg.n, "Monte-Carlo samples");
  app.add_option("--terms", cfg.terms, "plane waves per random field")->check(CLI::Range(3, 1000));
  app.add_option("--k", cfg.k, "wavenumber")->check(CLI::PositiveNumber);
  app.add_option("--helmholtz", cfg.helmholtz, "verify: Helmholtz residual with wavenumber k")
      ->check(CLI::PositiveNumber);
  app.add_option("--wave", cfg.wave, "verify: wave residual with speed c")
      ->check(CLI::PositiveNumber);
  list_option(app.add_option("--times", cfg.times, "verify --wave: sample times"));
  list_option(app.add_option("--values", cfg.values, "v1,v2,... for the varied parameter"));
  app.add_option("--panel", cfg.panels, "render: one panel's assignments, e.g. a=0.25,b=0")
      ->take_all()
      ->allow_extra_args(false);
  app.add_option("--levels", cfg.levels, "render: phase levels")->check(CLI::Range(1, 360));
  app.add_option("--format", cfg.format, "render: csv, svg or both")
      ->check(CLI::IsMember({"csv", "svg", "both"}));
  app.add_option("--out", cfg.out, "output file (render: directory)");
  app.add_option("--threads", cfg.threads, "worker cap (default VORTEX_ATLAS_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  for (const auto& [name, help] : kCommands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    if (std::string(name) == "catalog") {
      sub->add_option("action", cfg.action, "list or show")->required();
      sub->add_option("name", cfg.name, "catalog field name");
    }
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: usage: " << e.what() << "\n";
    return kUsage;
  }
  for (const auto* sub : app.get_subcommands()) cfg.command = sub->get_name();

  try {
    const detail::Output o = detail::dispatch(cfg);
    detail::write_output(cfg, o.text, out);
    if (!o.json) err << "# config: " << to_json(cfg).dump() << "\n";
    return o.code;
  } catch (const detail::UsageError& e) {
    err << "error: usage: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << error_name(e.kind()) << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumeric;
  }
}

}  // namespace vortex_atlas::cli
