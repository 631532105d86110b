/**
 * @file field.hpp
 * @brief Field definitions, compiled evaluation (values and jets), field
 * files and radial composition.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "vortex_atlas/errors.hpp"
#include "vortex_atlas/expr.hpp"
#include "vortex_atlas/taylor.hpp"

namespace vortex_atlas {

using ParamMap = std::map<std::string, double>;

struct FieldDef {
  std::string name;
  int dim = 2;
  bool time_dependent = false;
  Expr expr;
  ParamMap params;
  std::string provenance;

  int arity() const { return dim + (time_dependent ? 1 : 0); }
  std::string expression() const { return to_string(expr); }
};

/// Checks variables against dim/time dependence and parameters against the
/// declared set. Throws BadParameter.
inline void validate(const FieldDef& def) {
  if (def.dim != 2 && def.dim != 3) throw BadParameter("field dimension must be 2 or 3");
  if (!def.expr) throw BadParameter("field '" + def.name + "' has no expression");
  for (const auto& v : collect_symbols(def.expr, NodeKind::Variable)) {
    if (v == "z" && def.dim < 3)
      throw BadParameter("variable z used in planar field '" + def.name + "'");
    if (v == "t" && !def.time_dependent && !def.params.count("t"))
      throw BadParameter("variable t used in field '" + def.name +
                         "' that is neither time dependent nor declares parameter t");
  }
  for (const auto& p : collect_symbols(def.expr, NodeKind::Parameter)) {
    if (!def.params.count(p))
      throw BadParameter("undeclared parameter '" + p + "' in field '" + def.name + "'");
  }
}

inline FieldDef make_field(std::string name, int dim, bool time_dependent,
                           std::string_view expression, ParamMap params = {},
                           std::string provenance = {}) {
  FieldDef def{std::move(name), dim, time_dependent, parse_field(expression), std::move(params),
               std::move(provenance)};
  validate(def);
  return def;
}

/// A time-dependent field with t fixed; t becomes a parameter.
inline FieldDef freeze_time(const FieldDef& def, double t) {
  FieldDef out = def;
  out.time_dependent = false;
  out.params["t"] = t;
  return out;
}

inline ParamMap merge_params(const FieldDef& def, const ParamMap& overrides) {
  ParamMap merged = def.params;
  for (const auto& [k, v] : overrides) {
    if (!def.params.count(k) && !(k == "t" && def.time_dependent))
      throw BadParameter("field '" + def.name + "' has no parameter '" + k + "'");
    merged[k] = v;
  }
  return merged;
}

/// Postfix program for one (field, parameter set). Immutable after
/// construction and safe to share across threads.
class CompiledField {
 public:
  CompiledField(const FieldDef& def, const ParamMap& overrides = {}) : dim_(def.dim) {
    validate(def);
    const ParamMap params = merge_params(def, overrides);
    time_variable_ = def.time_dependent && !overrides.count("t");
    variables_ = {"x", "y"};
    if (def.dim == 3) variables_.push_back("z");
    if (time_variable_) variables_.push_back("t");
    emit(*def.expr, params);
  }

  int dim() const { return dim_; }
  int arity() const { return static_cast<int>(variables_.size()); }
  bool has_time_variable() const { return time_variable_; }

  Complex operator()(std::span<const double> point) const {
    check_arity(point.size());
    const Complex v = run_values(point);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw EvalError("non-finite field value");
    return v;
  }

  /// Taylor expansion about point, truncated at order.
  TruncatedSeries jet(std::span<const double> point, int order) const {
    check_arity(point.size());
    if (order < 0 || order > kMaxOrder) throw BadParameter("jet order must be in 0..10");
    try {
      return run_series(point, order);
    } catch (const DivisionNearZero& e) {
      throw EvalError(std::string("division by zero in jet: ") + e.what());
    } catch (const NonFinite& e) {
      throw EvalError(std::string("non-finite jet: ") + e.what());
    }
  }

 private:
  enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Re, Im };
  struct Instr {
    Op op;
    int arg = 0;
    Complex value{};
  };

  void check_arity(std::size_t n) const {
    if (static_cast<int>(n) != arity())
      throw BadParameter("point has " + std::to_string(n) + " coordinates, field expects " +
                         std::to_string(arity()));
  }

  void emit(const Node& n, const ParamMap& params) {
    switch (n.kind) {
      case NodeKind::Number: code_.push_back({Op::Const, 0, Complex(n.number, 0.0)}); return;
      case NodeKind::ImaginaryUnit: code_.push_back({Op::Const, 0, Complex(0.0, 1.0)}); return;
      case NodeKind::Variable:
      case NodeKind::Parameter: {
        auto it = std::find(variables_.begin(), variables_.end(), n.name);
        if (it != variables_.end()) {
          code_.push_back({Op::Var, static_cast<int>(it - variables_.begin())});
          return;
        }
        auto p = params.find(n.name);
        if (p == params.end()) throw EvalError("unbound symbol '" + n.name + "'");
        code_.push_back({Op::Const, 0, Complex(p->second, 0.0)});
        return;
      }
      case NodeKind::Neg: emit(*n.args[0], params); code_.push_back({Op::Neg}); return;
      case NodeKind::Pow:
        emit(*n.args[0], params);
        code_.push_back({Op::Pow, n.exponent});
        return;
      case NodeKind::Call: {
        emit(*n.args[0], params);
        static constexpr std::array<Op, 5> ops = {Op::Sin, Op::Cos, Op::Exp, Op::Re, Op::Im};
        code_.push_back({ops[static_cast<int>(n.function)]});
        return;
      }
      default: break;
    }
    emit(*n.args[0], params);
    emit(*n.args[1], params);
    switch (n.kind) {
      case NodeKind::Add: code_.push_back({Op::Add}); break;
      case NodeKind::Sub: code_.push_back({Op::Sub}); break;
      case NodeKind::Mul: code_.push_back({Op::Mul}); break;
      case NodeKind::Div: code_.push_back({Op::Div}); break;
      default: throw EvalError("malformed expression node");
    }
  }

  static Complex ipow(Complex base, int e) {
    Complex r(1.0, 0.0);
    while (e > 0) {
      if (e & 1) r *= base;
      e >>= 1;
      if (e) base *= base;
    }
    return r;
  }

  Complex run_values(std::span<const double> point) const {
    std::vector<Complex> st;
    st.reserve(16);
    for (const Instr& in : code_) {
      switch (in.op) {
        case Op::Const: st.push_back(in.value); break;
        case Op::Var: st.emplace_back(point[in.arg], 0.0); break;
        case Op::Neg: st.back() = -st.back(); break;
        case Op::Pow: st.back() = ipow(st.back(), in.arg); break;
        case Op::Sin: st.back() = std::sin(st.back()); break;
        case Op::Cos: st.back() = std::cos(st.back()); break;
        case Op::Exp: st.back() = std::exp(st.back()); break;
        case Op::Re: st.back() = Complex(st.back().real(), 0.0); break;
        case Op::Im: st.back() = Complex(st.back().imag(), 0.0); break;
        default: {
          const Complex b = st.back();
          st.pop_back();
          Complex& a = st.back();
          if (in.op == Op::Add) a += b;
          else if (in.op == Op::Sub) a -= b;
          else if (in.op == Op::Mul) a *= b;
          else {
            if (b == Complex(0.0, 0.0)) throw EvalError("division by zero");
            a /= b;
          }
        }
      }
    }
    return st.back();
  }

  TruncatedSeries run_series(std::span<const double> point, int order) const {
    const int n = arity();
    std::vector<TruncatedSeries> seeds;
    for (int v = 0; v < n; ++v) seeds.push_back(TruncatedSeries::variable(v, point[v], n, order));
    std::vector<TruncatedSeries> st;
    st.reserve(16);
    for (const Instr& in : code_) {
      switch (in.op) {
        case Op::Const: st.push_back(TruncatedSeries::constant(n, order, in.value)); break;
        case Op::Var: st.push_back(seeds[in.arg]); break;
        case Op::Neg: st.back() = -st.back(); break;
        case Op::Pow: st.back() = pow(st.back(), in.arg); break;
        case Op::Sin: st.back() = sin(st.back()); break;
        case Op::Cos: st.back() = cos(st.back()); break;
        case Op::Exp: st.back() = exp(st.back()); break;
        case Op::Re: st.back() = real_part(st.back()).cast<Complex>(); break;
        case Op::Im: st.back() = imag_part(st.back()).cast<Complex>(); break;
        default: {
          TruncatedSeries b = std::move(st.back());
          st.pop_back();
          TruncatedSeries& a = st.back();
          if (in.op == Op::Add) a += b;
          else if (in.op == Op::Sub) a -= b;
          else if (in.op == Op::Mul) a = a * b;
          else a = a / b;
        }
      }
    }
    return st.back();
  }

  int dim_;
  bool time_variable_ = false;
  std::vector<std::string> variables_;
  std::vector<Instr> code_;
};

/// eval_field: value of the field at a point.
inline Complex eval_field(const FieldDef& def, std::span<const double> point,
                          const ParamMap& params = {}) {
  return CompiledField(def, params)(point);
}

/// eval_field_jet: truncated Taylor expansion about point.
inline TruncatedSeries eval_field_jet(const FieldDef& def, std::span<const double> point,
                                      const ParamMap& params = {}, int order = kDefaultOrder) {
  return CompiledField(def, params).jet(point, order);
}

// ---------------------------------------------------------------------------
// field files: `name; dim; time_flag; params; expression`

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (trim(s.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw BadParameter("cannot parse " + what + " '" + s + "'");
}

/// "a=0.25, b=0" -> {a: 0.25, b: 0}
inline ParamMap parse_param_list(std::string_view text) {
  ParamMap out;
  std::string item;
  std::stringstream ss{std::string(text)};
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw BadParameter("parameter '" + item + "' lacks '='");
    out[trim(item.substr(0, eq))] = parse_double(trim(item.substr(eq + 1)), "parameter value");
  }
  return out;
}

inline std::string format_param_list(const ParamMap& params) {
  std::string out;
  for (const auto& [k, v] : params) {
    if (!out.empty()) out += ", ";
    out += k + "=" + detail::format_number(v);
  }
  return out;
}

inline FieldDef parse_field_text(std::string_view text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (int i = 0; i < 4; ++i) {
    const auto semi = text.find(';', start);
    if (semi == std::string_view::npos)
      throw BadParameter("field file needs 5 ';'-separated fields");
    parts.push_back(trim(text.substr(start, semi - start)));
    start = semi + 1;
  }
  parts.push_back(trim(text.substr(start)));
  const int dim = static_cast<int>(parse_double(parts[1], "dimension"));
  const std::string& tf = parts[2];
  bool time_dependent = false;
  if (tf == "1" || tf == "true" || tf == "time") time_dependent = true;
  else if (tf != "0" && tf != "false" && tf != "static")
    throw BadParameter("time flag must be 0/1/true/false, got '" + tf + "'");
  return make_field(parts[0], dim, time_dependent, parts[4], parse_param_list(parts[3]),
                    "field file");
}

inline std::string format_field_text(const FieldDef& def) {
  return def.name + "; " + std::to_string(def.dim) + "; " + (def.time_dependent ? "1" : "0") +
         "; " + format_param_list(def.params) + "; " + def.expression() + "\n";
}

inline FieldDef read_field_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open field file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_field_text(buf.str());
}

inline void write_field_file(const FieldDef& def, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IOError("cannot write field file '" + path + "'");
  out << format_field_text(def);
}

// ---------------------------------------------------------------------------
// radial composition

/// tau(u, w) = rho(u, w) * (a u + b w, c u + d w), rho given as an
/// expression in the symbols u and w.
struct RadialTransform {
  std::array<double, 4> linear{1.0, 0.0, 0.0, 1.0};
  Expr rho = expr::number(1.0);

  double det() const { return linear[0] * linear[3] - linear[1] * linear[2]; }
};

inline RadialTransform make_radial(std::array<double, 4> linear, std::string_view rho) {
  return RadialTransform{linear, parse_field(rho)};
}

inline void validate(const RadialTransform& t) {
  if (!(std::abs(t.det()) > 1e-9)) throw BadParameter("radial linear part is singular");
  for (const auto& p : collect_symbols(t.rho, NodeKind::Parameter))
    if (p != "u" && p != "w") throw BadParameter("radial profile uses symbol '" + p + "'");
  if (!collect_symbols(t.rho, NodeKind::Variable).empty())
    throw BadParameter("radial profile must depend on u and w only");
  FieldDef probe{"rho", 2, false, t.rho, {{"u", 0.0}, {"w", 0.0}}, {}};
  const std::array<double, 2> origin{0.0, 0.0};
  const Complex r0 = CompiledField(probe)(origin);
  if (!(r0.real() >= 1e-6) || std::abs(r0.imag()) > 1e-12)
    throw BadParameter("radial profile must be real and positive at the origin");
}

/// compose_radial: the field p -> tau(psi(S p)) with S given row-major
/// (dim x dim).
inline FieldDef compose_radial(const FieldDef& def, const RadialTransform& tau,
                               std::span<const double> linear_change) {
  validate(tau);
  const int n = def.dim;
  if (static_cast<int>(linear_change.size()) != n * n)
    throw DimMismatch("linear change must be " + std::to_string(n) + "x" + std::to_string(n));
  double det = 0.0;
  const auto& s = linear_change;
  if (n == 2) {
    det = s[0] * s[3] - s[1] * s[2];
  } else {
    det = s[0] * (s[4] * s[8] - s[5] * s[7]) - s[1] * (s[3] * s[8] - s[5] * s[6]) +
          s[2] * (s[3] * s[7] - s[4] * s[6]);
  }
  if (!(std::abs(det) > 1e-9)) throw NearSingularMatrix("source change of variables is singular");

  static const std::array<const char*, 3> names = {"x", "y", "z"};
  std::map<std::string, Expr> source;
  for (int r = 0; r < n; ++r) {
    Expr row;
    for (int c = 0; c < n; ++c) {
      const double coef = s[r * n + c];
      if (coef == 0.0) continue;
      Expr term = coef == 1.0 ? expr::symbol(names[c])
                              : expr::mul(expr::number(coef), expr::symbol(names[c]));
      row = row ? expr::add(row, term) : term;
    }
    source[names[r]] = row ? row : expr::number(0.0);
  }
  const Expr inner = substitute(def.expr, source);
  const Expr u = expr::call(Function::Re, inner);
  const Expr w = expr::call(Function::Im, inner);
  const auto& L = tau.linear;
  auto combo = [](double a, const Expr& p, double b, const Expr& q) {
    return expr::add(expr::mul(expr::number(a), p), expr::mul(expr::number(b), q));
  };
  const Expr rho = substitute(tau.rho, {{"u", u}, {"w", w}});
  const Expr value = expr::mul(
      rho, expr::add(combo(L[0], u, L[1], w), expr::mul(expr::imag_unit(), combo(L[2], u, L[3], w))));
  FieldDef out = def;
  out.name = "radial(" + def.name + ")";
  out.expr = value;
  out.provenance = def.provenance.empty() ? "radial composition"
                                          : def.provenance + "; radial composition";
  return out;
}

}  // namespace vortex_atlas
