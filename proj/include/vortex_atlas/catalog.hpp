/**
 * @file catalog.hpp
 * @brief Built-in table of named example fields.
 */
#pragma once

#include <map>
#include <string>
#include <vector>

#include "vortex_atlas/errors.hpp"
#include "vortex_atlas/field.hpp"

namespace vortex_atlas {

struct CatalogEntry {
  FieldDef def;
  /// Class the classifier should report at the origin (default params), or
  /// empty when the entry is not a normal form.
  std::string expected_class;
  bool helmholtz = false;  ///< solves the Helmholtz equation with k = 1
  bool wave = false;       ///< solves the wave equation with c = 1
};

namespace detail {

inline CatalogEntry entry(std::string name, int dim, bool time, std::string_view text,
                          ParamMap params, std::string provenance, std::string expected = {},
                          bool helmholtz = false, bool wave = false) {
  return CatalogEntry{make_field(std::move(name), dim, time, text, std::move(params),
                                 std::move(provenance)),
                      std::move(expected), helmholtz, wave};
}

inline std::string fold_expression(int m, double sign) {
  return std::string("x^2 ") + (sign < 0 ? "- " : "+ ") + "y^" + std::to_string(m) + " + i*y";
}

inline std::string fold_label(int m, double sign) {
  return "DegenerateFold(" + std::to_string(m) + "," + (sign < 0 ? "-" : "+") + ")";
}

inline std::vector<CatalogEntry> build_catalog() {
  std::vector<CatalogEntry> c;
  const std::string thm21 = "Theorem 2.1", prop22 = "Proposition 2.2", sec2 = "Section 2";
  c.push_back(entry("H2.regular", 2, false, "x + i*y", {}, thm21, "Regular"));
  c.push_back(entry("H2.hyperbolic", 2, false, "x^2 - y^2 + i*y", {}, thm21, "Hyperbolic"));
  c.push_back(entry("H2.elliptic", 2, false, "x^2 + y^2 + i*y", {}, thm21, "Elliptic"));
  c.push_back(entry("H2.Ht", 2, false, "x^2 - y^2 + t + i*y", {{"t", 0.0}}, sec2, "Hyperbolic"));
  c.push_back(entry("H2.Et", 2, false, "x^2 + y^2 + t + i*y", {{"t", 0.0}}, sec2, "Elliptic"));
  // m is structural (an exponent); catalog_instantiate rebuilds the expression
  c.push_back(entry("H2.foldm", 2, false, "x^2 + sign*y^3 + i*y", {{"m", 3.0}, {"sign", -1.0}},
                    prop22, fold_label(3, -1.0)));
  for (int m = 3; m <= 5; ++m) {
    for (double sign : {1.0, -1.0}) {
      c.push_back(entry("H2.fold" + std::to_string(m) + (sign < 0 ? "-" : "+"), 2, false,
                        fold_expression(m, sign), {}, prop22, fold_label(m, sign)));
    }
  }
  c.push_back(entry("H2.cusp-normal", 2, false, "x^3 + x*y + i*(y + a)", {{"a", 0.0}}, sec2,
                    "Cusp"));
  c.push_back(entry("H2.cusp-family", 2, false, "x^3 + x*y + b + i*(y + a)",
                    {{"a", 0.0}, {"b", 0.0}}, sec2, "Cusp"));
  c.push_back(entry("H2.helmholtz-hyperbolic", 2, false, "cos(y) - cos(x) + i*sin(y)", {},
                    "Proposition 3.1", "Hyperbolic", true));
  c.push_back(entry("H2.helmholtz-hyperbolic-wave", 2, true,
                    "(cos(y) - cos(x) + i*sin(y))*cos(t) + cos(y)*sin(t)", {}, "Proposition 3.1",
                    "", false, true));
  c.push_back(entry("H2.helmholtz-cusp", 2, false, "x^3*cos(y) + (x - 3*x*y)*sin(y) + i*sin(y)",
                    {}, "Proposition 3.5", "Cusp", true));
  c.push_back(entry("H2.helmholtz-cusp-wave", 2, true,
                    "(x^3*cos(y) + (x - 3*x*y)*sin(y) + i*sin(y))*cos(t) + i*cos(y)*sin(t)", {},
                    "Proposition 3.5", "", false, true));
  c.push_back(entry("H2.helmholtz-hyperbolic-alt", 2, false, "x^2*cos(y) - y*sin(y) + i*sin(y)",
                    {}, "Remark 3.2", "Hyperbolic", true));

  const std::string thm41 = "Theorem 4.1", sec4 = "Section 4";
  c.push_back(entry("H3.regular", 3, false, "x + i*y", {}, thm41, "Regular"));
  c.push_back(entry("H3.DH", 3, false, "x^2 + y^2 - z^2 + i*z", {}, thm41, "DefiniteHyperbolic"));
  c.push_back(entry("H3.DE", 3, false, "x^2 + y^2 + z^2 + i*z", {}, thm41, "DefiniteElliptic"));
  c.push_back(entry("H3.I", 3, false, "x^2 - y^2 - z^2 + i*z", {}, thm41, "Indefinite"));
  c.push_back(entry("H3.DHt", 3, false, "x^2 + y^2 - z^2 + t + i*z", {{"t", 0.0}}, sec4,
                    "DefiniteHyperbolic"));
  c.push_back(entry("H3.DEt", 3, false, "x^2 + y^2 + z^2 + t + i*z", {{"t", 0.0}}, sec4,
                    "DefiniteElliptic"));
  c.push_back(entry("H3.It", 3, false, "x^2 - y^2 - z^2 + t + i*z", {{"t", 0.0}}, sec4,
                    "Indefinite"));
  c.push_back(entry("H3.cusp", 3, false, "x^3 + x*y + z^2 + i*y", {}, sec4, "SpatialCusp"));
  c.push_back(entry("H3.helmholtz-DHt", 3, true,
                    "(-cos(x) - cos(y) + 2*cos(z) + i*sin(z))*cos(t) + cos(z)*sin(t)", {},
                    "Proposition 4.2", "", false, true));
  c.push_back(entry("H3.helmholtz-It", 3, true,
                    "(-2*cos(x) + cos(y) + cos(z) + i*sin(z))*cos(t) + cos(z)*sin(t)", {},
                    "Proposition 4.2", "", false, true));
  c.push_back(entry("H3.helmholtz-cusp", 3, false,
                    "x^3*cos(y) + (x - 3*x*y)*sin(y) - cos(y) + cos(z) + i*sin(y)", {},
                    "Proposition 4.4", "SpatialCusp", true));
  return c;
}

}  // namespace detail

/// Immutable catalog, ordered by insertion.
inline const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = detail::build_catalog();
  return entries;
}

inline const CatalogEntry& catalog_entry(std::string_view name) {
  for (const auto& e : catalog_entries())
    if (e.def.name == name) return e;
  throw UnknownField("unknown catalog field '" + std::string(name) + "'");
}

inline bool catalog_contains(std::string_view name) {
  for (const auto& e : catalog_entries())
    if (e.def.name == name) return true;
  return false;
}

/// catalog_get: the immutable definition for name.
inline const FieldDef& catalog_get(std::string_view name) { return catalog_entry(name).def; }

/// Applies parameter overrides. Structural parameters (the exponent m of
/// H2.foldm) rebuild the expression; the rest become new defaults.
inline FieldDef catalog_instantiate(std::string_view name, const ParamMap& overrides) {
  FieldDef def = catalog_get(name);
  for (const auto& [k, v] : merge_params(def, overrides)) def.params[k] = v;
  if (def.name == "H2.foldm") {
    const double mv = def.params.at("m");
    const int m = static_cast<int>(std::lround(mv));
    if (m < 2 || m > 9 || std::abs(mv - m) > 1e-12)
      throw BadParameter("H2.foldm needs an integer m in 2..9");
    def.expr = parse_field("x^2 + sign*y^" + std::to_string(m) + " + i*y");
  }
  return def;
}

}  // namespace vortex_atlas
