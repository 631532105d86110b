/**
 * @file json_io.hpp
 * @brief JSON serialization of reports. Keys are emitted in a fixed order;
 * non-finite numbers become null.
 */
#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "vortex_atlas/catalog.hpp"
#include "vortex_atlas/classify.hpp"
#include "vortex_atlas/dislocation.hpp"
#include "vortex_atlas/helmholtz.hpp"
#include "vortex_atlas/phasefield.hpp"
#include "vortex_atlas/strata.hpp"

namespace vortex_atlas {

using Json = nlohmann::ordered_json;

namespace detail {

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

inline Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

}  // namespace detail

inline Json to_json(const ParamMap& params) {
  Json j = Json::object();
  for (const auto& [k, v] : params) j[k] = v;
  return j;
}

inline Json to_json(const ToleranceSet& t) {
  return Json{{"zero", t.zero}, {"rank", t.rank},       {"fold", t.fold}, {"curv", t.curv},
              {"contact", t.contact}, {"grad", t.grad}, {"hess", t.hess}};
}

inline Json to_json(const Region& r) {
  Json lo = Json::array(), hi = Json::array(), res = Json::array();
  for (int a = 0; a < r.dim; ++a) {
    lo.push_back(r.lower[a]);
    hi.push_back(r.upper[a]);
    res.push_back(r.resolution[a]);
  }
  return Json{{"dim", r.dim}, {"lower", lo}, {"upper", hi}, {"resolution", res}};
}

inline Json to_json(const FieldDef& def) {
  return Json{{"name", def.name},
              {"dim", def.dim},
              {"time_dependent", def.time_dependent},
              {"expression", def.expression()},
              {"params", to_json(def.params)},
              {"provenance", def.provenance}};
}

inline Json to_json(const CatalogEntry& e) {
  Json j = to_json(e.def);
  j["expected_class"] = e.expected_class.empty() ? Json(nullptr) : Json(e.expected_class);
  j["helmholtz"] = e.helmholtz;
  j["wave"] = e.wave;
  return j;
}

inline Json to_json(const ClassificationReport& r) {
  Json j;
  j["class"] = r.cls.label();
  j["kind"] = to_string(r.cls.kind);
  j["reason"] = r.cls.reason.empty() ? Json(nullptr) : Json(r.cls.reason);
  j["dim"] = r.dim;
  j["basepoint"] = r.basepoint;
  j["value_abs"] = r.value_abs;
  j["jet_norm"] = r.jet_norm;
  j["singular_values"] = r.singular_values;
  j["rank"] = r.rank;
  j["kernel"] = r.kernel;
  j["vlambda"] = detail::optional_json(r.vlambda);
  j["v2lambda"] = detail::optional_json(r.v2lambda);
  j["dlambda"] = r.dlambda;
  j["fold_opening"] = r.fold_opening;
  j["fold_opening_normal"] = detail::optional_json(r.fold_opening_normal);
  j["tangent"] = r.tangent;
  j["normal"] = r.normal;
  j["curvature"] = detail::optional_json(r.curvature);
  j["curvature_product"] = detail::optional_json(r.curvature_product);
  j["contact_order"] = detail::optional_json(r.contact_order);
  j["contact_sign"] = detail::optional_json(r.contact_sign);
  j["cusp_orders"] = r.cusp_orders ? Json(*r.cusp_orders) : Json(nullptr);
  j["restricted_eigenvalues"] = r.restricted_eigenvalues;
  j["notes"] = r.notes;
  j["tolerances"] = to_json(r.tolerances);
  return j;
}

inline Json to_json(const PhaseCriticalReport& r) {
  const char* kind = r.kind == PhaseCriticalKind::Extremum ? "Extremum"
                     : r.kind == PhaseCriticalKind::Saddle ? "Saddle"
                                                           : "DegenerateCritical";
  return Json{{"kind", kind},
              {"gradient", r.gradient},
              {"hessian", r.hessian},
              {"determinant", r.determinant}};
}

inline Json to_json(const DislocationPoint& p) {
  return Json{{"location", p.location},
              {"residual", p.residual},
              {"newton_iters", p.newton_iters},
              {"degenerate", p.degenerate}};
}

inline Json to_json(const ScanResult& s) {
  Json pts = Json::array();
  for (const auto& p : s.points) pts.push_back(to_json(p));
  return Json{{"count", s.points.size()},
              {"points", pts},
              {"tau_zero", s.tau_zero},
              {"tau_merge", s.tau_merge},
              {"warnings", s.warnings}};
}

inline Json to_json(const DislocationCurve& c) {
  return Json{{"status", to_string(c.status)},
              {"vertex_count", c.vertices.size()},
              {"vertices", c.vertices},
              {"max_vertex_residual", c.max_vertex_residual},
              {"max_segment_residual", c.max_segment_residual}};
}

inline Json to_json(const TraceResult& t) {
  Json curves = Json::array();
  for (const auto& c : t.curves) curves.push_back(to_json(c));
  return Json{{"count", t.curves.size()},
              {"curves", curves},
              {"tau_zero", t.tau_zero},
              {"warnings", t.warnings}};
}

inline Json to_json(const SweepResult& s) {
  Json events = Json::array();
  for (const auto& e : s.events)
    events.push_back(Json{{"from", e.from},
                          {"to", e.to},
                          {"count_before", e.count_before},
                          {"count_after", e.count_after}});
  Json sets = Json::array();
  for (const auto& sc : s.scans) sets.push_back(to_json(sc));
  for (const auto& tr : s.traces) sets.push_back(to_json(tr));
  return Json{{"parameter", s.parameter}, {"values", s.values}, {"counts", s.counts},
              {"events", events},         {"zero_sets", sets},  {"warnings", s.warnings}};
}

inline Json to_json(const ResidualReport& r) {
  return Json{{"sup_abs", r.sup_abs},
              {"constant", r.constant},
              {"argmax", r.argmax},
              {"points", r.points},
              {"region", to_json(r.region)}};
}

inline Json to_json(const StratumResiduals& r) {
  return Json{{"a", r.a},   {"bc", r.bc}, {"cross", r.cross}, {"d1", r.d1},
              {"d2", r.d2}, {"bordered1", r.bordered1}, {"bordered2", r.bordered2}};
}

inline Json to_json(const HelmholtzJet3& h) {
  return Json{{"wavenumber", h.wavenumber},
              {"a", detail::complex_json(h.a)},
              {"b", detail::complex_json(h.b)},
              {"c", detail::complex_json(h.c)},
              {"e", detail::complex_json(h.e)},
              {"f", detail::complex_json(h.f)},
              {"h", detail::complex_json(h.h)},
              {"k", detail::complex_json(h.k)}};
}

inline Json to_json(const StratumReport& r) {
  return Json{{"stratum", to_string(r.stratum)},
              {"codimension", r.stratum == StratumId::Unresolved ? Json(nullptr)
                                                                 : Json(codimension(r.stratum))},
              {"residuals", to_json(r.residuals)},
              {"tolerance", r.tolerance},
              {"norm", r.norm},
              {"note", r.note}};
}

inline Json to_json(const ConsistencyReport& r) {
  return Json{{"location", r.location},
              {"stratum", to_json(r.stratum)},
              {"classification", to_json(r.classification)},
              {"status", to_string(r.status)}};
}

inline Json to_json(const PencilResult& p) {
  return Json{{"definite", p.definite},
              {"witness", p.witness ? Json(*p.witness) : Json(nullptr)}};
}

/// Summary only; per-zero rows go to CSV.
inline Json to_json(const MonteCarloResult& r) {
  Json counts = Json::object();
  for (const auto& [k, v] : r.class_counts) counts[k] = v;
  Json strata = Json::object();
  for (const auto& [k, v] : r.stratum_counts) strata[k] = v;
  Json cons = Json::object();
  for (const auto& [k, v] : r.consistency_counts) cons[k] = v;
  return Json{{"master_seed", r.master_seed},
              {"samples", r.samples},
              {"dim", r.dim},
              {"region", to_json(r.region)},
              {"zeros", r.zeros()},
              {"class_counts", counts},
              {"stratum_counts", strata},
              {"consistency_counts", cons},
              {"pencil_definite_count", r.pencil_definite_count},
              {"error_count", r.error_count},
              {"warnings", r.warnings}};
}

inline Json to_json(const PanelResult& p) {
  return Json{{"params", to_json(p.params)},
              {"files", p.files},
              {"zero_count", p.zero_count},
              {"polylines", p.polylines}};
}

}  // namespace vortex_atlas
