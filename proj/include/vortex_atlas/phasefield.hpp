/**
 * @file phasefield.hpp
 * @brief Equi-phase curves by marching squares and panel export (CSV, SVG,
 * JSON manifest).
 */
#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vortex_atlas/dislocation.hpp"
#include "vortex_atlas/errors.hpp"
#include "vortex_atlas/field.hpp"
#include "vortex_atlas/parallel.hpp"

namespace vortex_atlas {

using Polyline = std::vector<std::array<double, 2>>;

struct PhaseOptions {
  double tau_phase = 1e-6;  ///< radians
  int newton_steps = 1;     ///< projection steps per vertex (more only if validation fails)
  int max_newton_steps = 4;
  bool clip_zeros = true;
  int threads = 0;
  ZeroOptions zero;
};

struct PhaseContourSet {
  Region region;
  ParamMap params;
  std::vector<double> levels;
  std::vector<std::vector<Polyline>> polylines;  ///< per level
  std::vector<std::array<double, 2>> zeros;
  double tau_phase = 1e-6;
  double tau_zero = 0.0;
  double clip_radius = 0.0;
  std::vector<std::string> warnings;

  std::size_t polyline_count() const {
    std::size_t n = 0;
    for (const auto& l : polylines) n += l.size();
    return n;
  }
};

/// n equally spaced levels 2 pi j / n in [0, 2 pi).
inline std::vector<double> default_levels(int n = 12) {
  if (n < 1) throw BadParameter("need at least one phase level");
  std::vector<double> out;
  for (int j = 0; j < n; ++j) out.push_back(2.0 * M_PI * j / n);
  return out;
}

namespace detail {

/// Phase of psi relative to theta, in (-pi, pi].
inline double phase_error(Complex psi, double theta) {
  return std::arg(psi * std::polar(1.0, -theta));
}

struct MarchSegment {
  std::array<long, 2> keys;
  std::array<std::array<double, 2>, 2> pts;
};

/// Segments of {Im(e^{-i theta} psi) = 0} with Re > 0 at the midpoint.
/// Node values of exactly zero count as positive.
inline std::vector<MarchSegment> march(const CompiledField& f, const Region& r,
                                       const std::vector<Complex>& grid, double theta) {
  const int nx = r.resolution[0], ny = r.resolution[1];
  const Complex rot = std::polar(1.0, -theta);
  auto g = [&](int i, int j) { return (grid[static_cast<std::size_t>(j) * nx + i] * rot).imag(); };
  auto pos = [&](int i, int j) { return g(i, j) >= 0.0; };
  auto xy = [&](int i, int j) {
    return std::array<double, 2>{r.coordinate(0, i), r.coordinate(1, j)};
  };
  // edge crossing point; orientation canonical (from lower node) so that
  // neighbouring cells produce identical coordinates
  auto cross = [&](int i0, int j0, int i1, int j1) {
    const double a = g(i0, j0), b = g(i1, j1);
    const double t = a / (a - b);
    const auto p = xy(i0, j0), q = xy(i1, j1);
    return std::array<double, 2>{p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])};
  };
  auto hkey = [&](int i, int j) { return 2L * (static_cast<long>(j) * nx + i); };
  auto vkey = [&](int i, int j) { return 2L * (static_cast<long>(j) * nx + i) + 1; };

  std::vector<MarchSegment> segs;
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      // edges: 0 bottom, 1 right, 2 top, 3 left
      const bool s0 = pos(i, j), s1 = pos(i + 1, j), s2 = pos(i + 1, j + 1), s3 = pos(i, j + 1);
      std::array<bool, 4> crossed{s0 != s1, s1 != s2, s3 != s2, s0 != s3};
      const int count = crossed[0] + crossed[1] + crossed[2] + crossed[3];
      if (count == 0) continue;
      std::array<long, 4> key{hkey(i, j), vkey(i + 1, j), hkey(i, j + 1), vkey(i, j)};
      std::array<std::array<double, 2>, 4> pt{};
      if (crossed[0]) pt[0] = cross(i, j, i + 1, j);
      if (crossed[1]) pt[1] = cross(i + 1, j, i + 1, j + 1);
      if (crossed[2]) pt[2] = cross(i, j + 1, i + 1, j + 1);
      if (crossed[3]) pt[3] = cross(i, j, i, j + 1);
      std::vector<std::array<int, 2>> pairs;
      if (count == 2) {
        std::array<int, 2> e{};
        int n = 0;
        for (int k = 0; k < 4; ++k)
          if (crossed[k]) e[n++] = k;
        pairs.push_back(e);
      } else {
        // saddle: decide with the exact centre value
        const std::array<double, 2> c{0.5 * (r.coordinate(0, i) + r.coordinate(0, i + 1)),
                                      0.5 * (r.coordinate(1, j) + r.coordinate(1, j + 1))};
        const bool sc = (f(c) * rot).imag() >= 0.0;
        if (sc == s0) pairs = {{0, 1}, {2, 3}};
        else pairs = {{0, 3}, {1, 2}};
      }
      for (const auto& [a, b] : pairs) {
        const std::array<double, 2> mid{0.5 * (pt[a][0] + pt[b][0]), 0.5 * (pt[a][1] + pt[b][1])};
        if ((f(mid) * rot).real() <= 0.0) continue;
        segs.push_back({{key[a], key[b]}, {pt[a], pt[b]}});
      }
    }
  }
  return segs;
}

/// Chains segments sharing edge keys. Open chains start from the smallest
/// free end key, loops from their smallest key; closed loops repeat the
/// first vertex.
inline std::vector<Polyline> chain(const std::vector<MarchSegment>& segs) {
  std::map<long, std::vector<std::size_t>> at;
  for (std::size_t s = 0; s < segs.size(); ++s)
    for (long k : segs[s].keys) at[k].push_back(s);
  std::vector<bool> used(segs.size(), false);
  std::vector<Polyline> out;
  auto walk = [&](long start) {
    Polyline line;
    long key = start;
    std::size_t s = at[key].front();
    for (std::size_t c : at[key])
      if (!used[c]) {
        s = c;
        break;
      }
    while (!used[s]) {
      used[s] = true;
      const int side = segs[s].keys[0] == key ? 0 : 1;
      if (line.empty()) line.push_back(segs[s].pts[side]);
      line.push_back(segs[s].pts[1 - side]);
      key = segs[s].keys[1 - side];
      for (std::size_t c : at[key])
        if (!used[c]) {
          s = c;
          break;
        }
    }
    out.push_back(std::move(line));
  };
  for (const auto& [k, list] : at)
    if (list.size() == 1 && !used[list[0]]) walk(k);
  for (const auto& [k, list] : at)
    for (std::size_t s : list)
      if (!used[s]) walk(k);
  return out;
}

}  // namespace detail

/// trace_equiphase: level sets {arg psi = theta} as polylines, each vertex
/// projected onto its level set and validated.
inline PhaseContourSet trace_equiphase(const FieldDef& def, const Region& region,
                                       const std::vector<double>& levels,
                                       const ParamMap& params = {},
                                       const PhaseOptions& opt = {}) {
  if (levels.empty()) throw BadParameter("trace_equiphase needs at least one level");
  region.validate();
  if (region.dim != 2 || def.dim != 2)
    throw DimMismatch("equi-phase curves are traced for planar fields");
  const CompiledField f(def, params);
  if (f.arity() != 2)
    throw BadParameter("field '" + def.name + "' is time dependent; give t as a parameter");
  PhaseContourSet out;
  out.region = region;
  out.params = merge_params(def, params);
  out.levels = levels;
  out.tau_phase = opt.tau_phase;
  out.polylines.resize(levels.size());
  out.clip_radius = region.cell_diagonal();

  ZeroOptions zopt = opt.zero;
  zopt.threads = opt.threads;
  const ScanResult scan = scan_zeros_2d(f, region, zopt);
  out.tau_zero = scan.tau_zero;
  for (const auto& p : scan.points) out.zeros.push_back({p.location[0], p.location[1]});
  out.warnings = scan.warnings;

  const int nx = region.resolution[0];
  std::vector<Complex> grid(region.node_count());
  parallel_for(grid.size(), opt.threads, [&](std::size_t idx) {
    const std::array<double, 2> p{region.coordinate(0, static_cast<int>(idx % nx)),
                                  region.coordinate(1, static_cast<int>(idx / nx))};
    grid[idx] = f(p);
  });

  parallel_for(levels.size(), opt.threads, [&](std::size_t li) {
    const double theta = levels[li];
    const Complex rot = std::polar(1.0, -theta);
    const auto lines = detail::chain(detail::march(f, region, grid, theta));
    for (const auto& line : lines) {
      Polyline current;
      auto flush = [&] {
        if (current.size() >= 2) out.polylines[li].push_back(current);
        current.clear();
      };
      for (auto p : line) {
        bool ok = false;
        for (int step = 0; step < opt.max_newton_steps; ++step) {
          try {
            const TruncatedSeries s = f.jet(p, 1);
            const Complex v = s.constant_term() * rot;
            const double gx = (s.coeff({1, 0}) * rot).imag(), gy = (s.coeff({0, 1}) * rot).imag();
            const double gg = gx * gx + gy * gy;
            if (!(gg > 0)) break;
            p = {p[0] - v.imag() * gx / gg, p[1] - v.imag() * gy / gg};
            if (step + 1 < opt.newton_steps) continue;
            const Complex w = f(p);
            ok = std::abs(w) > scan.tau_zero && std::abs(detail::phase_error(w, theta)) < opt.tau_phase &&
                 region.contains(p, 1e-12);
            if (ok) break;
          } catch (const Error&) {
            break;
          }
        }
        if (ok && opt.clip_zeros) {
          for (const auto& z : out.zeros)
            if (std::hypot(p[0] - z[0], p[1] - z[1]) <= out.clip_radius) ok = false;
        }
        if (ok) {
          current.push_back(p);
        } else {
          flush();
        }
      }
      flush();
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// panels

struct PanelSpec {
  FieldDef field;
  std::vector<ParamMap> panels;  ///< one parameter assignment per panel
  std::vector<double> levels = default_levels();
  Region region = Region::cube(2, -1, 1, 201);
  std::string format = "csv";  ///< csv, svg or both
  std::string out_dir = ".";
  PhaseOptions options;
};

struct PanelResult {
  ParamMap params;
  std::vector<std::string> files;
  int zero_count = 0;       ///< 2D zeros, or 3D curves plus isolated points
  std::size_t polylines = 0;
};

inline constexpr std::size_t kMaxPanels = 64;

/// `<field>_<k=v>_<k=v>` with characters outside [A-Za-z0-9._=+-] replaced.
inline std::string panel_stem(const std::string& field, const ParamMap& params) {
  std::string stem = field;
  for (const auto& [k, v] : params) stem += "_" + k + "=" + detail::format_number(v);
  for (char& ch : stem)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '_' || ch == '=' ||
          ch == '+' || ch == '-'))
      ch = '_';
  return stem;
}

namespace detail {

inline std::string g17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_phase_csv(const PhaseContourSet& s, std::ostream& out) {
  out << "level_rad,polyline_id,x,y\n";
  long id = 0;
  for (std::size_t l = 0; l < s.levels.size(); ++l)
    for (const auto& line : s.polylines[l]) {
      for (const auto& p : line)
        out << g17(s.levels[l]) << ',' << id << ',' << g17(p[0]) << ',' << g17(p[1]) << '\n';
      ++id;
    }
  for (const auto& z : s.zeros) out << "nan,-1," << g17(z[0]) << ',' << g17(z[1]) << '\n';
}

inline void write_phase_svg(const PhaseContourSet& s, std::ostream& out) {
  const double size = 600.0;
  const auto& r = s.region;
  const double sx = size / (r.upper[0] - r.lower[0]), sy = size / (r.upper[1] - r.lower[1]);
  auto px = [&](const std::array<double, 2>& p) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f,%.3f", (p[0] - r.lower[0]) * sx, (r.upper[1] - p[1]) * sy);
    return std::string(buf);
  };
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"600\" height=\"600\" "
         "viewBox=\"0 0 600 600\">\n"
      << "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
  for (std::size_t l = 0; l < s.levels.size(); ++l) {
    double hue = std::fmod(s.levels[l], 2.0 * M_PI);
    if (hue < 0) hue += 2.0 * M_PI;
    char color[48];
    std::snprintf(color, sizeof color, "hsl(%.0f,70%%,40%%)", hue * 180.0 / M_PI);
    for (const auto& line : s.polylines[l]) {
      out << "<path fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" d=\"M";
      for (std::size_t i = 0; i < line.size(); ++i) out << (i ? " L" : "") << px(line[i]);
      out << "\"/>\n";
    }
  }
  for (const auto& z : s.zeros) {
    const std::string c = px(z);
    const auto comma = c.find(',');
    out << "<circle cx=\"" << c.substr(0, comma) << "\" cy=\"" << c.substr(comma + 1)
        << "\" r=\"4\" fill=\"black\"/>\n";
  }
  out << "</svg>\n";
}

inline void write_curves_csv(const TraceResult& t, std::ostream& out) {
  out << "level_rad,polyline_id,x,y,z\n";
  for (std::size_t c = 0; c < t.curves.size(); ++c)
    for (const auto& v : t.curves[c].vertices)
      out << "nan," << c << ',' << g17(v[0]) << ',' << g17(v[1]) << ',' << g17(v[2]) << '\n';
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IOError("write failed for '" + path.string() + "'");
}

}  // namespace detail

/// render_panels: one file per panel and format plus `<field>_manifest.json`.
/// 3D fields export their traced dislocation curves as CSV only.
inline std::vector<PanelResult> render_panels(const PanelSpec& spec) {
  if (spec.panels.size() > kMaxPanels)
    throw BadParameter("at most " + std::to_string(kMaxPanels) + " panels");
  if (spec.format != "csv" && spec.format != "svg" && spec.format != "both")
    throw BadParameter("panel format must be csv, svg or both");
  if (spec.field.dim == 3 && spec.format != "csv")
    throw BadParameter("3D panels are exported as CSV only");
  if (spec.region.dim != spec.field.dim) throw DimMismatch("region and field dimensions differ");
  std::vector<PanelResult> results(spec.panels.size());
  if (spec.panels.empty()) return results;
  for (const auto& p : spec.panels) merge_params(spec.field, p);
  std::error_code ec;
  std::filesystem::create_directories(spec.out_dir, ec);
  if (ec) throw IOError("cannot create '" + spec.out_dir + "': " + ec.message());

  std::vector<std::vector<std::pair<std::string, std::string>>> contents(spec.panels.size());
  // parallel across panels; a single panel parallelizes internally instead
  const bool across = spec.panels.size() > 1;
  PhaseOptions popt = spec.options;
  if (across) popt.threads = 1;
  parallel_for(spec.panels.size(), across ? spec.options.threads : 1, [&](std::size_t i) {
    const ParamMap& params = spec.panels[i];
    PanelResult& res = results[i];
    res.params = params;
    const std::string stem = panel_stem(spec.field.name, params);
    if (spec.field.dim == 2) {
      const auto set = trace_equiphase(spec.field, spec.region, spec.levels, params, popt);
      res.zero_count = static_cast<int>(set.zeros.size());
      res.polylines = set.polyline_count();
      if (spec.format != "svg") {
        std::ostringstream s;
        detail::write_phase_csv(set, s);
        contents[i].emplace_back(stem + ".csv", s.str());
      }
      if (spec.format != "csv") {
        std::ostringstream s;
        detail::write_phase_svg(set, s);
        contents[i].emplace_back(stem + ".svg", s.str());
      }
    } else {
      ZeroOptions zopt = popt.zero;
      zopt.threads = popt.threads;
      const CompiledField f(spec.field, params);
      const auto tr = trace_dislocation_3d(f, spec.region, zopt);
      res.zero_count = static_cast<int>(tr.curves.size());
      res.polylines = tr.curves.size();
      std::ostringstream s;
      detail::write_curves_csv(tr, s);
      contents[i].emplace_back(stem + ".csv", s.str());
    }
  });
  nlohmann::ordered_json manifest;
  manifest["field"] = spec.field.name;
  manifest["expression"] = spec.field.expression();
  manifest["dim"] = spec.field.dim;
  manifest["levels_rad"] = spec.levels;
  manifest["region"] = {{"lower", std::vector<double>(spec.region.lower.begin(),
                                                      spec.region.lower.begin() + spec.region.dim)},
                        {"upper", std::vector<double>(spec.region.upper.begin(),
                                                      spec.region.upper.begin() + spec.region.dim)},
                        {"resolution", std::vector<int>(spec.region.resolution.begin(),
                                                        spec.region.resolution.begin() +
                                                            spec.region.dim)}};
  manifest["panels"] = nlohmann::ordered_json::array();
  const std::filesystem::path dir(spec.out_dir);
  for (std::size_t i = 0; i < spec.panels.size(); ++i) {
    for (const auto& [name, text] : contents[i]) {
      detail::write_text(dir / name, text);
      results[i].files.push_back((dir / name).string());
    }
    nlohmann::ordered_json p;
    p["params"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : spec.panels[i]) p["params"][k] = v;
    std::vector<std::string> names;
    for (const auto& c : contents[i]) names.push_back(c.first);
    p["files"] = names;
    p["zero_count"] = results[i].zero_count;
    p["polylines"] = results[i].polylines;
    manifest["panels"].push_back(p);
  }
  detail::write_text(dir / (panel_stem(spec.field.name, {}) + "_manifest.json"),
                     manifest.dump(2) + "\n");
  return results;
}

}  // namespace vortex_atlas
