#pragma once

// JSON, CSV and OBJ serialization of curves, tori, reports and flow output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "al_curve.hpp"
#include "core_geometry.hpp"
#include "embeddedness.hpp"
#include "error.hpp"
#include "flow_sim.hpp"
#include "product_torus.hpp"

namespace lagshrink::io {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Files and number formatting

inline std::string read_text(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Format, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path &path, const std::string &text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Format, "cannot write " + path.string());
  out << text;
}

/// 17 significant digits, enough to round-trip any double.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json parse_json(const std::string &text) {
  try {
    return json::parse(text);
  } catch (const json::exception &e) {
    fail(ErrorKind::Format, std::string("malformed JSON: ") + e.what());
  }
}

inline std::string dump(const json &j, int indent = 2) { return j.dump(indent) + "\n"; }

namespace detail {

template <class T> T field(const json &j, const char *key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::Format, std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &) {
    fail(ErrorKind::Format, std::string("field \"") + key + "\" has the wrong type");
  }
}

inline double number(const json &j, const char *key) {
  const json &v = j.contains(key) ? j.at(key) : json();
  if (!v.is_number()) fail(ErrorKind::Format, std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

} // namespace detail

// ---------------------------------------------------------------------------
// Curves

inline json curve_to_json(const ShrinkerCurve &curve, std::optional<double> tau = std::nullopt) {
  json j;
  j["kind"] = "al_curve"; // q = 0 marks the circle, q = -1 a control polyline
  j["p"] = curve.p;
  j["q"] = curve.q;
  j["c_gamma"] = curve.c_gamma;
  j["r0"] = curve.r0;
  j["closure_error"] = curve.closure_error;
  if (tau) j["tau"] = *tau;
  json samples = json::array();
  for (const auto &s : curve.samples)
    samples.push_back(json{{"s", s.s}, {"x", s.x}, {"y", s.y}, {"phi", s.phi}, {"k", s.k}});
  j["samples"] = std::move(samples);
  return j;
}

/// Rebuilds a curve; r, theta and the radius extremes are recomputed.
inline ShrinkerCurve curve_from_json(const json &j, std::optional<double> *tau = nullptr) {
  const auto kind = detail::field<std::string>(j, "kind");
  if (kind != "al_curve")
    fail(ErrorKind::Format, "unexpected curve kind \"" + kind + "\"");
  ShrinkerCurve c;
  c.p = detail::field<int>(j, "p");
  c.q = detail::field<int>(j, "q");
  c.c_gamma = detail::number(j, "c_gamma");
  c.r0 = detail::number(j, "r0");
  c.closure_error = detail::number(j, "closure_error");
  if (tau) *tau = j.contains("tau") ? std::optional<double>(detail::number(j, "tau")) : std::nullopt;
  const json &samples = j.contains("samples") ? j.at("samples") : json();
  if (!samples.is_array() || samples.size() < 9) fail(ErrorKind::Format, "curve needs a samples array (>= 9 entries)");
  std::vector<double> theta;
  for (const json &s : samples) {
    CurveSample cs;
    cs.s = detail::number(s, "s");
    cs.x = detail::number(s, "x");
    cs.y = detail::number(s, "y");
    cs.phi = detail::number(s, "phi");
    cs.k = detail::number(s, "k");
    cs.r = std::hypot(cs.x, cs.y);
    theta.push_back(std::atan2(cs.y, cs.x));
    c.samples.push_back(cs);
  }
  unwrap_angles(theta);
  c.r_min = c.r_max = c.samples.front().r;
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    c.samples[i].theta = theta[i];
    c.r_min = std::min(c.r_min, c.samples[i].r);
    c.r_max = std::max(c.r_max, c.samples[i].r);
  }
  return c;
}

inline std::string curve_csv(const ShrinkerCurve &curve) {
  std::string out = "s,x,y,phi,k,r,theta\n";
  for (const auto &s : curve.samples)
    out += fmt(s.s) + "," + fmt(s.x) + "," + fmt(s.y) + "," + fmt(s.phi) + "," + fmt(s.k) + "," + fmt(s.r) + "," +
           fmt(s.theta) + "\n";
  return out;
}

/// Curve record for a flow snapshot polyline.
inline ShrinkerCurve polyline_curve(const std::vector<Vec2> &pts, int p) {
  return closed_curve_from_points(pts, p);
}

// ---------------------------------------------------------------------------
// Tori and reports

struct TorusFile {
  ShrinkerCurve curve1, curve2;
  GridSize grid;
};

inline json torus_to_json(const TorusFile &t) {
  json j;
  j["kind"] = "product_torus";
  j["curve1"] = curve_to_json(t.curve1);
  j["curve2"] = curve_to_json(t.curve2);
  j["grid"] = json::array({t.grid.ns, t.grid.nt});
  return j;
}

inline TorusFile torus_from_json(const json &j) {
  if (detail::field<std::string>(j, "kind") != "product_torus") fail(ErrorKind::Format, "expected a product_torus");
  TorusFile t;
  for (const char *key : {"curve1", "curve2"})
    if (!j.contains(key)) fail(ErrorKind::Format, std::string("missing field \"") + key + "\"");
  t.curve1 = curve_from_json(j.at("curve1"));
  t.curve2 = curve_from_json(j.at("curve2"));
  const auto grid = detail::field<std::vector<long long>>(j, "grid");
  if (grid.size() != 2 || grid[0] < 0 || grid[1] < 0) fail(ErrorKind::Format, "grid must be [ns, nt]");
  t.grid = {static_cast<std::size_t>(grid[0]), static_cast<std::size_t>(grid[1])};
  return t;
}

inline json report_to_json(const VerificationReport &r) {
  json checks = json::array();
  for (const auto &e : r.entries)
    checks.push_back(json{{"name", e.name},
                          {"max_residual", e.max_residual},
                          {"at", json::array({e.i, e.j})},
                          {"tol", e.tol},
                          {"pass", e.pass}});
  json j;
  j["checks"] = std::move(checks);
  j["pass"] = r.pass();
  return j;
}

inline json intersections_to_json(const std::vector<IntersectionRecord> &records) {
  json j = json::array();
  for (const auto &r : records)
    j.push_back(json{{"i", r.i}, {"j", r.j}, {"x", r.x}, {"y", r.y}, {"transversal", r.transversal}});
  return j;
}

inline json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json cmat_to_json(const CMat2 &m) {
  json j = json::array();
  for (const auto &row : m) j.push_back(json::array({complex_json(row[0]), complex_json(row[1])}));
  return j;
}

inline json mat4_to_json(const Mat4 &m) {
  json j = json::array();
  for (const auto &row : m) j.push_back(json(row));
  return j;
}

// ---------------------------------------------------------------------------
// CSV tables

inline std::string time_series_csv(const std::vector<TimeSample> &series) {
  std::string out = "tau,length,area,isoperimetric,shrinker_residual\n";
  for (const auto &t : series)
    out += fmt(t.tau) + "," + fmt(t.diag.length) + "," + fmt(t.diag.area) + "," + fmt(t.diag.isoperimetric) + "," +
           fmt(t.diag.shrinker_residual) + "\n";
  return out;
}

struct SweepRow {
  double r0, delta_theta, c_gamma;
};

inline std::string sweep_csv(const std::vector<SweepRow> &rows) {
  std::string out = "r0,delta_theta,c_gamma\n";
  for (const auto &r : rows) out += fmt(r.r0) + "," + fmt(r.delta_theta) + "," + fmt(r.c_gamma) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Mesh export

enum class Projection { DropX4, Perspective };

/// R^4 -> R^3: drop x4, or central projection from (0, 0, 0, viewpoint).
inline std::array<double, 3> project(const Point4 &p, Projection proj, double viewpoint) {
  if (proj == Projection::DropX4) return {p[0], p[1], p[2]};
  const double w = viewpoint - p[3];
  if (!(std::abs(w) > 1e-12)) fail(ErrorKind::InputDomain, "perspective viewpoint lies on the surface");
  const double f = viewpoint / w;
  return {p[0] * f, p[1] * f, p[2] * f};
}

/// Grid vertices and periodic quads split into two triangles each (1-based).
inline std::string torus_obj(const ProductTorus &t, Projection proj = Projection::DropX4, double viewpoint = 4.0) {
  std::string out = "# product torus " + std::to_string(t.ns()) + " x " + std::to_string(t.nt()) + "\n";
  for (const Point4 &p : t.points()) {
    const auto v = project(p, proj, viewpoint);
    out += "v " + fmt(v[0]) + " " + fmt(v[1]) + " " + fmt(v[2]) + "\n";
  }
  auto id = [&](std::size_t i, std::size_t j) { return std::to_string((i % t.ns()) * t.nt() + (j % t.nt()) + 1); };
  for (std::size_t i = 0; i < t.ns(); ++i)
    for (std::size_t j = 0; j < t.nt(); ++j) {
      out += "f " + id(i, j) + " " + id(i + 1, j) + " " + id(i + 1, j + 1) + "\n";
      out += "f " + id(i, j) + " " + id(i + 1, j + 1) + " " + id(i, j + 1) + "\n";
    }
  return out;
}

} // namespace lagshrink::io
