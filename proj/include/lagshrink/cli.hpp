#pragma once

// Command-line front end. `run` is the whole program minus main(), so tests
// can drive it in-process.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "al_curve.hpp"
#include "core_geometry.hpp"
#include "embeddedness.hpp"
#include "error.hpp"
#include "flow_sim.hpp"
#include "io.hpp"
#include "product_torus.hpp"

namespace lagshrink::cli {

enum ExitCode : int { kSuccess = 0, kVerificationFailure = 1, kUsageError = 2, kNumericError = 3 };

inline int exit_code(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::NotAShrinker:
  case ErrorKind::DegenerateRadius: return kVerificationFailure;
  case ErrorKind::InputDomain:
  case ErrorKind::NoSolution:
  case ErrorKind::Format: return kUsageError;
  case ErrorKind::NonConvergence:
  case ErrorKind::NumericFailure:
  case ErrorKind::SymmetryNotFound: return kNumericError;
  }
  return kNumericError;
}

struct Options {
  std::string out = ".";
  std::optional<double> tol;
  int json_indent = 2;
  unsigned threads = 1;

  int p = 0, q = 0;
  std::size_t n = 2048;
  double r0_min = 0.05, r0_max = 0.999;
  std::size_t count = 64;
  std::string curve1, curve2, torus, curve;
  std::vector<std::size_t> grid{256, 256};
  std::string scheme = "rescaled";
  double T = 0.1, dt = 1e-5;
  std::size_t sample_every = 1000;
  std::size_t resample = 0;
  std::vector<double> nu;
  std::string projection = "drop";
  double viewpoint = 4.0;
  double closure = kClosureThreshold;
};

namespace detail {

inline std::filesystem::path out_path(const Options &o, const std::string &name) {
  return std::filesystem::path(o.out) / name;
}

inline void emit_json(const Options &o, const std::string &name, const io::json &j) {
  io::write_text(out_path(o, name), io::dump(j, o.json_indent));
}

inline ShrinkerCurve load_curve(const std::string &path) { return io::curve_from_json(io::parse_json(io::read_text(path))); }

inline GridSize grid_of(const Options &o) {
  require(o.grid.size() == 2, ErrorKind::InputDomain, "--grid takes two values ns,nt");
  return {o.grid[0], o.grid[1]};
}

/// Torus from --torus, or from --curve1/--curve2 with --grid.
inline io::TorusFile load_torus(const Options &o) {
  if (!o.torus.empty()) return io::torus_from_json(io::parse_json(io::read_text(o.torus)));
  require(!o.curve1.empty() && !o.curve2.empty(), ErrorKind::InputDomain,
          "give --torus FILE or both --curve1 and --curve2");
  return {load_curve(o.curve1), load_curve(o.curve2), grid_of(o)};
}

inline ProductTorus build(const io::TorusFile &f, const Options &o) {
  return build_torus(f.curve1, f.curve2, f.grid, o.threads, o.closure);
}

inline std::string curve_stem(const ShrinkerCurve &c) {
  if (c.is_circle()) return "circle";
  return "al_" + std::to_string(c.p) + "_" + std::to_string(c.q);
}

inline void write_curve(const Options &o, const ShrinkerCurve &c, std::ostream &out) {
  const std::string stem = curve_stem(c);
  emit_json(o, stem + ".json", io::curve_to_json(c));
  io::write_text(out_path(o, stem + ".csv"), io::curve_csv(c));
  out << "c_gamma " << io::fmt(c.c_gamma) << "\n"
      << "r_min " << io::fmt(c.r_min) << "\n"
      << "r_max " << io::fmt(c.r_max) << "\n"
      << "closure_error " << io::fmt(c.closure_error) << "\n"
      << "wrote " << out_path(o, stem + ".json").string() << "\n";
}

// ---------------------------------------------------------------------------
// Commands

inline int solve_curve_cmd(const Options &o, std::ostream &out) {
  require(o.n >= 8, ErrorKind::InputDomain, "--n must be at least 8");
  SolveOptions so;
  so.samples = o.n;
  write_curve(o, solve_curve(o.p, o.q, o.tol.value_or(1e-11), so), out);
  return kSuccess;
}

inline int make_circle_cmd(const Options &o, std::ostream &out) {
  require(o.n >= 8, ErrorKind::InputDomain, "--n must be at least 8");
  write_curve(o, make_circle(o.n), out);
  return kSuccess;
}

inline int sweep_cmd(const Options &o, std::ostream &out) {
  require(0.0 < o.r0_min && o.r0_min < o.r0_max && o.r0_max < 1.0, ErrorKind::InputDomain,
          "sweep range must satisfy 0 < r0-min < r0-max < 1");
  require(o.count >= 2, ErrorKind::InputDomain, "--count must be at least 2");
  std::vector<io::SweepRow> rows(o.count);
  parallel_for(o.count, o.threads, [&](std::size_t i) {
    const double r0 = o.r0_min + (o.r0_max - o.r0_min) * static_cast<double>(i) / static_cast<double>(o.count - 1);
    rows[i] = {r0, delta_theta(r0), c_gamma_from_r0(r0)};
  });
  io::write_text(out_path(o, "sweep_deltatheta.csv"), io::sweep_csv(rows));
  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i) monotone = monotone && rows[i].delta_theta > rows[i - 1].delta_theta;
  out << "delta_theta " << io::fmt(rows.front().delta_theta) << " .. " << io::fmt(rows.back().delta_theta)
      << (monotone ? " (strictly increasing)" : " (NOT monotone)") << "\n";
  return monotone ? kSuccess : kVerificationFailure;
}

inline int build_torus_cmd(const Options &o, std::ostream &out) {
  io::TorusFile f = load_torus(o);
  if (o.torus.empty()) f.grid = grid_of(o);
  const ProductTorus t = build(f, o);
  emit_json(o, "torus.json", io::torus_to_json(f));
  out << "torus " << t.ns() << " x " << t.nt() << " written to " << out_path(o, "torus.json").string() << "\n";
  return kSuccess;
}

inline int verify_torus_cmd(const Options &o, std::ostream &out) {
  const ProductTorus t = build(load_torus(o), o);
  ReportOptions ro;
  ro.threads = o.threads;
  if (o.tol) ro.shrinker_tol = *o.tol;
  const VerificationReport rep = full_report(t, ro);
  emit_json(o, "report.json", io::report_to_json(rep));
  for (const auto &e : rep.entries)
    if (!e.pass) out << "FAIL " << e.name << " " << io::fmt(e.max_residual) << " > " << io::fmt(e.tol) << "\n";
  out << (rep.pass() ? "all checks pass" : "verification failed") << "\n";
  return rep.pass() ? kSuccess : kVerificationFailure;
}

inline int classify_cmd(const Options &o, std::ostream &out) {
  const ProductTorus t = build(load_torus(o), o);
  const Classification c = classify_torus(t, o.tol.value_or(1e-6), o.threads);
  io::json j;
  j["classification"] = to_string(c.kind);
  j["shrinker_residual"] = c.shrinker_residual;
  for (const auto &[key, f] : {std::pair{"factor1", &c.factor1}, std::pair{"factor2", &c.factor2}})
    j[key] = io::json{{"p", f->p}, {"q", f->q}, {"c_gamma", f->c_gamma}, {"crossings", f->crossings}};
  emit_json(o, "classification.json", j);
  out << to_string(c.kind) << "\n";
  return kSuccess;
}

inline int check_embedded_cmd(const Options &o, std::ostream &out) {
  require(!o.curve.empty(), ErrorKind::InputDomain, "--curve FILE is required");
  const auto records = curve_self_intersections(load_curve(o.curve));
  emit_json(o, "intersections.json", io::intersections_to_json(records));
  out << "crossings " << transversal_count(records) << (records.empty() ? " (embedded)" : "") << "\n";
  return kSuccess;
}

inline int flow_cmd(const Options &o, std::ostream &out) {
  require(!o.curve.empty(), ErrorKind::InputDomain, "--curve FILE is required");
  require(o.scheme == "csf" || o.scheme == "rescaled", ErrorKind::InputDomain, "--scheme must be csf or rescaled");
  const ShrinkerCurve c = load_curve(o.curve);
  const std::vector<Vec2> start = o.resample ? resample_curve(c, o.resample) : c.polyline();
  const FlowScheme scheme = o.scheme == "csf" ? FlowScheme::Csf : FlowScheme::Rescaled;
  EvolveOptions eo;
  eo.dt = o.dt;
  eo.sample_every = o.sample_every;
  const EvolveResult r = evolve(FlowState{start, 0.0}, o.T, scheme, eo);
  io::write_text(out_path(o, "flow_timeseries.csv"), io::time_series_csv(r.series));
  emit_json(o, "flow_final.json", io::curve_to_json(io::polyline_curve(r.state.polyline, c.p), r.state.tau));
  const double drift = shape_drift(r.state.polyline, reparametrize(start));
  io::write_text(out_path(o, "flow_drift.csv"), "tau,drift\n" + io::fmt(r.state.tau) + "," + io::fmt(drift) + "\n");
  out << "steps " << r.steps << " tau " << io::fmt(r.state.tau) << " drift " << io::fmt(drift) << "\n";
  return kSuccess;
}

inline int normalize_cmd(const Options &o, std::ostream &out) {
  require(o.nu.size() == 4, ErrorKind::InputDomain, "--nu takes four components");
  const Hyperplane h = Hyperplane::from_direction(Point4(o.nu[0], o.nu[1], o.nu[2], o.nu[3]));
  const UnitaryMap g = normalize_hyperplane(h);
  const Mat4 J = J_matrix();
  const double commutator = mat4_max_abs_diff(mat4_mul(g.real_form, J), mat4_mul(J, g.real_form));
  const auto image = cmat_apply(g.entries, h.normal().a(), h.normal().b());
  io::json j;
  j["nu"] = io::json(h.normal().x);
  j["G"] = io::cmat_to_json(g.entries);
  j["G_real"] = io::mat4_to_json(g.real_form);
  j["G_nu"] = io::json::array({io::complex_json(image[0]), io::complex_json(image[1])});
  j["commutator_defect"] = commutator;
  emit_json(o, "normalize.json", j);
  out << io::dump(j, o.json_indent);
  const bool ok = commutator <= kUnitaryTolerance && std::abs(image[0] - Complex(1.0, 0.0)) <= kUnitaryTolerance &&
                  std::abs(image[1]) <= kUnitaryTolerance;
  return ok ? kSuccess : kVerificationFailure;
}

inline int export_mesh_cmd(const Options &o, std::ostream &out) {
  require(o.projection == "drop" || o.projection == "perspective", ErrorKind::InputDomain,
          "--projection must be drop or perspective");
  const ProductTorus t = build(load_torus(o), o);
  const auto proj = o.projection == "drop" ? io::Projection::DropX4 : io::Projection::Perspective;
  io::write_text(out_path(o, "torus.obj"), io::torus_obj(t, proj, o.viewpoint));
  out << "wrote " << out_path(o, "torus.obj").string() << " (" << t.points().size() << " vertices)\n";
  return kSuccess;
}

// ---------------------------------------------------------------------------
// Config file: a JSON object whose keys are long option names. Values fill
// options that were not given on the command line.

inline std::string config_value(const io::json &v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (const auto &e : v) s += (s.empty() ? "" : ",") + config_value(e);
    return s;
  }
  return v.dump();
}

inline bool given(const std::vector<std::string> &args, const std::string &flag) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string &a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

} // namespace detail

/// Parses and runs one command. Returns the process exit code.
inline int run(std::vector<std::string> args, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
  Options o;
  CLI::App app{"Abresch-Langer curves and product Lagrangian self-shrinking tori", "lagshrink"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config;
  std::optional<double> tol_flag;
  app.add_option("--out", o.out, "output directory");
  app.add_option("--tol", tol_flag, "primary tolerance of the command")->check(CLI::PositiveNumber);
  app.add_option("--json-indent", o.json_indent, "JSON indentation")->check(CLI::Range(-1, 16));
  app.add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--config", config, "JSON config file (flags override it)");

  auto torus_inputs = [&](CLI::App *c) {
    c->add_option("--torus", o.torus, "torus JSON");
    c->add_option("--curve1", o.curve1, "first factor curve JSON");
    c->add_option("--curve2", o.curve2, "second factor curve JSON");
    c->add_option("--grid", o.grid, "grid ns,nt")->delimiter(',')->expected(2);
    c->add_option("--closure", o.closure, "closure error threshold")->check(CLI::PositiveNumber);
  };

  auto *solve = app.add_subcommand("solve-curve", "shoot for the closed curve with ratio p/q");
  solve->add_option("--p", o.p)->required();
  solve->add_option("--q", o.q)->required();
  solve->add_option("--n", o.n, "samples");
  auto *circle = app.add_subcommand("make-circle", "unit circle in curve format");
  circle->add_option("--n", o.n, "samples");
  auto *sweep = app.add_subcommand("sweep-deltatheta", "tabulate the shooting map");
  sweep->add_option("--r0-min", o.r0_min);
  sweep->add_option("--r0-max", o.r0_max);
  sweep->add_option("--count", o.count);
  auto *build_cmd = app.add_subcommand("build-torus", "product torus from two curves");
  torus_inputs(build_cmd);
  auto *verify = app.add_subcommand("verify-torus", "full verification report");
  torus_inputs(verify);
  auto *classify = app.add_subcommand("classify", "Clifford torus or immersed product");
  torus_inputs(classify);
  auto *embedded = app.add_subcommand("check-embedded", "self-intersections of a curve");
  embedded->add_option("--curve", o.curve)->required();
  auto *flow = app.add_subcommand("flow", "curve-shortening or rescaled flow");
  flow->add_option("--curve", o.curve)->required();
  flow->add_option("--scheme", o.scheme);
  flow->add_option("--T", o.T)->check(CLI::PositiveNumber);
  flow->add_option("--dt", o.dt)->check(CLI::PositiveNumber);
  flow->add_option("--sample-every", o.sample_every)->check(CLI::PositiveNumber);
  flow->add_option("--resample", o.resample, "resample to n points first (0 keeps the input)");
  auto *normalize = app.add_subcommand("normalize-hyperplane", "unitary map taking nu to e1");
  normalize->add_option("--nu", o.nu)->delimiter(',')->expected(4)->required();
  auto *mesh = app.add_subcommand("export-mesh", "OBJ mesh of a torus");
  torus_inputs(mesh);
  mesh->add_option("--projection", o.projection, "drop or perspective");
  mesh->add_option("--viewpoint", o.viewpoint, "x4 of the perspective centre");

  // merge config values for options absent from the command line
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") config = args[i + 1];
  for (const auto &a : args)
    if (a.rfind("--config=", 0) == 0) config = a.substr(9);
  try {
    if (!config.empty()) {
      const io::json cfg = io::parse_json(io::read_text(config));
      if (!cfg.is_object()) fail(ErrorKind::Format, "config must be a JSON object");
      CLI::App *sub = nullptr;
      for (const auto &a : args)
        for (CLI::App *s : app.get_subcommands([](CLI::App *) { return true; }))
          if (!sub && s->get_name() == a) sub = s;
      for (const auto &[key, value] : cfg.items()) {
        const std::string flag = "--" + key;
        const CLI::Option *opt = sub ? sub->get_option_no_throw(flag) : nullptr;
        if (!opt) opt = app.get_option_no_throw(flag);
        if (!opt || key == "config") fail(ErrorKind::Format, "unknown config key \"" + key + "\"");
        if (detail::given(args, flag)) continue;
        args.push_back(flag);
        args.push_back(detail::config_value(value));
      }
    }
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  o.tol = tol_flag;

  try {
    if (*solve) return detail::solve_curve_cmd(o, out);
    if (*circle) return detail::make_circle_cmd(o, out);
    if (*sweep) return detail::sweep_cmd(o, out);
    if (*build_cmd) return detail::build_torus_cmd(o, out);
    if (*verify) return detail::verify_torus_cmd(o, out);
    if (*classify) return detail::classify_cmd(o, out);
    if (*embedded) return detail::check_embedded_cmd(o, out);
    if (*flow) return detail::flow_cmd(o, out);
    if (*normalize) return detail::normalize_cmd(o, out);
    if (*mesh) return detail::export_mesh_cmd(o, out);
  } catch (const Error &e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error &e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

inline int run(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args), out, err);
}

} // namespace lagshrink::cli
