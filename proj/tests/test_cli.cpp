#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <lagshrink/cli.hpp>

using namespace lagshrink;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

// the real binary, for process exit status
int run_binary(const std::string &args) {
  const int status = std::system((std::string(LAGSHRINK_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class Cli : public ::testing::Test {
protected:
  static fs::path dir;

  static void SetUpTestSuite() {
    dir = fs::temp_directory_path() / ("lagshrink_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    ASSERT_EQ(run({"make-circle", "--n", "256", "--out", dir.string()}).code, 0);
    ASSERT_EQ(run({"solve-curve", "--p", "2", "--q", "3", "--n", "512", "--out", dir.string()}).code, 0);
    // dilate the circle by 1.1: closed, but no longer a shrinker
    io::json c = io::parse_json(io::read_text(dir / "circle.json"));
    for (auto &s : c["samples"]) {
      for (const char *key : {"s", "x", "y"}) s[key] = s[key].get<double>() * 1.1;
      s["k"] = s["k"].get<double>() / 1.1;
    }
    io::write_text(dir / "scaled.json", io::dump(c));
    io::write_text(dir / "truncated.json", io::read_text(dir / "circle.json").substr(0, 200));
  }

  static void TearDownTestSuite() { fs::remove_all(dir); }

  static std::string path(const std::string &name) { return (dir / name).string(); }
};

fs::path Cli::dir;

} // namespace

TEST_F(Cli, SolveCurveWritesFiles) {
  const CliRun r = run({"solve-curve", "--p", "2", "--q", "3", "--n", "256", "--out", path("solve")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "solve" / "al_2_3.json"));
  EXPECT_TRUE(fs::exists(dir / "solve" / "al_2_3.csv"));
  for (const char *key : {"c_gamma", "r_min", "r_max", "closure_error"})
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
  const ShrinkerCurve c = io::curve_from_json(io::parse_json(io::read_text(dir / "solve" / "al_2_3.json")));
  EXPECT_EQ(c.size(), 256u);
}

TEST_F(Cli, InadmissibleRatios) {
  const CliRun a = run({"solve-curve", "--p", "3", "--q", "4", "--out", path("bad")});
  EXPECT_EQ(a.code, 2);
  EXPECT_NE(a.err.find("ratio outside admissible range"), std::string::npos) << a.err;
  const CliRun b = run({"solve-curve", "--p", "1", "--q", "2", "--out", path("bad")});
  EXPECT_EQ(b.code, 2);
  EXPECT_NE(b.err.find("make-circle"), std::string::npos) << b.err;
}

TEST_F(Cli, ArgumentErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"no-such-command"}).code, 2);
  EXPECT_EQ(run({"solve-curve", "--p", "2"}).code, 2);
  EXPECT_EQ(run({"solve-curve", "--p", "two", "--q", "3"}).code, 2);
  EXPECT_EQ(run({"--tol", "-1", "make-circle"}).code, 2);
  EXPECT_EQ(run({"sweep-deltatheta", "--r0-min", "0.9", "--r0-max", "0.5", "--out", path("bad")}).code, 2);
  EXPECT_EQ(run({"verify-torus", "--curve1", path("circle.json"), "--curve2", path("circle.json"), "--grid", "7,7",
                 "--out", path("bad")})
                .code,
            2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, VerifyTorusExitCodes) {
  const CliRun ok = run({"verify-torus", "--curve1", path("circle.json"), "--curve2", path("circle.json"), "--grid",
                      "64,64", "--out", path("v0")});
  EXPECT_EQ(ok.code, 0) << ok.out << ok.err;
  const io::json rep = io::parse_json(io::read_text(dir / "v0" / "report.json"));
  EXPECT_EQ(rep.at("pass"), true);

  const CliRun scaled = run({"verify-torus", "--curve1", path("scaled.json"), "--curve2", path("scaled.json"), "--grid",
                          "64,64", "--out", path("v1")});
  EXPECT_EQ(scaled.code, 1);
  EXPECT_NE(scaled.out.find("FAIL shrinker_residual "), std::string::npos) << scaled.out;
  const io::json bad = io::parse_json(io::read_text(dir / "v1" / "report.json"));
  bool named = false;
  for (const auto &e : bad.at("checks")) named |= e.at("name") == "shrinker_residual" && e.at("pass") == false;
  EXPECT_TRUE(named);

  const CliRun trunc = run({"verify-torus", "--curve1", path("truncated.json"), "--curve2", path("circle.json"), "--out",
                         path("v2")});
  EXPECT_EQ(trunc.code, 2);
  const CliRun missing = run({"verify-torus", "--curve1", path("nope.json"), "--curve2", path("circle.json"), "--out",
                           path("v2")});
  EXPECT_EQ(missing.code, 2);
}

TEST_F(Cli, ProcessExitCodes) {
  EXPECT_EQ(run_binary("make-circle --n 64 --out " + path("bin")), 0);
  EXPECT_EQ(run_binary("solve-curve --p 3 --q 4 --out " + path("bin")), 2);
  EXPECT_EQ(run_binary("verify-torus --curve1 " + path("scaled.json") + " --curve2 " + path("scaled.json") +
                       " --grid 32,32 --out " + path("bin")),
            1);
  EXPECT_EQ(run_binary("verify-torus --curve1 " + path("truncated.json") + " --curve2 " + path("circle.json") +
                       " --out " + path("bin")),
            2);
  // CSF on a circle of radius 0.3 collapses near tau = 0.045
  io::json small = io::parse_json(io::read_text(dir / "circle.json"));
  for (auto &s : small["samples"]) {
    for (const char *key : {"s", "x", "y"}) s[key] = s[key].get<double>() * 0.3;
    s["k"] = s["k"].get<double>() / 0.3;
  }
  io::write_text(dir / "small.json", io::dump(small));
  EXPECT_EQ(run_binary("flow --scheme csf --T 0.1 --dt 1e-5 --sample-every 100000 --resample 64 --curve " +
                       path("small.json") + " --out " + path("bin")),
            3);
}

TEST_F(Cli, BuildAndClassify) {
  EXPECT_EQ(run({"build-torus", "--curve1", path("circle.json"), "--curve2", path("circle.json"), "--grid", "32,32",
                 "--out", path("b")})
                .code,
            0);
  const CliRun c = run({"classify", "--torus", path("b/torus.json"), "--out", path("b")});
  EXPECT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(c.out, "CliffordTorus\n");
  const io::json j = io::parse_json(io::read_text(dir / "b" / "classification.json"));
  EXPECT_EQ(j.at("classification"), "CliffordTorus");

  EXPECT_EQ(run({"build-torus", "--curve1", path("al_2_3.json"), "--curve2", path("circle.json"), "--grid", "32,32",
                 "--out", path("b2")})
                .code,
            0);
  const CliRun i = run({"classify", "--torus", path("b2/torus.json"), "--out", path("b2")});
  EXPECT_EQ(i.out, "ImmersedProductTorus\n");

  const CliRun s = run({"classify", "--curve1", path("scaled.json"), "--curve2", path("circle.json"), "--grid", "32,32",
                     "--out", path("b3")});
  EXPECT_EQ(s.code, 1);
}

TEST_F(Cli, CheckEmbedded) {
  const CliRun a = run({"check-embedded", "--curve", path("al_2_3.json"), "--out", path("e")});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, "crossings 3\n");
  const io::json j = io::parse_json(io::read_text(dir / "e" / "intersections.json"));
  EXPECT_EQ(j.size(), 3u);
  const CliRun b = run({"check-embedded", "--curve", path("circle.json"), "--out", path("e")});
  EXPECT_EQ(b.out, "crossings 0 (embedded)\n");
}

TEST_F(Cli, NormalizeHyperplane) {
  const CliRun r = run({"normalize-hyperplane", "--nu", "0,1,0,0", "--out", path("n")});
  EXPECT_EQ(r.code, 0) << r.err;
  const io::json j = io::parse_json(io::read_text(dir / "n" / "normalize.json"));
  EXPECT_LT(j.at("commutator_defect").get<double>(), 1e-12);
  EXPECT_NEAR(j.at("G_nu")[0][0].get<double>(), 1.0, 1e-12);
  EXPECT_NE(r.out.find("\"G\""), std::string::npos);
  EXPECT_NE(r.out.find("\"G_real\""), std::string::npos);
  EXPECT_EQ(run({"normalize-hyperplane", "--nu", "0,0,0,0", "--out", path("n")}).code, 2);
  EXPECT_EQ(run({"normalize-hyperplane", "--nu", "1,0,0", "--out", path("n")}).code, 2);
}

TEST_F(Cli, SweepIsMonotone) {
  const CliRun r = run({"sweep-deltatheta", "--count", "8", "--out", path("s")});
  EXPECT_EQ(r.code, 0);
  const std::string csv = io::read_text(dir / "s" / "sweep_deltatheta.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "r0,delta_theta,c_gamma");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  double prev_dt = 0.0, prev_c = 0.0;
  int rows = 0;
  while (std::getline(in, line)) {
    double r0, dt, c;
    char comma;
    std::istringstream(line) >> r0 >> comma >> dt >> comma >> c;
    EXPECT_GT(dt, prev_dt);
    EXPECT_GT(c, prev_c);
    prev_dt = dt;
    prev_c = c;
    ++rows;
  }
  EXPECT_EQ(rows, 8);
}

TEST_F(Cli, FlowWritesDrift) {
  const CliRun r = run({"flow", "--scheme", "rescaled", "--T", "0.001", "--dt", "1e-5", "--curve", path("al_2_3.json"),
                     "--out", path("f")});
  EXPECT_EQ(r.code, 0) << r.err;
  const std::string drift = io::read_text(dir / "f" / "flow_drift.csv");
  EXPECT_EQ(drift.substr(0, drift.find('\n')), "tau,drift");
  const double d = std::stod(drift.substr(drift.find(',', drift.find('\n')) + 1));
  EXPECT_LT(d, 5e-3);
  EXPECT_TRUE(fs::exists(dir / "f" / "flow_timeseries.csv"));
  std::optional<double> tau;
  io::curve_from_json(io::parse_json(io::read_text(dir / "f" / "flow_final.json")), &tau);
  ASSERT_TRUE(tau.has_value());
  EXPECT_NEAR(*tau, 0.001, 1e-15);
  EXPECT_EQ(run({"flow", "--scheme", "heat", "--curve", path("al_2_3.json"), "--out", path("f")}).code, 2);
}

TEST_F(Cli, ExportMesh) {
  const CliRun r = run({"export-mesh", "--curve1", path("circle.json"), "--curve2", path("circle.json"), "--grid", "8,8",
                     "--out", path("m")});
  EXPECT_EQ(r.code, 0) << r.err;
  const std::string obj = io::read_text(dir / "m" / "torus.obj");
  EXPECT_NE(obj.find("\nf "), std::string::npos);
  EXPECT_EQ(run({"export-mesh", "--curve1", path("circle.json"), "--curve2", path("circle.json"), "--grid", "8,8",
                 "--projection", "orthographic", "--out", path("m")})
                .code,
            2);
}

TEST_F(Cli, ConfigPrecedence) {
  io::write_text(dir / "cfg.json", R"({"n": 40, "out": ")" + path("cfg_out") + R"("})");
  // config fills --n and --out
  EXPECT_EQ(run({"make-circle", "--config", path("cfg.json")}).code, 0);
  EXPECT_EQ(io::curve_from_json(io::parse_json(io::read_text(dir / "cfg_out" / "circle.json"))).size(), 40u);
  // the flag wins over the config
  EXPECT_EQ(run({"make-circle", "--config", path("cfg.json"), "--n", "24"}).code, 0);
  EXPECT_EQ(io::curve_from_json(io::parse_json(io::read_text(dir / "cfg_out" / "circle.json"))).size(), 24u);
  // defaults apply when neither is given
  io::write_text(dir / "cfg2.json", R"({"out": ")" + path("cfg_out2") + R"("})");
  EXPECT_EQ(run({"make-circle", "--config", path("cfg2.json")}).code, 0);
  EXPECT_EQ(io::curve_from_json(io::parse_json(io::read_text(dir / "cfg_out2" / "circle.json"))).size(), 2048u);
}

TEST_F(Cli, ConfigErrors) {
  io::write_text(dir / "unknown.json", R"({"n": 40, "colour": "blue"})");
  const CliRun u = run({"make-circle", "--config", path("unknown.json")});
  EXPECT_EQ(u.code, 2);
  EXPECT_NE(u.err.find("colour"), std::string::npos);
  io::write_text(dir / "array.json", "[1, 2]");
  EXPECT_EQ(run({"make-circle", "--config", path("array.json")}).code, 2);
  io::write_text(dir / "neg.json", R"({"tol": -1})");
  EXPECT_EQ(run({"make-circle", "--config", path("neg.json")}).code, 2);
  EXPECT_EQ(run({"make-circle", "--config", path("absent.json")}).code, 2);
}

TEST_F(Cli, DeterministicOutput) {
  for (const char *sub : {"d1", "d2"})
    ASSERT_EQ(run({"--threads", "3", "solve-curve", "--p", "3", "--q", "5", "--n", "256", "--out", path(sub)}).code, 0);
  EXPECT_EQ(io::read_text(dir / "d1" / "al_3_5.json"), io::read_text(dir / "d2" / "al_3_5.json"));
  EXPECT_EQ(io::read_text(dir / "d1" / "al_3_5.csv"), io::read_text(dir / "d2" / "al_3_5.csv"));
  // re-emitting a loaded file is byte-identical
  const std::string text = io::read_text(dir / "d1" / "al_3_5.json");
  EXPECT_EQ(io::dump(io::curve_to_json(io::curve_from_json(io::parse_json(text)))), text);
}
