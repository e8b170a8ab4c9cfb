#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "curvflow/cli.hpp"
#include "curvflow/errors.hpp"

using namespace curvflow;
namespace fs = std::filesystem;

namespace {

std::string base_config(const std::string& dir) {
  return "n = 2\nk = 1\nphi.kind = power\nphi.p = 3\ng.kind = constant\nf.kind = constant\nf.base = 1\n"
         "vartheta = 2\ngrid.resolution = 48\ncontrol.tol_residual = 1e-8\noutput.stride = 200\noutput.dir = " +
         dir + "\n";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("curvflow_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config text round trip") {
  RunConfig c = parse_config_text(base_config("somewhere") +
                                  "initial.kind = harmonic-perturbation\ninitial.base = 1.1\ninitial.terms = 0.05*x1, "
                                  "-0.02*x1^2*x2\ninitial.noise = 0.01\nseed = 42\noutput.formats = csv, json\n");
  CHECK(c.initial.kind == InitialSpec::Kind::harmonic_perturbation);
  CHECK(c.initial.terms.size() == 2);
  CHECK(c.seed == 42);
  CHECK(parse_config_text(serialize_config(c)) == c);
  CHECK(serialize_config(parse_config_text(serialize_config(c))) == serialize_config(c));

  RunConfig s = parse_config_text(
      "n = 3\nk = 2\nphi.kind = power\nphi.p = 4\ng.kind = radial_power\ng.q = 2.5\nf.kind = constant\n"
      "f.base = 1\nvartheta = 3\ngrid.resolution = 16x32\ncontrol.dt_max = 0.01\n");
  CHECK(s.resolution.nlat == 16);
  CHECK(s.resolution.nlon == 32);
  CHECK(parse_config_text(serialize_config(s)) == s);
}

TEST_CASE("malformed configs name the field") {
  CHECK_THROWS_AS(parse_config_text("n = 2\nk = 1\n"), ParseError);
  try {
    parse_config_text(base_config("x") + "control.dt_max = fast\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.field() == "control.dt_max");
  }
  CHECK_THROWS_AS(parse_config_text(base_config("x") + "bogus.key = 1\n"), ParseError);
  CHECK_THROWS_AS(parse_config_text(base_config("x") + "n = 3\n"), ParseError);
  CHECK_THROWS_AS(parse_config_text(base_config("x") + "just some words\n"), ParseError);
}

TEST_CASE("seeded noise is reproducible and seed dependent") {
  RunConfig c = parse_config_text(base_config("x") + "initial.noise = 0.02\nseed = 5\n");
  const auto g = sphere::build_grid(2, c.resolution);
  const auto a = make_initial(c, g), b = make_initial(c, g);
  c.seed = 6;
  const auto d = make_initial(c, g);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    differs = differs || a[i] != d[i];
  }
  CHECK(differs);
}

TEST_CASE("check exit codes") {
  std::ostringstream out;
  CHECK(cli::cmd_check(parse_config_text(base_config("x")), out) == cli::kOk);

  std::string low = base_config("x");
  low.replace(low.find("phi.p = 3"), 9, "phi.p = 1.5");
  std::ostringstream out2;
  CHECK(cli::cmd_check(parse_config_text(low), out2) == cli::kFailed);
  CHECK(out2.str().find("mu out of [-vartheta,-1]") != std::string::npos);
}

TEST_CASE("run exit codes and outputs") {
  const fs::path dir = scratch("stationary");
  std::ostringstream out;
  CHECK(cli::cmd_run(parse_config_text(base_config(dir.string())), false, out) == cli::kOk);
  CHECK(out.str().find("after 0 steps") != std::string::npos);
  for (const char* f : {"trajectory.csv", "verdicts.txt", "summary.json", "final.snapshot"}) CHECK(fs::exists(dir / f));
  std::ostringstream rep;
  CHECK(cli::cmd_report(dir.string(), rep) == cli::kOk);

  const fs::path pdir = scratch("perturbed");
  std::ostringstream pout;
  CHECK(cli::cmd_run(parse_config_text(base_config(pdir.string()) +
                                       "initial.kind = harmonic-perturbation\ninitial.terms = 0.05*x1\n"),
                     false, pout) == cli::kOk);
  CHECK(slurp(pdir / "summary.json").find("\"converged\": true") != std::string::npos);

  const fs::path ndir = scratch("nonconvex");
  std::ostringstream nout;
  CHECK(cli::cmd_run(parse_config_text(base_config(ndir.string()) +
                                       "initial.kind = harmonic-perturbation\ninitial.terms = 2*x1^2\n"),
                     false, nout) == cli::kDegenerate);

  std::string gated = base_config(scratch("gated").string());
  gated.replace(gated.find("phi.p = 3"), 9, "phi.p = 2");
  std::ostringstream gout;
  CHECK(cli::cmd_run(parse_config_text(gated), false, gout) == cli::kFailed);
  CHECK(cli::cmd_report(scratch("missing").string(), gout) == cli::kBadInput);
}

TEST_CASE("verify selectors") {
  std::ostringstream out;
  CHECK(cli::cmd_verify("symfun", 1, out) == cli::kOk);
  CHECK(out.str().find("newton_maclaurin") != std::string::npos);
  std::ostringstream out2;
  CHECK(cli::cmd_verify("sphere", 1, out2) == cli::kOk);
  CHECK(out2.str().find("convergence_order") != std::string::npos);
  CHECK(cli::cmd_verify("nothing", 1, out2) == cli::kBadInput);
}

TEST_CASE("overrides") {
  const fs::path dir = scratch("override");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "c.conf");
    f << base_config("elsewhere");
  }
  cli::Overrides o;
  o.stride = 7;
  o.out_dir = dir.string();
  o.seed = 9;
  const RunConfig c = cli::load_with_overrides((dir / "c.conf").string(), o);
  CHECK(c.output.stride == 7);
  CHECK(c.output.dir == dir.string());
  CHECK(c.seed == 9);
  o.stride = 0;
  CHECK_THROWS_AS(cli::load_with_overrides((dir / "c.conf").string(), o), ParseError);
}

}  // TEST_SUITE
