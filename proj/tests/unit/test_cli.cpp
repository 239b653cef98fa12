#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "spaceform/power_series.hpp"

using namespace spaceform;
using namespace spaceform::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("spaceform_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json report(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

int run_text(const std::string& command, const std::string& text, const fs::path& out) {
  Config cfg = Config::parse(text);
  RunOptions o;
  o.out_dir = out;
  return run_guarded(command, cfg, o);
}

int run_tool(const std::string& args) {
  const int status = std::system((std::string(SPACEFORM_TOOL) + " " + args + " 2>/dev/null").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config values, quoting and resolution") {
  Config c = Config::parse(R"ini([run]
n = 3
c = -1
# comment
[metric]
potential = "-log(1 - abs2(z1))"
beta = 0.5, 1, 2
[loop.a]
coord = 2
center = 0.1 + 0.2*i
)ini");
  CHECK(c.integer("run.n") == 3);
  CHECK(c.number("run.c") == -1.0);
  CHECK(c.text("metric.potential") == "-log(1 - abs2(z1))");
  CHECK(c.numbers("metric.beta") == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(c.integer("loop.a.coord") == 2);
  CHECK(c.point("loop.a.center", 1)[0] == cplx(0.1, 0.2));
  CHECK(c.number("verify.tolerance", 1e-5) == 1e-5);
  CHECK_FALSE(c.has("verify.tolerance"));

  const auto r = c.resolved();
  CHECK(r["run"]["n"] == 3);
  CHECK(r["verify"]["tolerance"] == 1e-5);
  CHECK(r["loop.a"]["coord"] == 2);

  CHECK_THROWS_AS(c.number("run.missing"), ConfigError);
  CHECK_THROWS_AS(c.integer("loop.a.center"), ConfigError);
  CHECK_THROWS_AS(c.positive("run.c"), ConfigError);
  CHECK_THROWS_AS(c.point("loop.a.center", 2), ConfigError);
  CHECK_THROWS_AS(Config::parse("[run\nn = 2\n"), ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/spaceform.ini"), ConfigError);
  CHECK(split_list("a, (1, 2), b") == std::vector<std::string>{"a", "(1, 2)", "b"});
}

TEST_CASE("verify-space-form") {
  const fs::path out = scratch_dir("verify");
  CHECK(run_text("verify-space-form", "[run]\nc = -4\n[metric]\ncatalog = bergman\n", out) == exit_pass);
  auto j = report(out / "verify-space-form.json");
  CHECK(j["pass"] == true);
  CHECK(j["max_residual"].get<double>() <= 1e-5);
  CHECK(j["calibration_sign"] == 1);
  CHECK(j["version"] == tool_version());
  CHECK(j["config"]["metric"]["catalog"] == "bergman");
  CHECK(j["config"]["verify"]["samples"] == 100);

  CHECK(run_text("verify-space-form", "[run]\nc = -4\n[metric]\ncatalog = flat\n", out) == exit_check_failure);
  j = report(out / "verify-space-form.json");
  CHECK(j["pass"] == false);
  CHECK(std::abs(j["best_fit_c"].get<double>()) < 1e-9);

  CHECK(run_text("verify-space-form", "[run]\nc = 0\n[metric]\npotential = \"abs2(z1) + (\"\n", out) == exit_error);
  CHECK(run_text("verify-space-form", "[run]\nc = 0\n[metric]\npotential = \"z1 + abs2(z2)\"\n", out) == exit_error);
  CHECK(run_text("verify-space-form", "[metric]\npotential = \"abs2(z1)\"\n", out) == exit_error);
  CHECK(run_text("verify-space-form", "[metric]\ncatalog = nope\n", out) == exit_error);
  CHECK(run_text("verify-space-form", "[metric]\ncatalog = flat\n[verify]\ntolerance = -1\n", out) == exit_error);
}

TEST_CASE("reports are byte-identical for identical config and seed") {
  const fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
  const std::string cfg = "[run]\nc = -4\nseed = 3\n[metric]\ncatalog = bergman\n"
                          "[puncture]\nkind = ball\nradius = 0.2\n"
                          "[develop]\nsamples = 40\ninner = 0.3\nouter = 0.7\n";
  CHECK(run_text("develop", cfg, a) == exit_pass);
  CHECK(run_text("develop", cfg, b) == exit_pass);
  CHECK(slurp(a / "develop.json") == slurp(b / "develop.json"));
  CHECK(slurp(a / "develop.csv") == slurp(b / "develop.csv"));
  std::string header;
  std::getline(std::istringstream(slurp(a / "develop.csv")) >> std::ws, header);
  CHECK(header == "re_z1,im_z1,re_z2,im_z2,re_F1,im_F1,re_F2,im_F2,re_det_dF,im_det_dF");
}

TEST_CASE("monodromy command") {
  const fs::path out = scratch_dir("monodromy");
  CHECK(run_text("monodromy", slurp(fs::path(SPACEFORM_CONFIGS) / "monodromy_cone_flat.ini"), out) == exit_pass);
  const auto j = report(out / "monodromy.json");
  CHECK(j["pass"] == true);
  CHECK(j["words"][0]["word"] == "a");
  CHECK(std::abs(j["words"][0]["matrix"][0][0][0].get<double>() + 1.0) < 1e-6);
  CHECK(j["words"][0]["expected_deviation"].get<double>() <= 1e-6);
  CHECK(j["words"][1]["composition_deviation"].get<double>() <= 1e-6);

  // A loop through the divisor guard zone is an operational error.
  const std::string touching = "[run]\nc = 0\n[metric]\ncatalog = cone-flat\nbeta = 0.5, 1\n"
                               "[monodromy]\nbase = 0.5, 0\nwords = a\n"
                               "[loop.a]\ncoord = 1\ncenter = 0.25\nsegments = 32\n";
  CHECK(run_text("monodromy", touching, out) == exit_error);
}

TEST_CASE("extend command") {
  const fs::path out = scratch_dir("extend");
  CHECK(run_text("extend", slurp(fs::path(SPACEFORM_CONFIGS) / "extend_flat_plane.ini"), out) == exit_pass);
  const auto j = report(out / "extend.json");
  CHECK(j["pass"] == true);
  for (const char* k : {"holomorphy", "jacobian", "containment", "agreement", "origin"})
    CHECK(j["report"][k]["pass"] == true);
  const PowerSeriesMap s = PowerSeriesMap::from_text(slurp(out / "extend_series.txt"));
  CHECK(s.nvars() == 2);
  // g~ = identity everywhere on the grid, the removed plane included.
  std::istringstream csv(slurp(out / "extend_metric.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line.rfind("re_z1,im_z1,re_z2,im_z2,re_g11,im_g11", 0) == 0);
  int rows = 0;
  while (std::getline(csv, line)) {
    std::vector<double> v;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
    REQUIRE(v.size() == 12);
    CHECK(std::abs(v[4] - 1.0) < 1e-9);
    CHECK(std::abs(v[6]) < 1e-9);
    CHECK(std::abs(v[10] - 1.0) < 1e-9);
    ++rows;
  }
  CHECK(rows == 441);

  const std::string injected = "[run]\nc = 0\n[metric]\ncatalog = flat\n[puncture]\nkind = ball\nradius = 0.2\n"
                               "[extend]\ninject_conjugate = 0.01\n";
  CHECK(run_text("extend", injected, out) == exit_check_failure);
  const auto f = report(out / "extend.json");
  CHECK(f["pass"] == false);
  CHECK(f["report"]["holomorphy"]["pass"] == false);
}

TEST_CASE("probe command") {
  const fs::path out = scratch_dir("probe");
  CHECK(run_text("probe", "[probe]\ntables = jacobian, jump, cone\n", out) == exit_pass);
  const auto j = report(out / "probe.json");
  CHECK(j["jacobian"]["min_det"].get<double>() >= 0.0625 - 1e-9);
  CHECK(std::abs(j["jump"]["jump"].get<double>() - 0.5) <= 1e-6);
  CHECK(j["cone"]["max_hsc_deviation"].get<double>() < 1e-6);
  CHECK(fs::exists(out / "probe_jacobian.csv"));
  CHECK(fs::exists(out / "probe_cone.csv"));

  CHECK(run_text("probe", "[probe]\ntables = cone\ncone_entry = cone-log\ncone_beta = 0.5, 1\n", out) == exit_pass);
  CHECK(run_text("probe", "[probe]\ntables = nothing\n", out) == exit_error);
}

TEST_CASE("executable: arguments and exit codes") {
  const fs::path out = scratch_dir("tool");
  const std::string cfgs = SPACEFORM_CONFIGS;
  CHECK(run_tool("verify-space-form --config " + cfgs + "/verify_bergman.ini --out " + out.string()) == 0);
  CHECK(run_tool("verify-space-form --config " + cfgs + "/verify_flat_wrong_c.ini --out " + out.string()) == 2);
  CHECK(run_tool("verify-space-form --config " + cfgs + "/verify_bergman.ini --out " + out.string() +
                 " --seed 7") == 0);
  CHECK(report(out / "verify-space-form.json")["seed"] == 7);
  CHECK(report(out / "verify-space-form.json")["config"]["run"]["seed"] == 7);
  CHECK(run_tool("verify-space-form --out " + out.string()) == 1);
  CHECK(run_tool("develop --config /nonexistent.ini") == 1);
  CHECK(run_tool("frobnicate --config x") == 1);
  for (const auto& e : fs::directory_iterator(out)) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("atomic writes replace whole files") {
  const fs::path out = scratch_dir("atomic");
  write_atomic(out / "sub" / "a.txt", "first");
  write_atomic(out / "sub" / "a.txt", "second");
  CHECK(slurp(out / "sub" / "a.txt") == "second");
  CHECK_FALSE(fs::exists(out / "sub" / "a.txt.tmp"));
}
