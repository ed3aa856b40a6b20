#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "degreelab/cli.hpp"

using namespace degreelab::cli;
using nlohmann::json;

namespace {

const std::string kFixtures = DEGREELAB_FIXTURES;
const std::string kTool = DEGREELAB_TOOL;

struct Run {
  int code;
  std::string out;
};

Run run_tool(const std::string& args) {
  std::string cmd = kTool + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  std::size_t k;
  while ((k = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, k);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

json strip_timings(const std::string& text) {
  json j = json::parse(text);
  j.erase("timings");
  return j;
}

MapFile fixture(const std::string& name) { return load_mapfile(kFixtures + "/" + name); }

}  // namespace

TEST_CASE("map file parsing") {
  auto mf = parse_mapfile(R"({"name": "t", "n": 2, "components": ["x1 + x2^3", "x2"]})");
  CHECK(mf.n == 2);
  CHECK(mf.map() == degreelab::mapforms::PolyMap::parse({"x1 + x2^3", "x2"}));
  CHECK(mf.digest.rfind("fnv1a64:", 0) == 0);
  CHECK_THROWS_AS(parse_mapfile(R"({"name": "t", "n": 2, "components": ["x1"]})"), InputError);
  CHECK_THROWS_AS(parse_mapfile(R"({"name": "t", "n": 1, "components": ["x1"], "extra": 1})"), InputError);
  CHECK_THROWS_AS(parse_mapfile(R"({"name": "t", "n": 1, "components": ["x2"]})"), InputError);
  CHECK_THROWS_AS(parse_mapfile(R"({"name": "t", "n": 1, "components": ["x1"], "parameter": "x9"})"), InputError);
  try {
    parse_mapfile("{\n  \"name\": \"t\",\n  \"n\": 1,\n  \"components\": [\n    \"2x1\"\n  ]\n}", "f.map");
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("f.map:5") != std::string::npos);
  }
  try {
    parse_mapfile("{\n  \"name\": \"t\",\n  \"n\": 1\n  \"components\": []\n}", "g.map");
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("g.map:4") != std::string::npos);
  }
  auto fam = parse_mapfile(R"({"name": "f", "n": 1, "parameter": "t", "components": ["x1 + t*x1^3"]})");
  CHECK(fam.polys()[0].nvars() == 2);
  CHECK_THROWS_AS(fam.map(), InputError);
}

TEST_CASE("points and boxes") {
  Warnings w;
  auto p = parse_point("1/2, -3, 0.25", &w);
  CHECK(p == std::vector<Rational>{Rational(1, 2), -3, Rational(1, 4)});
  CHECK(w.items.size() == 1);
  auto list = parse_point_list("1,2; -1/3,0");
  CHECK(list.size() == 2);
  auto b = parse_box("[-2,2]", 3);
  CHECK(b == IntervalBox::cube(3, 2.0));
  auto c = parse_box("[-1,1/2],[0,3]", 2);
  CHECK(c[0].hi == 0.5);
  auto third = parse_box("[0,1/3]", 1);
  CHECK(Rational(third[0].hi) >= Rational(1, 3));
  CHECK_THROWS_AS(parse_box("[-1,1],[0,1]", 3), InputError);
  CHECK_THROWS_AS(parse_box("[1,0]", 1), InputError);
  CHECK_THROWS_AS(parse_point("1,,2"), InputError);
}

TEST_CASE("analyze") {
  CommonOptions opt;
  auto tri = cmd_analyze(fixture("triangular.map"), opt).report["result"];
  CHECK(tri["keller"]["kind"] == "nonzero_constant");
  CHECK(tri["keller"]["c"] == "1");
  CHECK(tri["form"]["form"] == "druzkowski");
  CHECK(tri["jacobian_det"] == "1");
  CHECK(tri["bezout_bound"] == 3);
  auto sq = cmd_analyze(fixture("squares.map"), opt).report["result"];
  CHECK(sq["keller"]["kind"] == "nonconstant");
  CHECK(sq["sign_survey"]["classification"] == "mixed");
  CHECK(sq["jacobian_det"] == "4*x1*x2");
}

TEST_CASE("degree") {
  CommonOptions opt;
  std::vector<Rational> z2{0, 0}, one{1}, zero{0};
  auto id = cmd_degree(fixture("identity2.map"), z2, parse_box("[-1,1]", 2), "both", opt);
  CHECK(id.exit_code == kOk);
  CHECK(id.report["result"]["count"]["value"] == 1);
  CHECK(id.report["result"]["integral"]["value"] == 1);
  CHECK(id.report["result"]["agree"] == true);
  auto sq = cmd_degree(fixture("square1d.map"), one, parse_box("[-2,2]", 1), "count", opt);
  CHECK(sq.report["result"]["count"]["value"] == 0);
  auto cub = cmd_degree(fixture("cubic1d.map"), zero, parse_box("[-3,3]", 1), "both", opt);
  CHECK(cub.exit_code == kOk);
  CHECK(cub.report["result"]["count"]["value"] == 1);
  CHECK(cub.report["result"]["agree"] == true);
  auto bad = cmd_degree(fixture("identity2.map"), std::vector<Rational>{1, 0}, parse_box("[-1,1]", 2), "count", opt);
  CHECK(bad.exit_code == kInconclusive);
  CHECK(bad.report["result"]["count"]["error"] == "precondition_violation(boundary)");
  CHECK_THROWS_AS(cmd_degree(fixture("identity2.map"), z2, parse_box("[-1,1]", 2), "guess", opt), InputError);
}

TEST_CASE("reports embed the config and are deterministic") {
  CommonOptions opt;
  opt.seed = 11;
  opt.solver.max_depth = 40;
  std::vector<Rational> z{0};
  auto a = cmd_degree(fixture("cubic1d.map"), z, parse_box("[-3,3]", 1), "both", opt).report;
  auto b = cmd_degree(fixture("cubic1d.map"), z, parse_box("[-3,3]", 1), "both", opt).report;
  CHECK(a.dump() == b.dump());
  CHECK(a["config"]["seed"] == 11);
  CHECK(a["config"]["solver"]["max_depth"] == 40);
  CHECK(a["config"]["quadrature"]["initial_samples"] == 16384);
  CHECK(a["version"] == kToolVersion);
  CHECK(a["inputs"]["digest"] == fixture("cubic1d.map").digest);
  CHECK(render_markdown(a).find("## Result") != std::string::npos);
}

TEST_CASE("tool: exit codes and byte-identical output") {
  const std::string f = kFixtures + "/";
  auto inject = run_tool("inject --map " + f + "triangular.map --queries '1,1; -2,3'");
  CHECK(inject.code == 0);
  CHECK(json::parse(inject.out)["result"]["verdict"] == "consistent_with_injectivity");

  auto collide = run_tool("collide --map " + f + "even2.map --box '[-2,2]'");
  CHECK(collide.code == 3);
  CHECK(json::parse(collide.out)["result"]["witness"].is_object());

  auto hom = run_tool("homotopy --map " + f + "cubic_family.map --z 0 --box '[-2,2]' --tgrid '0,1/4,1/2,3/4,1'");
  CHECK(hom.code == 0);
  auto hres = json::parse(hom.out)["result"];
  CHECK(hres["constant"] == true);
  for (const auto& d : hres["degrees"]) CHECK(d["degree"] == 1);

  auto fib = run_tool("fibers --map " + f + "square1d.map --z 1 --box '[-2,2]'");
  CHECK(fib.code == 0);
  auto fib2 = run_tool("fibers --map " + f + "square1d.map --z 1 --box '[-2,2]'");
  CHECK(strip_timings(fib.out) == strip_timings(fib2.out));
  CHECK(run_tool("fibers --map " + f + "square1d.map --z 0 --box '[-2,2]'").code == 2);

  auto md = run_tool("degree --map " + f + "identity2.map --z 0,0 --box '[-1,1]' --method both --out md");
  CHECK(md.code == 0);
  CHECK(md.out.find("# degreelab degree") == 0);

  CHECK(run_tool("degree --map " + f + "identity2.map --z 0 --box '[-1,1]'").code == 1);
  CHECK(run_tool("degree --map /nonexistent.map --z 0 --box '[-1,1]'").code == 1);
  CHECK(run_tool("degree --map " + f + "identity2.map --z 0,0 --box '[-1,1]' --method nope").code == 1);
  CHECK(run_tool("frobnicate").code == 1);
  CHECK(run_tool("homotopy --map " + f + "identity2.map --z 0,0 --box '[-1,1]'").code == 1);
  CHECK(run_tool("inject --map " + f + "squares.map --queries '1,1'").code == 2);
}
