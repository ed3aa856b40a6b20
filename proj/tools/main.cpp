#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "degreelab/cli.hpp"

using namespace degreelab;
using namespace degreelab::cli;

int main(int argc, char** argv) {
  CLI::App app{"degreelab: degree-theoretic analysis of real polynomial maps"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string map_path, z_text, box_text, method = "count", out = "json";
  std::string queries_text, base_text, tgrid_text = "0,1/4,1/2,3/4,1";
  unsigned max_depth = fibersolve::SolverConfig{}.max_depth;
  std::uint64_t seed = 0;
  unsigned workers = 1;

  auto common = [&](CLI::App* sub, bool needs_z, bool needs_box) {
    sub->add_option("--map", map_path, "map file (JSON)")->required();
    if (needs_z) sub->add_option("--z", z_text, "target point, e.g. 0,1/2");
    if (needs_box) sub->add_option("--box", box_text, "box, e.g. [-2,2],[-1,1]")->required();
    sub->add_option("--max-depth", max_depth, "solver bisection depth")->check(CLI::Range(1u, 200u));
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 256u));
    sub->add_option("--out", out, "report format")->check(CLI::IsMember({"json", "md"}));
  };
  auto* analyze = app.add_subcommand("analyze", "Keller status, form, Bezout bound, Jacobian sign survey");
  common(analyze, false, false);
  auto* deg = app.add_subcommand("degree", "Brouwer degree on a box");
  common(deg, true, true);
  deg->add_option("--method", method, "count|integral|both")->check(CLI::IsMember({"count", "integral", "both"}));
  auto* fibers = app.add_subcommand("fibers", "certified fiber enumeration");
  common(fibers, true, true);
  auto* inject = app.add_subcommand("inject", "injectivity pipeline over query points");
  common(inject, false, false);
  inject->add_option("--queries", queries_text, "query points, e.g. '1,2; 0,-1'")->required();
  inject->add_option("--base", base_text, "base point for maps not in cubic form");
  auto* homotopy = app.add_subcommand("homotopy", "degree constancy along a parameter family");
  common(homotopy, true, true);
  homotopy->add_option("--tgrid", tgrid_text, "parameter values in [0,1]");
  auto* collide = app.add_subcommand("collide", "search for F(p1) = F(p2), p1 != p2");
  common(collide, false, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  Warnings warnings;
  try {
    MapFile mf = load_mapfile(map_path);
    CommonOptions opt;
    opt.solver.max_depth = max_depth;
    opt.solver.workers = workers;
    opt.seed = seed;
    std::size_t n = mf.n;
    auto target = [&] {
      if (z_text.empty()) return std::vector<Rational>(n, Rational(0));
      return parse_point(z_text, &warnings);
    };
    if (analyze->parsed()) {
      outcome = cmd_analyze(mf, opt);
    } else if (deg->parsed()) {
      outcome = cmd_degree(mf, target(), parse_box(box_text, n, &warnings), method, opt);
    } else if (fibers->parsed()) {
      outcome = cmd_fibers(mf, target(), parse_box(box_text, n, &warnings), opt);
    } else if (inject->parsed()) {
      std::optional<std::vector<Rational>> base;
      if (!base_text.empty()) base = parse_point(base_text, &warnings);
      outcome = cmd_inject(mf, parse_point_list(queries_text, &warnings), base, opt);
    } else if (homotopy->parsed()) {
      outcome = cmd_homotopy(mf, target(), parse_box(box_text, n, &warnings), parse_point(tgrid_text, &warnings), opt);
    } else if (collide->parsed()) {
      outcome = cmd_collide(mf, parse_box(box_text, n, &warnings), opt);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  outcome.report["warnings"] = warnings.items;
  outcome.report["timings"] = {{"wall_seconds", elapsed}};
  if (out == "md") std::cout << render_markdown(outcome.report);
  else std::cout << outcome.report.dump(2) << "\n";
  return outcome.exit_code;
}
