#include <sstream>

#include "degreelab/cli.hpp"

namespace degreelab::cli {

using nlohmann::json;

json to_json(const Rational& q) { return polycore::rational_to_string(q); }

json to_json(std::span<const Rational> v) {
  json a = json::array();
  for (const auto& q : v) a.push_back(to_json(q));
  return a;
}

json to_json(const IntervalBox& b) {
  json a = json::array();
  for (const auto& s : b.sides()) a.push_back({s.lo, s.hi});
  return a;
}

json to_json(const fibersolve::SolverConfig& cfg) {
  return {{"max_depth", cfg.max_depth},
          {"target_width", cfg.target_width},
          {"newton_max_iters", cfg.newton_max_iters},
          {"boundary_margin", cfg.boundary_margin},
          {"max_boxes", cfg.max_boxes},
          {"workers", cfg.workers}};
}

json to_json(const fibersolve::FiberResult& r) {
  json roots = json::array();
  for (const auto& root : r.roots) {
    roots.push_back({{"midpoint", root.midpoint()},
                     {"isolator", to_json(root.isolator)},
                     {"jac_sign", root.jac_sign},
                     {"refinement_width", root.refinement_width}});
  }
  return {{"status", fibersolve::to_string(r.status)},
          {"count", r.count()},
          {"positive", r.positive()},
          {"negative", r.negative()},
          {"roots", roots},
          {"stats",
           {{"boxes_processed", r.stats.boxes_processed},
            {"max_depth_reached", r.stats.max_depth_reached},
            {"singular_boxes", r.stats.singular_boxes},
            {"unresolved_boxes", r.stats.unresolved_boxes}}}};
}

json to_json(const degree::DegreeResult& r) {
  json j = {{"method", degree::to_string(r.method)},
            {"value", r.value},
            {"certified", r.certified},
            {"clearance", r.clearance}};
  if (r.method == degree::Method::signed_count) {
    j["positive_roots"] = r.positive_roots;
    j["negative_roots"] = r.negative_roots;
  } else {
    j["raw"] = r.raw;
    j["epsilon"] = r.epsilon;
    j["samples"] = r.samples;
    j["support_hits"] = r.support_hits;
    j["bump"] = "exp(-1/s) smooth plateau on [eps/8, 3eps/4] (convention)";
  }
  return j;
}

json to_json(const injectlab::SignSurvey& s) {
  return {{"classification", injectlab::to_string(s.classification)},
          {"evidence", s.evidence},
          {"exact", s.exact},
          {"certified", s.certified},
          {"budget_exhausted", s.budget_exhausted},
          {"boxes", s.boxes},
          {"samples", s.samples},
          {"positive_samples", s.positive_samples},
          {"negative_samples", s.negative_samples},
          {"zero_samples", s.zero_samples}};
}

json to_json(const injectlab::InjectivityReport& r) {
  json queries = json::array();
  for (const auto& q : r.queries) {
    json rec = {{"q", to_json(q.q)},
                {"radius", q.radius},
                {"box", "[-R, R]^n"},
                {"fiber_size", q.fiber_size},
                {"fiber_status", q.fiber_status},
                {"degree_q", q.degree_q ? json(*q.degree_q) : json(nullptr)},
                {"degree_b", q.degree_b ? json(*q.degree_b) : json(nullptr)},
                {"path_certified", q.path_certified},
                {"consistent", q.consistent}};
    if (!q.note.empty()) rec["note"] = q.note;
    queries.push_back(rec);
  }
  json j = {{"verdict", injectlab::to_string(r.verdict)},
            {"base_point", to_json(r.base_point)},
            {"base_justification", r.base_justification},
            {"base_radius", r.base_radius},
            {"base_fiber_size", r.base_fiber_size},
            {"base_status", r.base_status},
            {"queries", queries},
            {"scope", "box-restricted; not a proof over all of R^n"}};
  if (r.witness) {
    j["witness"] = {{"p1", r.witness->p1},
                    {"p2", r.witness->p2},
                    {"separation", r.witness->separation},
                    {"residual", r.witness->residual}};
  }
  if (!r.diagnosis.empty()) j["diagnosis"] = r.diagnosis;
  return j;
}

namespace {

json base_report(const std::string& command, const MapFile& mf, const CommonOptions& opt) {
  return {{"tool", "degreelab"},
          {"version", kToolVersion},
          {"command", command},
          {"inputs", {{"map", mf.name}, {"source", mf.source}, {"digest", mf.digest}, {"n", mf.n}}},
          {"config", {{"solver", to_json(opt.solver)}, {"seed", opt.seed}}}};
}

}  // namespace

Outcome cmd_analyze(const MapFile& mf, const CommonOptions& opt, const injectlab::SignBudget& budget_in) {
  Outcome out;
  out.report = base_report("analyze", mf, opt);
  PolyMap f = mf.map();
  injectlab::SignBudget budget = budget_in;
  budget.seed = opt.seed;

  auto keller = mapforms::keller_check(f);
  auto form = mapforms::recognize_form(f);
  json res;
  res["components"] = json::array();
  for (const auto& c : f.components()) res["components"].push_back(c.to_string());
  res["jacobian_det"] = f.jacobian_det().to_string();
  res["keller"] = {{"kind", mapforms::to_string(keller.kind)}};
  if (keller.constant_value) res["keller"]["c"] = to_json(*keller.constant_value);
  res["form"] = {{"form", mapforms::to_string(form.form)}, {"linear_part_identity", form.linear_part_identity}};
  if (form.druzkowski_matrix) {
    json a = json::array();
    for (const auto& row : *form.druzkowski_matrix) a.push_back(to_json(row));
    res["form"]["A"] = a;
  }
  try {
    res["bezout_bound"] = fibersolve::bezout_bound(f);
  } catch (const std::invalid_argument&) {
    res["bezout_bound"] = nullptr;
  }
  // Survey box: metadata may name one, otherwise [-4, 4]^n.
  IntervalBox box = IntervalBox::cube(f.n(), 4.0);
  if (mf.metadata.contains("survey_box") && mf.metadata["survey_box"].is_string()) {
    box = parse_box(mf.metadata["survey_box"].get<std::string>(), f.n());
  }
  res["sign_survey"] = to_json(injectlab::jacobian_sign_survey(f, box, budget));
  res["sign_survey"]["box"] = to_json(box);
  out.report["config"]["sign_budget"] = {{"max_boxes", budget.max_boxes}, {"samples", budget.samples}};
  out.report["result"] = res;
  return out;
}

Outcome cmd_degree(const MapFile& mf, std::span<const Rational> z, const IntervalBox& box, const std::string& method,
                   const CommonOptions& opt) {
  if (method != "count" && method != "integral" && method != "both") {
    throw InputError("--method must be count, integral or both");
  }
  Outcome out;
  out.report = base_report("degree", mf, opt);
  PolyMap f = mf.map();
  if (z.size() != f.n()) throw InputError("--z has the wrong dimension");
  out.report["inputs"]["z"] = to_json(z);
  out.report["inputs"]["box"] = to_json(box);
  out.report["config"]["method"] = method;

  degree::QuadratureConfig quad;
  quad.seed = opt.seed;
  quad.workers = opt.solver.workers;
  out.report["config"]["quadrature"] = {{"initial_samples", quad.initial_samples},
                                        {"max_samples", quad.max_samples},
                                        {"convergence_tol", quad.convergence_tol},
                                        {"min_support_hits", quad.min_support_hits},
                                        {"sequence", "Halton with seeded Cranley-Patterson shift"}};
  json res = json::object();
  std::optional<long> count_value, integral_value;
  bool failed = false;
  auto run = [&](const char* key, auto&& fn, std::optional<long>& slot) {
    try {
      degree::DegreeResult r = fn();
      slot = r.value;
      res[key] = to_json(r);
    } catch (const degree::DegreeError& e) {
      failed = true;
      res[key] = {{"error", degree::to_string(e.kind())}, {"message", e.what()}};
    }
  };
  if (method != "integral") {
    run("count", [&] { return degree::degree_signed_count(f, box, z, opt.solver); }, count_value);
  }
  if (method != "count") {
    run("integral", [&] { return degree::degree_integral(f, box, z, quad, opt.solver); }, integral_value);
  }
  if (count_value && integral_value) {
    res["agree"] = *count_value == *integral_value;
    if (*count_value != *integral_value) out.exit_code = kFailureWitness;
  }
  if (failed && out.exit_code == kOk) out.exit_code = kInconclusive;
  out.report["result"] = res;
  return out;
}

Outcome cmd_fibers(const MapFile& mf, std::span<const Rational> z, const IntervalBox& box, const CommonOptions& opt) {
  Outcome out;
  out.report = base_report("fibers", mf, opt);
  PolyMap f = mf.map();
  if (z.size() != f.n()) throw InputError("--z has the wrong dimension");
  out.report["inputs"]["z"] = to_json(z);
  out.report["inputs"]["box"] = to_json(box);
  auto fiber = fibersolve::solve_fiber(f, z, box, opt.solver);
  json res = to_json(fiber);
  try {
    res["bezout_bound"] = fibersolve::bezout_bound(f);
  } catch (const std::invalid_argument&) {
    res["bezout_bound"] = nullptr;
  }
  out.report["result"] = res;
  out.exit_code = fiber.status == fibersolve::FiberStatus::complete ? kOk : kInconclusive;
  return out;
}

Outcome cmd_inject(const MapFile& mf, const std::vector<std::vector<Rational>>& queries,
                   const std::optional<std::vector<Rational>>& base, const CommonOptions& opt) {
  Outcome out;
  out.report = base_report("inject", mf, opt);
  PolyMap f = mf.map();
  json qs = json::array();
  for (const auto& q : queries) {
    if (q.size() != f.n()) throw InputError("query has the wrong dimension");
    qs.push_back(to_json(q));
  }
  out.report["inputs"]["queries"] = qs;
  injectlab::PipelineOptions popt;
  popt.base_point = base;
  if (base) out.report["inputs"]["base"] = to_json(*base);
  out.report["config"]["pipeline"] = {{"initial_radius", popt.initial_radius},
                                      {"max_radius", popt.max_radius},
                                      {"separation", popt.separation},
                                      {"residual", popt.residual}};
  try {
    auto rep = injectlab::injectivity_pipeline(f, queries, opt.solver, popt);
    out.report["result"] = to_json(rep);
    switch (rep.verdict) {
      case injectlab::Verdict::consistent_with_injectivity: out.exit_code = kOk; break;
      case injectlab::Verdict::inconclusive: out.exit_code = kInconclusive; break;
      case injectlab::Verdict::non_injective_witness: out.exit_code = kFailureWitness; break;
    }
  } catch (const injectlab::PreconditionError& e) {
    out.report["result"] = {{"verdict", "inconclusive"}, {"precondition_failure", e.what()}};
    out.exit_code = kInconclusive;
  }
  return out;
}

Outcome cmd_homotopy(const MapFile& family, std::span<const Rational> z, const IntervalBox& box,
                     std::span<const Rational> t_grid, const CommonOptions& opt) {
  Outcome out;
  out.report = base_report("homotopy", family, opt);
  if (!family.parameter) throw InputError(family.source + ": homotopy needs a family file with a 'parameter' field");
  if (z.size() != family.n) throw InputError("--z has the wrong dimension");
  out.report["inputs"]["z"] = to_json(z);
  out.report["inputs"]["box"] = to_json(box);
  out.report["inputs"]["t_grid"] = to_json(t_grid);
  auto rep = degree::homotopy_constancy_check(family.polys(), box, z, t_grid, opt.solver);
  json degrees = json::array();
  for (std::size_t k = 0; k < rep.degrees.size(); ++k) {
    json d = {{"t", to_json(rep.t_values[k])}};
    if (rep.degrees[k]) d["degree"] = *rep.degrees[k];
    else d["error"] = rep.errors[k];
    degrees.push_back(d);
  }
  json res = {{"boundary_certified", rep.boundary_certified},
              {"clearance", rep.clearance},
              {"constant", rep.constant},
              {"degrees", degrees}};
  if (!rep.diagnostic.empty()) res["diagnostic"] = rep.diagnostic;
  out.report["result"] = res;
  bool all_present = std::all_of(rep.degrees.begin(), rep.degrees.end(), [](const auto& d) { return d.has_value(); });
  if (!rep.boundary_certified || !all_present) out.exit_code = kInconclusive;
  else out.exit_code = rep.constant ? kOk : kFailureWitness;
  return out;
}

Outcome cmd_collide(const MapFile& mf, const IntervalBox& box, const CommonOptions& opt,
                    const injectlab::CollisionConfig& ccfg_in) {
  Outcome out;
  out.report = base_report("collide", mf, opt);
  PolyMap f = mf.map();
  out.report["inputs"]["box"] = to_json(box);
  injectlab::CollisionConfig ccfg = ccfg_in;
  ccfg.seed = opt.seed;
  out.report["config"]["collision"] = {{"separation", ccfg.separation},
                                       {"residual", ccfg.residual},
                                       {"fiber_samples", ccfg.fiber_samples},
                                       {"fiber_max_boxes", ccfg.fiber_max_boxes},
                                       {"samples", ccfg.samples},
                                       {"starts_per_sample", ccfg.starts_per_sample}};
  auto res = injectlab::collision_search(f, box, opt.solver, ccfg);
  json j = {{"method", res.method}, {"fiber_solves", res.fiber_solves}, {"samples_tried", res.samples_tried}};
  if (res.witness) {
    j["witness"] = {{"p1", res.witness->p1},
                    {"p2", res.witness->p2},
                    {"separation", res.witness->separation},
                    {"residual", res.witness->residual}};
    out.exit_code = kFailureWitness;
  } else {
    j["witness"] = nullptr;
    j["note"] = "no collision found within budget; this is not a proof of injectivity";
  }
  out.report["result"] = j;
  return out;
}

namespace {

void render_value(std::ostringstream& os, const json& v, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (v.is_object()) {
    for (const auto& [k, x] : v.items()) {
      if (x.is_object() || (x.is_array() && !x.empty() && x.front().is_object())) {
        os << pad << "- **" << k << "**:\n";
        render_value(os, x, indent + 1);
      } else {
        os << pad << "- **" << k << "**: " << (x.is_string() ? x.get<std::string>() : x.dump()) << "\n";
      }
    }
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      os << pad << "- [" << i << "]\n";
      render_value(os, v[i], indent + 1);
    }
  } else {
    os << pad << "- " << v.dump() << "\n";
  }
}

}  // namespace

std::string render_markdown(const json& report) {
  std::ostringstream os;
  os << "# degreelab " << report.value("command", std::string("?")) << "\n\n";
  if (report.contains("inputs")) {
    os << "## Inputs\n\n";
    render_value(os, report["inputs"], 0);
    os << "\n";
  }
  if (report.contains("result")) {
    os << "## Result\n\n";
    render_value(os, report["result"], 0);
    os << "\n";
  }
  if (report.contains("warnings") && !report["warnings"].empty()) {
    os << "## Warnings\n\n";
    for (const auto& w : report["warnings"]) os << "- " << w.get<std::string>() << "\n";
    os << "\n";
  }
  if (report.contains("config")) {
    os << "## Config\n\n";
    render_value(os, report["config"], 0);
  }
  return os.str();
}

}  // namespace degreelab::cli
