#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "degreelab/injectlab.hpp"

namespace degreelab::cli {

using mapforms::PolyMap;
using polycore::IntervalBox;
using polycore::Poly;
using polycore::Rational;

inline constexpr const char* kToolVersion = "1.0.0";

/// Exit-code contract shared by every command.
enum ExitCode : int { kOk = 0, kUsage = 1, kInconclusive = 2, kFailureWitness = 3 };

/// Bad input: malformed file, argument, or dimension mismatch.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MapFile {
  std::string name;
  std::size_t n = 0;
  std::vector<std::string> components;
  /// Name of the homotopy parameter when this is a family file.
  std::optional<std::string> parameter;
  nlohmann::json metadata = nlohmann::json::object();
  std::string source;  // path or label, for messages
  std::string digest;  // fnv1a64 of the raw text

  /// Components as polynomials in n variables (n + 1 for families).
  std::vector<Poly> polys() const;
  PolyMap map() const;
};

MapFile parse_mapfile(const std::string& text, const std::string& source = "<memory>");
MapFile load_mapfile(const std::string& path);

std::string fnv1a64(const std::string& data);

/// Collects notes such as float-to-rational conversions.
struct Warnings {
  std::vector<std::string> items;
};

/// "1/2, -3, 0.25" -> exact rationals; decimals produce a warning.
std::vector<Rational> parse_point(const std::string& text, Warnings* warn = nullptr);
/// "1,1; -2,3" -> list of points.
std::vector<std::vector<Rational>> parse_point_list(const std::string& text, Warnings* warn = nullptr);
/// "[-2,2],[-1,3/2]", or a single interval broadcast to n dimensions.
IntervalBox parse_box(const std::string& text, std::size_t n, Warnings* warn = nullptr);

nlohmann::json to_json(const Rational& q);
nlohmann::json to_json(std::span<const Rational> v);
nlohmann::json to_json(const IntervalBox& b);
nlohmann::json to_json(const fibersolve::SolverConfig& cfg);
nlohmann::json to_json(const fibersolve::FiberResult& r);
nlohmann::json to_json(const degree::DegreeResult& r);
nlohmann::json to_json(const injectlab::SignSurvey& s);
nlohmann::json to_json(const injectlab::InjectivityReport& r);

struct Outcome {
  nlohmann::json report;
  int exit_code = kOk;
};

struct CommonOptions {
  fibersolve::SolverConfig solver;
  std::uint64_t seed = 0;
};

Outcome cmd_analyze(const MapFile& mf, const CommonOptions& opt, const injectlab::SignBudget& budget = {});
Outcome cmd_degree(const MapFile& mf, std::span<const Rational> z, const IntervalBox& box, const std::string& method,
                   const CommonOptions& opt);
Outcome cmd_fibers(const MapFile& mf, std::span<const Rational> z, const IntervalBox& box, const CommonOptions& opt);
Outcome cmd_inject(const MapFile& mf, const std::vector<std::vector<Rational>>& queries,
                   const std::optional<std::vector<Rational>>& base, const CommonOptions& opt);
Outcome cmd_homotopy(const MapFile& family, std::span<const Rational> z, const IntervalBox& box,
                     std::span<const Rational> t_grid, const CommonOptions& opt);
Outcome cmd_collide(const MapFile& mf, const IntervalBox& box, const CommonOptions& opt,
                    const injectlab::CollisionConfig& ccfg = {});

/// Human-readable summary of a report.
std::string render_markdown(const nlohmann::json& report);

}  // namespace degreelab::cli
