#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ncsg/dilation.hpp"
#include "ncsg/ergodic.hpp"
#include "ncsg/maximal.hpp"
#include "ncsg/multiplier.hpp"
#include "ncsg/squarefn.hpp"

namespace ncsg {

inline constexpr const char* kToolVersion = "0.1.0";

/// Scenario validation failure with a JSON-path-qualified message.
class ScenarioError : public std::runtime_error {
public:
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct ScenarioParams {
  std::vector<double> p_list{1.5, 2.0, 3.0};
  std::optional<double> psi;    // absolute sector half-angle
  double psi_fraction = 0.5;    // else: fraction of (1/2 - |1/p-1/2|) pi, per p
  std::vector<double> u_grid{-4, -2, -1, 1, 2, 4};
  std::vector<double> t_samples{0.1, 1.0, 10.0};
  int z_radial = 6, z_angular = 6;
  double z_rmin = 0.01, z_rmax = 100.0;
  int seeds = 5;
  double ergodic_budget = 16.0;
  double multiplier_budget = 64.0;
  double ratio_window_lo = 1e-3, ratio_window_hi = 1e3;
  double power_index = 12.0;
  double gap_tol = 1e-4;
  int solver_max_iters = 20000;

  double psi_for(double p) const;  // effective angle for exponent p
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  std::optional<nlohmann::json> algebra_json;
  std::optional<GeneratorSpec> generator;
  std::vector<std::string> suites;  // subset of known suites, or "all"
  ScenarioParams params;
  std::optional<nlohmann::json> dilation_json;  // {"P": [[..]], "w"?: [..], "T": n}

  static Scenario from_json(const nlohmann::json& j);
  /// Parameter-range validation; throws ScenarioError naming the failing field.
  void validate() const;

  AlgebraPtr resolve_algebra() const;
};

struct SuiteOutcome {
  std::string suite;
  bool pass = true;
  std::vector<CheckRow> checks;
  nlohmann::json details;
  /// (file name, contents) pairs written next to the report.
  std::vector<std::pair<std::string, std::string>> csv_files;
};

struct RunOptions {
  int parallel = 1;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;  // NCSG_SEED
};

/// Executes the selected suites and writes report.json plus CSV series into
/// out_dir. Returns 0 when every hard check passes, 1 on assertion failure,
/// 2 on parse/validation errors. Partial results are flushed after each suite.
int run_scenario_file(const std::string& path, const RunOptions& opts);

/// Parse + validate only; returns 0 or 2.
int validate_scenario_file(const std::string& path, std::string* message = nullptr);

/// Catalog of generator kinds and sector-function names with parameter
/// schemas, in stable order.
nlohmann::json list_builtins();

/// FNV-1a 64-bit of the raw scenario bytes, hex-encoded.
std::string content_hash(const std::string& bytes);

/// Round to 12 significant digits for stable report output.
double report_round(double v);

}  // namespace ncsg
