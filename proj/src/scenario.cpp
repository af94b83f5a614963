#include "ncsg/scenario.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

namespace ncsg {

namespace {

const std::vector<std::string> kKnownSuites = {"semigroup", "multiplier", "maximal",
                                               "squarefn",  "ergodic",    "dilation"};

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

double report_round(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

double ScenarioParams::psi_for(double p) const {
  if (psi) return *psi;
  return psi_fraction * (0.5 - std::abs(1.0 / p - 0.5)) * kPi;
}

Scenario Scenario::from_json(const nlohmann::json& j) {
  Scenario sc;
  try {
    if (j.contains("name")) sc.name = j.at("name").get<std::string>();
    if (j.contains("seed")) sc.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("algebra")) sc.algebra_json = j.at("algebra");
    if (j.contains("generator")) sc.generator = GeneratorSpec::from_json(j.at("generator"));
    if (j.contains("suites")) {
      for (const auto& s : j.at("suites")) {
        const std::string name = s.get<std::string>();
        if (name == "all") {
          sc.suites = kKnownSuites;
          break;
        }
        if (std::find(kKnownSuites.begin(), kKnownSuites.end(), name) == kKnownSuites.end())
          throw ScenarioError("suites: unknown suite '" + name + "'");
        sc.suites.push_back(name);
      }
    }
    if (j.contains("dilation")) sc.dilation_json = j.at("dilation");
    if (j.contains("params")) {
      const auto& p = j.at("params");
      auto get = [&](const char* key, auto& slot) {
        if (p.contains(key)) slot = p.at(key).get<std::decay_t<decltype(slot)>>();
      };
      get("p_list", sc.params.p_list);
      if (p.contains("psi")) sc.params.psi = p.at("psi").get<double>();
      get("psi_fraction", sc.params.psi_fraction);
      get("u_grid", sc.params.u_grid);
      get("t_samples", sc.params.t_samples);
      get("z_radial", sc.params.z_radial);
      get("z_angular", sc.params.z_angular);
      get("z_rmin", sc.params.z_rmin);
      get("z_rmax", sc.params.z_rmax);
      get("seeds", sc.params.seeds);
      get("ergodic_budget", sc.params.ergodic_budget);
      get("multiplier_budget", sc.params.multiplier_budget);
      get("ratio_window_lo", sc.params.ratio_window_lo);
      get("ratio_window_hi", sc.params.ratio_window_hi);
      get("power_index", sc.params.power_index);
      get("gap_tol", sc.params.gap_tol);
      get("solver_max_iters", sc.params.solver_max_iters);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("scenario JSON: ") + e.what());
  }
  return sc;
}

void Scenario::validate() const {
  auto needs_suite = [&](const char* s) {
    return std::find(suites.begin(), suites.end(), s) != suites.end();
  };
  if (!suites.empty() && !generator && !needs_suite("dilation"))
    throw ScenarioError("generator: required for the selected suites");
  for (double p : params.p_list)
    if (!(p >= 1.0)) throw ScenarioError("params.p_list: exponents must satisfy p >= 1");
  if (needs_suite("multiplier") || needs_suite("squarefn") || needs_suite("maximal"))
    for (double p : params.p_list)
      if (!(p > 1.0) || std::isinf(p))
        throw ScenarioError("params.p_list: 1 < p < inf required by the selected suites");
  if (needs_suite("maximal")) {
    for (double p : params.p_list) {
      const double psi = params.psi_for(p);
      if (!(psi / kPi < 0.5 - std::abs(1.0 / p - 0.5))) {
        std::ostringstream os;
        os << "params.psi: maximal-inequality angle hypothesis violated at p=" << p
           << " (require psi/pi < 1/2 - |1/p - 1/2|)";
        throw ScenarioError(os.str());
      }
    }
  }
  if (params.seeds < 1) throw ScenarioError("params.seeds: must be >= 1");
  if (!(params.z_rmin > 0) || !(params.z_rmax >= params.z_rmin))
    throw ScenarioError("params.z_rmin/z_rmax: need 0 < rmin <= rmax");
  if (params.z_radial < 1 || params.z_angular < 1)
    throw ScenarioError("params.z_radial/z_angular: must be >= 1");
  for (double t : params.t_samples)
    if (!(t > 0)) throw ScenarioError("params.t_samples: times must be positive");
  if (needs_suite("dilation") && dilation_json) {
    if (!dilation_json->contains("P")) throw ScenarioError("dilation.P: required");
    if (!dilation_json->contains("T")) throw ScenarioError("dilation.T: required");
  }
  if (generator && generator->kind != GeneratorSpec::Kind::depolarizing) {
    // structurally buildable?
    (void)generator->natural_algebra();
  } else if (generator && !algebra_json) {
    throw ScenarioError("algebra: required for a depolarizing generator");
  }
}

AlgebraPtr Scenario::resolve_algebra() const {
  if (algebra_json) return TracialAlgebra::from_json(*algebra_json);
  if (generator) return generator->natural_algebra();
  throw ScenarioError("algebra: cannot be resolved (no algebra and no generator)");
}

// ---------------------------------------------------------------------------
// suites

namespace {

struct SuiteContext {
  const Scenario& sc;
  AlgebraPtr algebra;
  std::optional<Superoperator> generator;
  std::optional<SpectralDecomposition> dec;
  std::uint64_t seed;
};

void add_check(SuiteOutcome& out, const std::string& name, bool pass, double residual) {
  out.checks.push_back({name, pass, report_round(residual)});
  out.pass = out.pass && pass;
}

SuiteOutcome run_semigroup_suite(const SuiteContext& ctx) {
  SuiteOutcome out;
  out.suite = "semigroup";
  const ValidationReport rep =
      check_standard_semigroup(*ctx.generator, ctx.sc.params.t_samples, ctx.seed);
  for (const auto& row : rep.checks) add_check(out, row.name, row.pass, row.residual);
  out.details = rep.to_json();
  return out;
}

SuiteOutcome run_multiplier_suite(const SuiteContext& ctx) {
  SuiteOutcome out;
  out.suite = "multiplier";
  const auto& prm = ctx.sc.params;
  nlohmann::json growth = nlohmann::json::array();
  nlohmann::json bounds = nlohmann::json::array();
  std::string csv = "p,u,estimate,envelope,ratio\n";
  AscentOptions opts;
  opts.seed = ctx.seed;
  for (double p : prm.p_list) {
    const GrowthReport rep =
        imaginary_power_growth(*ctx.dec, p, prm.u_grid, opts, prm.power_index);
    growth.push_back(rep.to_json());
    for (const auto& row : rep.rows)
      csv += csv_number(p) + "," + csv_number(row.u) + "," + csv_number(row.estimate) + "," +
             csv_number(row.envelope_linear) + "," +
             csv_number(row.estimate / row.envelope_linear) + "\n";
    add_check(out, "growth_envelope_finite@p=" + csv_number(p),
              std::isfinite(rep.fitted_linear), rep.fitted_linear);

    const double psi = prm.psi_for(p);
    for (const SectorFunction& m :
         {SectorFunction::constant(1.0), SectorFunction::rational(1.0),
          SectorFunction::imaginary_power(1.0)}) {
      const MultiplierBoundReport rep2 =
          verify_multiplier_bound(*ctx.dec, m, p, psi, prm.multiplier_budget, opts);
      bounds.push_back(rep2.to_json());
      add_check(out, "bound_" + m.name + "@p=" + csv_number(p), rep2.pass, rep2.ratio);
    }
  }
  out.details = {{"growth", growth}, {"bounds", bounds}};
  out.csv_files.emplace_back("multiplier_growth.csv", csv);
  return out;
}

SuiteOutcome run_maximal_suite(const SuiteContext& ctx) {
  SuiteOutcome out;
  out.suite = "maximal";
  const auto& prm = ctx.sc.params;
  SolverOptions sopt;
  sopt.rel_gap_tol = prm.gap_tol;
  sopt.max_iters = prm.solver_max_iters;
  nlohmann::json reports = nlohmann::json::array();
  std::string csv = "p,psi,seed,ratio,factor_upper,multiplier_part,ergodic_part\n";
  for (double p : prm.p_list) {
    const double psi = prm.psi_for(p);
    const auto grid =
        make_sector_grid(psi, prm.z_rmin, prm.z_rmax, prm.z_radial, prm.z_angular);
    const HarnessReport rep = maximal_inequality_harness(
        *ctx.dec, p, psi, grid, prm.seeds, prm.ergodic_budget, ctx.seed, sopt);
    reports.push_back(rep.to_json());
    for (const auto& row : rep.rows)
      csv += csv_number(p) + "," + csv_number(psi) + "," + std::to_string(row.seed) + "," +
             csv_number(row.ratio) + "," + csv_number(row.factor_upper) + "," +
             csv_number(row.multiplier_part) + "," + csv_number(row.ergodic_part) + "\n";
    add_check(out, "harness@p=" + csv_number(p), rep.pass, rep.max_ratio);
  }
  out.details = {{"harness", reports}};
  out.csv_files.emplace_back("maximal_ratios.csv", csv);
  return out;
}

SuiteOutcome run_squarefn_suite(const SuiteContext& ctx) {
  SuiteOutcome out;
  out.suite = "squarefn";
  const auto& prm = ctx.sc.params;
  nlohmann::json reports = nlohmann::json::array();
  std::string csv = "p,seed,lhs,rhs,ratio\n";
  {  // p = 2 identity on a few samples
    double worst = 0.0;
    for (int s = 0; s < 5; ++s) {
      AlgebraElement x =
          random_element(ctx.algebra, mix_seed(ctx.seed, 900 + s), RandomKind::general);
      x -= fixed_point_projection(*ctx.dec, x);
      const SquareFunctionValue v = square_function_norms(*ctx.dec, x, 2.0, 0);
      worst = std::max(worst, std::abs(v.column_value - lp_norm(x, 2.0) / 2));
    }
    add_check(out, "p2_identity", worst <= 1e-10, worst);
  }
  for (double p : prm.p_list) {
    const EquivalenceReport rep =
        equivalence_tracker(*ctx.dec, p, prm.seeds,
                            {prm.ratio_window_lo, prm.ratio_window_hi}, ctx.seed);
    reports.push_back(rep.to_json());
    for (const auto& row : rep.rows)
      csv += csv_number(p) + "," + std::to_string(row.seed) + "," + csv_number(row.lhs) + "," +
             csv_number(row.rhs) + "," + csv_number(row.ratio) + "\n";
    add_check(out, "equivalence_window@p=" + csv_number(p), rep.in_window, rep.max_ratio);
  }
  out.details = {{"equivalence", reports}};
  out.csv_files.emplace_back("squarefn_ratios.csv", csv);
  return out;
}

SuiteOutcome run_ergodic_suite(const SuiteContext& ctx) {
  SuiteOutcome out;
  out.suite = "ergodic";
  const auto& prm = ctx.sc.params;
  const auto& dec = *ctx.dec;

  {  // decomposition identity across a (t, theta) grid
    double worst = 0.0;
    Rng rng(mix_seed(ctx.seed, 11));
    for (int s = 0; s < 12; ++s) {
      const AlgebraElement x = random_element(ctx.algebra, rng, RandomKind::general);
      const double t = std::pow(10.0, -2.0 + 4.0 * rng.uniform());
      const double theta = (2.0 * rng.uniform() - 1.0) * 0.45 * kPi;
      worst = std::max(worst, decomposition_check(dec, x, t, theta));
    }
    add_check(out, "decomposition_identity", worst <= 1e-10, worst);
  }
  {  // mean ergodic envelope at p = 2
    double worst = 0.0;
    for (int s = 0; s < 6; ++s) {
      AlgebraElement x =
          random_element(ctx.algebra, mix_seed(ctx.seed, 200 + s), RandomKind::general);
      const AlgebraElement fixed = fixed_point_projection(dec, x);
      const double base = lp_norm(x - fixed, 2.0);
      if (!(base > 0)) continue;
      for (double t : prm.t_samples) {
        const double r = lp_norm(ergodic_average(dec, x, t) - fixed, 2.0) / base;
        worst = std::max(worst, r - (1.0 / (t * dec.gap()) + 1e-10));
      }
    }
    add_check(out, "ergodic_average_envelope", worst <= 0.0, std::max(0.0, worst));
  }
  {  // witness projections, both limits
    AlgebraElement x = random_element(ctx.algebra, mix_seed(ctx.seed, 300), RandomKind::general);
    std::vector<Complex> to_zero, to_inf;
    for (int k = 0; k < 12; ++k) {
      to_zero.push_back(std::polar(std::pow(10.0, -k * 0.75), 0.1));
      to_inf.push_back(std::polar(std::pow(10.0, -1.0 + k * 0.35), 0.1));
    }
    const WitnessResult w0 =
        witness_projection(dec, x, 0.1, to_zero, WitnessMode::bilateral,
                           ErgodicTarget::identity_limit);
    add_check(out, "witness_zero_trace_bound", w0.complement_trace < 0.1, w0.complement_trace);
    add_check(out, "witness_zero_decay", w0.decay.back().norm <= 1e-6, w0.decay.back().norm);
    const WitnessResult w1 =
        witness_projection(dec, x, 0.1, to_inf, WitnessMode::one_sided,
                           ErgodicTarget::fixed_point_limit);
    add_check(out, "witness_inf_trace_bound", w1.complement_trace < 0.1, w1.complement_trace);
    add_check(out, "witness_inf_decay", w1.decay.back().norm <= 1e-6, w1.decay.back().norm);
    std::string csv = "limit,abs_z,arg_z,norm\n";
    for (const auto& row : w0.decay)
      csv += "zero," + csv_number(std::abs(row.z)) + "," + csv_number(std::arg(row.z)) + "," +
             csv_number(row.norm) + "\n";
    for (const auto& row : w1.decay)
      csv += "inf," + csv_number(std::abs(row.z)) + "," + csv_number(std::arg(row.z)) + "," +
             csv_number(row.norm) + "\n";
    out.csv_files.emplace_back("ergodic_decay.csv", csv);
    out.details = {{"witness_zero_rate", report_round(w0.fitted_rate)},
                   {"witness_inf_rate", report_round(w1.fitted_rate)}};
  }
  {  // contour representation
    AlgebraElement x =
        random_element(ctx.algebra, mix_seed(ctx.seed, 400), RandomKind::general);
    x -= fixed_point_projection(dec, x);
    double worst = 0.0;
    for (Complex z : {Complex(1.0, 0.0), std::polar(2.0, kPi / 8)})
      worst = std::max(worst, contour_Tz(dec, z, x).residual);
    add_check(out, "contour_representation", worst <= 1e-6, worst);
  }
  return out;
}

SuiteOutcome run_dilation_suite(const SuiteContext& ctx) {
  SuiteOutcome out;
  out.suite = "dilation";
  Eigen::MatrixXd p(2, 2);
  p << 0.3, 0.7, 0.6, 0.4;
  std::optional<std::vector<double>> w;
  int horizon = 5;
  if (ctx.sc.dilation_json) {
    const auto& dj = *ctx.sc.dilation_json;
    const auto rows = dj.at("P").get<std::vector<std::vector<double>>>();
    const int n = static_cast<int>(rows.size());
    p.resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) p(i, j) = rows[i][j];
    if (dj.contains("w")) w = dj.at("w").get<std::vector<double>>();
    horizon = dj.at("T").get<int>();
  }
  const PathSpace ps = build_path_space(p, w, horizon);

  double worst = 0.0;
  Rng rng(mix_seed(ctx.seed, 5));
  for (int trial = 0; trial < 10; ++trial) {
    const AlgebraElement f = random_element(ps.state_algebra(), rng, RandomKind::general);
    for (int s = 0; s <= ps.horizon(); ++s)
      for (int t = s; t <= ps.horizon(); ++t)
        worst = std::max(worst, verify_dilation_identity(ps, f, s, t));
  }
  add_check(out, "dilation_identity", worst <= 1e-12, worst);

  const ValidationReport rep = check_standard_map(transition_superoperator(ps), ctx.seed);
  for (const auto& row : rep.checks)
    add_check(out, "chain_map_" + row.name, row.pass, row.residual);
  out.details = {{"paths", ps.path_count()}, {"chain_checks", rep.to_json()}};
  return out;
}

SuiteOutcome run_suite(const std::string& name, const SuiteContext& ctx) {
  if (name == "semigroup") return run_semigroup_suite(ctx);
  if (name == "multiplier") return run_multiplier_suite(ctx);
  if (name == "maximal") return run_maximal_suite(ctx);
  if (name == "squarefn") return run_squarefn_suite(ctx);
  if (name == "ergodic") return run_ergodic_suite(ctx);
  if (name == "dilation") return run_dilation_suite(ctx);
  throw ScenarioError("unknown suite: " + name);
}

nlohmann::json outcome_json(const SuiteOutcome& out) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : out.checks)
    checks.push_back(
        {{"check", c.name}, {"pass", c.pass}, {"residual", report_round(c.residual)}});
  return {{"suite", out.suite}, {"pass", out.pass}, {"checks", checks},
          {"details", out.details}};
}

}  // namespace

nlohmann::json list_builtins() {
  nlohmann::json generators = nlohmann::json::array();
  generators.push_back({{"name", "depolarizing"}, {"params", {"rate: positive real"}}});
  generators.push_back(
      {{"name", "markov_chain"},
       {"params", {"Q: rate matrix, rows sum to 0", "weights: optional stationary measure"}}});
  generators.push_back(
      {{"name", "schur"}, {"params", {"vectors: one real vector per index"}}});
  generators.push_back({{"name", "tensor_sum"}, {"params", {"left, right: generator specs"}}});
  return {{"generators", generators},
          {"sector_functions", SectorFunction::builtin_catalog()},
          {"suites", kKnownSuites}};
}

int validate_scenario_file(const std::string& path, std::string* message) {
  std::ifstream in(path);
  if (!in) {
    if (message) *message = "cannot open " + path;
    return 2;
  }
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  try {
    const auto j = nlohmann::json::parse(bytes);
    Scenario sc = Scenario::from_json(j);
    sc.validate();
    if (!sc.suites.empty() || sc.generator) {
      // resolve heavyweight objects to surface structural errors early
      if (sc.generator) {
        const AlgebraPtr alg = sc.resolve_algebra();
        (void)build_generator(*sc.generator, alg);
      }
    }
  } catch (const nlohmann::json::parse_error& e) {
    // byte offset -> line/column
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < bytes.size(); ++i) {
      if (bytes[i] == '\n') {
        ++line;
        col = 1;
      } else
        ++col;
    }
    if (message)
      *message = path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what();
    return 2;
  } catch (const std::exception& e) {
    if (message) *message = path + ": " + e.what();
    return 2;
  }
  return 0;
}

int run_scenario_file(const std::string& path, const RunOptions& opts) {
  std::string message;
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "error: cannot open %s\n", path.c_str());
    return 2;
  }
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  Scenario sc;
  try {
    sc = Scenario::from_json(nlohmann::json::parse(bytes));
    sc.validate();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  }
  if (opts.seed_override) sc.seed = *opts.seed_override;

  SuiteContext ctx{sc, nullptr, {}, {}, sc.seed};
  try {
    if (sc.generator) {
      ctx.algebra = sc.resolve_algebra();
      ctx.generator = build_generator(*sc.generator, ctx.algebra);
      ctx.dec = eigendecompose(*ctx.generator);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  }

  nlohmann::json report{{"tool", "ncsg"},
                        {"version", kToolVersion},
                        {"scenario", sc.name},
                        {"scenario_hash", content_hash(bytes)},
                        {"seed", sc.seed},
                        {"suites", nlohmann::json::array()},
                        {"pass", true}};
  const std::string report_path = opts.out_dir + "/report.json";
  auto flush_report = [&]() {
    std::ofstream outf(report_path);
    outf << report.dump(2) << "\n";
  };

  bool all_pass = true;
  std::vector<SuiteOutcome> outcomes(sc.suites.size());
  auto worker = [&](std::size_t i) { outcomes[i] = run_suite(sc.suites[i], ctx); };

  try {
    if (opts.parallel > 1) {
      std::vector<std::future<void>> futs;
      for (std::size_t i = 0; i < sc.suites.size(); ++i)
        futs.push_back(std::async(std::launch::async, worker, i));
      for (auto& f : futs) f.get();
      for (const auto& out : outcomes) {
        report["suites"].push_back(outcome_json(out));
        all_pass = all_pass && out.pass;
        for (const auto& [name, contents] : out.csv_files) {
          std::ofstream c(opts.out_dir + "/" + name);
          c << contents;
        }
      }
      report["pass"] = all_pass;
      flush_report();
    } else {
      for (std::size_t i = 0; i < sc.suites.size(); ++i) {
        worker(i);
        report["suites"].push_back(outcome_json(outcomes[i]));
        all_pass = all_pass && outcomes[i].pass;
        report["pass"] = all_pass;
        for (const auto& [name, contents] : outcomes[i].csv_files) {
          std::ofstream c(opts.out_dir + "/" + name);
          c << contents;
        }
        flush_report();  // partial results survive a later suite failure
      }
    }
  } catch (const std::exception& e) {
    report["error"] = e.what();
    report["pass"] = false;
    flush_report();
    std::fprintf(stderr, "suite error: %s\n", e.what());
    return 1;
  }

  for (const auto& out : outcomes)
    for (const auto& c : out.checks)
      std::printf("[%s] %s: %s (residual %.3g)\n", c.pass ? "PASS" : "FAIL", out.suite.c_str(),
                  c.name.c_str(), c.residual);
  return all_pass ? 0 : 1;
}

}  // namespace ncsg
