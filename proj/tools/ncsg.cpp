// ncsg — scenario-driven verification front end.
//   ncsg run <scenario.json> [--parallel N] [--out DIR]
//   ncsg validate <scenario.json>
//   ncsg list
// Exit codes: 0 pass, 1 assertion failure, 2 validation error.
// NCSG_SEED overrides the scenario seed.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "ncsg/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"noncommutative semigroup verification lab"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = ".";
  int parallel = 1;

  auto* run = app.add_subcommand("run", "execute the suites selected by a scenario file");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--parallel", parallel, "fan out independent suites")->check(CLI::Range(1, 64));
  run->add_option("--out", out_dir, "directory for report.json and CSV series");

  auto* validate = app.add_subcommand("validate", "parse and validate a scenario file");
  validate->add_option("scenario", scenario_path, "scenario JSON file")->required();

  auto* list = app.add_subcommand("list", "catalog of builtin generators and sector functions");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      std::cout << ncsg::list_builtins().dump(2) << "\n";
      return 0;
    }
    if (validate->parsed()) {
      std::string message;
      const int rc = ncsg::validate_scenario_file(scenario_path, &message);
      if (rc != 0)
        std::cerr << "validation error: " << message << "\n";
      else
        std::cout << "ok\n";
      return rc;
    }
    ncsg::RunOptions opts;
    opts.parallel = parallel;
    opts.out_dir = out_dir;
    if (const char* env = std::getenv("NCSG_SEED"))
      opts.seed_override = std::strtoull(env, nullptr, 10);
    return ncsg::run_scenario_file(scenario_path, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
