#include "mkt/scenario.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic distance, transport density and minimizer pipelines"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "Run a scenario file");

  std::string scenario;
  std::string out;
  double grid_h = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> tasks;
  run->add_option("scenario", scenario, "Scenario JSON")->required();
  auto* out_opt = run->add_option("--out", out, "Output directory");
  auto* h_opt = run->add_option("--grid-h", grid_h, "Grid spacing");
  auto* seed_opt = run->add_option("--seed", seed, "Random seed");
  run->add_option("--task", tasks, "Task to run (repeatable)")->check(CLI::IsMember(mkt::known_tasks()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return mkt::kExitConfig;
  }

  mkt::RunOverrides ov;
  if (*out_opt) ov.output = out;
  if (*h_opt) ov.grid_h = grid_h;
  if (*seed_opt) ov.seed = seed;
  ov.tasks = tasks;
  return mkt::run_scenario_file(scenario, ov, std::cerr);
}
