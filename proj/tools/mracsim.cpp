#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mrac/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Batch simulator for memory-based data-driven model reference adaptive control"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir;
  double dt = 0.0;
  double t_end = 0.0;

  CLI::App* run = app.add_subcommand("run", "Simulate one scenario and write trajectory.csv + summary.json");
  run->add_option("scenario", scenario, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  CLI::Option* dt_opt = run->add_option("--dt", dt, "override the integration step [s]");
  CLI::Option* tend_opt = run->add_option("--t-end", t_end, "override the horizon [s]");

  CLI::App* compare = app.add_subcommand(
      "compare", "Run the memory-based law and the classical baseline on one scenario");
  compare->add_option("scenario", scenario, "scenario JSON file")->required();
  compare->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    const std::optional<double> dt_override = dt_opt->count() ? std::optional<double>(dt) : std::nullopt;
    const std::optional<double> tend_override = tend_opt->count() ? std::optional<double>(t_end) : std::nullopt;
    return mrac::cmd_run(scenario, out_dir, dt_override, tend_override);
  }
  return mrac::cmd_compare(scenario, out_dir);
}
