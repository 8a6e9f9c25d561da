#include <CLI11.hpp>

#include "coldwave/clirun.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cold-plasma upper-hybrid oscillation laboratory"};

  coldwave::CliOptions opts;
  app.add_option("subcommand", opts.subcommand, "what to run")
      ->required()
      ->check(CLI::IsMember({"simulate", "ensemble", "period", "wave", "floquet",
                             "criteria", "crosscheck", "breaking-map"}));
  app.add_option("--config", opts.config_path, "run configuration file")->required();
  app.add_option("--out", opts.out_dir, "output directory")->required();
  auto* seed = app.add_option("--seed-rho", opts.seed_rho,
                              "label of the characteristic to seed (default 0)");
  app.add_flag("--quiet", opts.quiet, "suppress the final status line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  opts.seed_rho_set = seed->count() > 0;
  return coldwave::run_cli(opts);
}
