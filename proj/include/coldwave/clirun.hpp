#pragma once
#include <string>

namespace coldwave {

struct CliOptions {
  std::string subcommand;
  std::string config_path;
  std::string out_dir;
  double seed_rho = 0.0;
  bool seed_rho_set = false;
  bool quiet = false;
};

// Runs one subcommand end to end, writing trace/grid CSVs, summary.txt and
// manifest.txt under out_dir. Returns the process exit code: 0 success,
// 2 validation failure, 3 numerical failure.
int run_cli(const CliOptions& opts);

}  // namespace coldwave
