#pragma once
#include <string>
#include <vector>

#include "coldwave/core.hpp"

namespace coldwave {

// Flat "key = value" configuration with dotted namespaces and '#' comments.
// Unknown keys are ParseErrors (naming the key); out-of-range values are
// ValidationErrors (naming the violated bound).
struct RunConfig {
  SimConfig sim;  // sim.*, data.epsilon, run.horizon land here

  std::string family = "small-perturbation";
  int k = 1;

  int grid_n = 2048;
  double grid_cfl = 0.4;

  double wave_speed = 2.0;
  double wave_k1 = 0.0;
  double wave_k2 = 2.01;
  double wave_xi_span = 0.0;  // 0: one wave length
  double wave_p2_at_0 = 0.0;
  int wave_branch = 1;

  std::vector<double> map_b0{0.0, 0.5, 1.0, 2.0, 4.0};
  double crosscheck_theta = 0.0;  // 0: one orbit period of the seed

  InitialData make_data() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// canonical resolved listing, same format the parser accepts
std::string render_config(const RunConfig& c);

}  // namespace coldwave
