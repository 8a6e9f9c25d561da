#pragma once
#include <array>
#include <optional>
#include <vector>

#include "coldwave/core.hpp"
#include "coldwave/rk45.hpp"

namespace coldwave {

// packed integration state: [P1, P2, E1, rho, p1, p2, e]
using CharState = ode::State<7>;

std::array<double, 4> rhs_rel(const FieldState& s, double B0);
std::array<double, 3> rhs_rel_extended(const FieldState& s, const DerivativeState& d,
                                       double B0);
// momentum slots carry V1, V2
std::array<double, 4> rhs_nonrel(const FieldState& s, double B0);
std::array<double, 3> rhs_nonrel_extended(const DerivativeState& d, double B0);

CharState char_rhs_rel(const CharState& y, double B0);
CharState char_rhs_nonrel(const CharState& y, double B0);

struct TraceSample {
  double theta;
  FieldState state;
  DerivativeState deriv;
};

struct CharacteristicTrace {
  double rho0 = 0;
  bool relativistic = true;
  std::vector<TraceSample> samples;
  std::optional<double> breaking_time;        // threshold crossing, event-located
  std::optional<double> extrapolated_blowup;  // reciprocal fit over the last decade
  char trigger = 0;                           // '1' p1, '2' p2, 'e' e
  bool suspected_breaking = false;            // step-size underflow near blow-up
  bool underflow = false;
  double drift_K1 = 0, drift_K2 = 0, drift_C1 = 0;  // max |K(theta)-K(0)| observed
  std::optional<double> C1;                         // seed value, if defined
  ode::DenseTrajectory<7> dense;

  double final_theta() const { return samples.empty() ? 0 : samples.back().theta; }
};

CharacteristicTrace integrate_characteristic(const InitialData& data, double rho0,
                                             const SimConfig& cfg,
                                             bool relativistic = true);

std::optional<double> breaking_time(const CharacteristicTrace& trace);

// one trace per seed, uniform on [0, L); traces run concurrently and results
// are ordered by seed index regardless of scheduling
std::vector<CharacteristicTrace> ensemble(const InitialData& data, const SimConfig& cfg,
                                          bool relativistic = true);

std::optional<double> min_breaking_time(const std::vector<CharacteristicTrace>& traces);

}  // namespace coldwave
