#pragma once
#include <array>
#include <vector>

namespace coldwave {

struct TurningPoints {
  double p2_minus = 0, p2_plus = 0;
  bool degenerate = false;  // double root: the orbit is the equilibrium point
  std::vector<double> all_roots;
};

// radicand R(eta) = (B0^2 K2 - (eta-K1)^2)^2 - 4 B0^4 (eta^2+1),
// zero exactly at the turning points of the scalar momentum dynamics
double radicand(double eta, double K1, double K2, double B0);
double radicand_deriv(double eta, double K1, double K2, double B0);
// ascending coefficients c[0] + c[1] eta + ... + c[4] eta^4 (c[4] = 1)
std::array<double, 5> radicand_coefficients(double K1, double K2, double B0);

// real roots via companion-matrix eigenvalues, polished by two Newton steps
std::vector<double> real_quartic_roots(const std::array<double, 5>& c);

// bracketing pair of radicand roots around p2_seed; throws NoBracketingRoots
// when the seed lies outside every bounded admissible band
TurningPoints turning_points(double K1, double K2, double B0, double p2_seed);

}  // namespace coldwave
