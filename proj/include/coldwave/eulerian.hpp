#pragma once
#include <array>
#include <vector>

#include "coldwave/characteristics.hpp"
#include "coldwave/core.hpp"

namespace coldwave {

// Cell-centered periodic grid for the field system in advective form,
//   dU/dtheta + V1 dU/drho = S(U),  U = (P1, P2, E1),
//   S = (-E1 - B0 V2, B0 V1, V1),
// advanced by the two-step (predictor on faces, corrector on centers)
// Lax-Wendroff scheme. n is a power of two, at least 16; steps obey a
// CFL number of at most 0.5.
struct GridSolution {
  double time = 0;
  double length = 0;
  double b0 = 1;
  double cfl = 0.4;  // fraction of the stability bound used by evolve_grid
  int n = 0;
  std::vector<double> rho;  // cell centers j * length / n
  std::vector<double> p1, p2, e1;
};

GridSolution grid_from_data(const InitialData& data, int n);

// one scheme step of size dt; CFLViolation if dt > cfl_max * drho / max|V1|
void step_grid(GridSolution& g, double dt, double cfl_max = 0.5);

// advance to t_end with CFL-limited steps (fraction cfl of the bound),
// clamping the last step to land on t_end
void evolve_grid(GridSolution& g, double t_end, double cfl = 0.4);

// density N = 1 - dE1/drho, fourth-order central differences
std::vector<double> density_field(const GridSolution& g);

struct CrossCheck {
  std::array<double, 3> max_err{};  // P1, P2, E1
  std::array<double, 3> l2_err{};
  bool unreliable = false;  // some characteristic broke or ended before this time
};

// Interpolates characteristic states at theta = g.time onto the grid by
// periodic monotone cubic in rho and reports the field-wise errors.
// InsufficientCoverage if the largest gap between adjacent characteristic
// positions (wrap included) exceeds 1% of the domain.
CrossCheck cross_check(const GridSolution& g, const std::vector<CharacteristicTrace>& traces);

// Exact traveling-wave profile sampled onto a grid: the orbit on the
// (k1, k2) manifold reparameterised by xi = integral of (V1 - w), wrapped
// to the wave length w * T. Requires w above the orbit's velocity range,
// otherwise the map rho -> fields folds over.
GridSolution wave_profile_grid(double w, double k1, double k2, double b0, int n);

}  // namespace coldwave
