#pragma once
#include <array>
#include <functional>
#include <vector>

#include "coldwave/core.hpp"

namespace coldwave {

// Mathieu normal form of the small-orbit density-gradient oscillator,
// truncated at second order in the amplitude eps. omega^2 = 1 + B0^2;
// the hatted values live on the theta scale, a and b on the standard
// Mathieu scale tau = omega theta. The identity a + 2b = 1 is exact at
// this order: the system sits on the resonance line itself.
struct MathieuParams {
  double omega;
  double a_hat, b_hat;
  double a, b;
};
MathieuParams mathieu_params(double eps, double b0);

// Sixth-order resonance-line asymptotic for cosh(mu pi) of the truncated
// Mathieu equation; values below -1 would signal an unstable tongue.
double asymptotic_coshmupi(double eps, double b0);

enum class FloquetClass { Stable, MarginallyStable, Unstable };
FloquetClass classify(double half_trace, double margin = 1e-12);

struct Monodromy {
  double m11 = 1, m12 = 0, m21 = 0, m22 = 1;
  double half_trace = 1;
  double wronskian = 1;  // exactly 1 for z'' + K z = 0; deviation = solver error
};

// Fundamental matrix of z'' + K(theta) z = 0 over [0, period] from the two
// canonical initial columns.
Monodromy monodromy(const std::function<double(double)>& k, double period,
                    double rel_tol = 1e-12);
double monodromy_coshmupi(const std::function<double(double)>& k, double period,
                          double rel_tol = 1e-12);

// ---------------------------------------------------------------------------
// Secular breaking estimate.
//
// Along one orbit the eta = (e/(e-1), p1/(e-1)) system is linear with
// T-periodic coefficients. Its per-period map is affine, eta -> M eta + v,
// with M parabolic to machine precision (S = M - I, S^2 ~ 0): iterates grow
// linearly (quadratically if v and S v misalign), never exponentially.
// Breaking is the chart pole eta1 = 1; solving [Phi(tau)(eta0 + n S eta0 +
// n v + n(n-1)/2 S v) + eta_p(tau)]_1 = 1 over a dense grid of in-period
// phases tau gives the earliest crossing. n is relaxed to a real number,
// an error below T/theta_star in relative terms.
struct SecularSeedEstimate {
  double rho0 = 0;
  double period = 0;
  double theta_star = 0;
  double s_norm = 0;            // max-norm of S
  double s2_norm = 0;           // max-norm of S^2, ~1e-15 observed
  std::array<double, 4> phi_t;  // homogeneous monodromy, row-major
  std::array<double, 2> eta0;
  std::array<double, 2> drive;  // affine shift v, zero when C1 = B0
};

struct SecularEstimate {
  double theta_star = 0;
  double rho_star = 0;
  std::vector<SecularSeedEstimate> seeds;
};

SecularEstimate secular_breaking_estimate(const InitialData& data, const SimConfig& cfg,
                                          int n_seeds = 64, int n_tau = 241);

struct BreakingMapRow {
  double b0;
  double theta_star;
};
std::vector<BreakingMapRow> breaking_map(const std::vector<double>& b0_values, double eps,
                                         int k, const SimConfig& cfg);

}  // namespace coldwave
