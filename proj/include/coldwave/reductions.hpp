#pragma once
#include <array>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "coldwave/characteristics.hpp"
#include "coldwave/core.hpp"
#include "coldwave/quartic.hpp"
#include "coldwave/rk45.hpp"

namespace coldwave {

// ---------------------------------------------------------------------------
// Scalar transverse-momentum reduction on a single orbit manifold (K1, K2).
// dP2/dtheta = sign * B0 * sqrt(R(P2)) / D(P2),  D = B0^2 K2 - (P2 - K1)^2.
// D equals 2 gamma B0^2 on the manifold and stays positive on bounded orbits.
double p2_scalar_rhs(double p2, double k1, double k2, double b0, int branch_sign);

// Scalar-route orbit P2(theta), sampled uniformly on [0, theta_end]. The
// integration runs in the uniformising angle phi with P2 = c + r sin(phi):
// dphi/dtheta = B0 sqrt(W)/D is smooth through both turning points, and the
// branch flips of the printed +- fall out of the chart, so no event handling
// is needed. Degenerate orbits return the constant seed value.
std::vector<std::pair<double, double>> p2_scalar_orbit(double k1, double k2, double b0,
                                                       double p2_seed, int branch_sign,
                                                       double theta_end,
                                                       int n_samples = 513);

// Orbit period from the turning-point quadrature. Substituting
// eta = c + r sin(phi) with [c - r, c + r] the bracketing turning points
// removes both simple root singularities; the leftover quadratic factor of
// R is evaluated by deflation, so the integrand is smooth on [-pi/2, pi/2].
// Composite 16-point panels are doubled until two passes agree to 1e-10.
// Degenerate (zero-width) orbits return the linearised limit
// 2 pi / sqrt(1 + B0^2).
double period(double k1, double k2, double b0, double p2_seed);

// ---------------------------------------------------------------------------
// Traveling-wave profile ODE in the co-moving coordinate xi.
//
//   dPcal/dxi = sign * B0 sqrt(R) / (-D w + 2 B0^2 Pcal)
//
// The branch sign flips at turning points of R (handled by a local parabolic
// hop: near a simple root, sqrt(R) is linear in xi, so the touch point and
// the mirrored restart are computed analytically). Integration proceeds from
// xi = 0 in both directions until the requested span is covered or the
// denominator vanishes; the latter is reported, not thrown, because where it
// happens is a property of the wave, not a solver failure.
struct TravelingWave {
  double w = 0, k1 = 0, k2 = 2, b0 = 1;
  double p2_at_0 = 0;
  int branch_at_0 = 1;
  // sampled profile, ascending xi; dp2 is the profile slope at each sample,
  // evaluated from the chart (the exact right-hand side, not a difference)
  std::vector<double> xi;
  std::vector<double> p2;
  std::vector<double> dp2;
  // xi where the denominator vanished, if it did (leg with smaller |xi|
  // when both directions terminate)
  std::optional<double> terminated_at;
  std::optional<double> terminated_forward;
  std::optional<double> terminated_backward;
};

TravelingWave traveling_wave(double w, double k1, double k2, double b0,
                             std::pair<double, double> xi_range,
                             double p2_at_0 = 0.0, int branch_sign = 1);

// Variant with the denominator sign(R-branch)*sqrt(R) - D w, which vanishes
// where the longitudinal velocity of the underlying characteristic equals w
// (the transport resonance) instead of where the transverse velocity does.
// Kept alongside as a diagnostic; same driver, same reporting.
TravelingWave traveling_wave_longitudinal_resonance(double w, double k1, double k2, double b0,
                                                    std::pair<double, double> xi_range,
                                                    double p2_at_0 = 0.0, int branch_sign = 1);

// ---------------------------------------------------------------------------
// Periodic reference orbit: one full period of a single characteristic,
// stored densely, evaluated with wrap-around. Basis for every coefficient
// evaluator below.
class ReferenceOrbit {
 public:
  ReferenceOrbit() = default;
  ReferenceOrbit(double period, ode::DenseTrajectory<7> dense, double b0)
      : period_(period), b0_(b0), dense_(std::move(dense)) {}

  double period() const { return period_; }
  double b0() const { return b0_; }
  FieldState state(double theta) const;
  // callable view for APIs that take a plain evaluator
  std::function<FieldState(double)> evaluator() const;

 private:
  double period_ = 0;
  double b0_ = 1;
  ode::DenseTrajectory<7> dense_;
};

// Integrates the characteristic seeded at rho0 over exactly one period.
// The period comes from the turning-point quadrature when B0 != 0 and from
// a return-map fallback otherwise. Equilibrium seeds yield a constant orbit
// with the linearised period.
ReferenceOrbit reference_orbit(const InitialData& data, double rho0, const SimConfig& cfg);

// Return-map period: second direction-matched crossing of the initial
// E1 level (P1 level when the orbit starts at a V1 turning point).
double return_map_period(const InitialData& data, double rho0, const SimConfig& cfg);

// ---------------------------------------------------------------------------
// Derivative-variable reductions along a reference orbit.

// Projective derivative variables along an orbit (valid while p1 != 0):
//   u = e/p1, lambda = (e-1)/p1, sigma = p2/p1.
// Full three-variable system, no conservation law assumed:
//   du    = u^2 + B0 F1 u sigma - B0 F2 u - F2 sigma + F3
//   dlam  = lam (u + B0 F1 sigma - B0 F2)
//   dsig  = B0 F1 sigma^2 + u sigma - 2 B0 F2 sigma + B0 F3
std::array<double, 3> ulam_rhs(const std::array<double, 3>& uls, const FieldState& s,
                               double b0);

// Closed (u, lambda) form after eliminating sigma = B0 u + (C1 - B0) lambda:
//   du = (1 + B0^2 F1) u^2 + B0 (C1 - B0) F1 u l - 2 B0 F2 u - (C1 - B0) F2 l + F3
//   dl = (1 + B0^2 F1) u l + B0 (C1 - B0) F1 l^2 - B0 F2 l
std::array<double, 2> ulam_reduced_rhs(const std::array<double, 2>& ul, const FieldState& s,
                                       double b0, double c1);

// single-variable views of the full system, used on the e == 1 slice where
// C1 is undefined
double ulam_u_rhs(double u, double sigma, const FieldState& s, double b0);
double ulam_sigma_rhs(double u, double sigma, const FieldState& s, double b0);

// Recover (p1, p2, e) from (u, lambda) and the conserved C1.
DerivativeState invert_ulam(const std::array<double, 2>& ul, double b0, double c1);

// Linear system for eta1 = u/lambda = e/(e-1), eta2 = 1/lambda = p1/(e-1)
// (lambda never vanishes while p1 is finite):
//   d eta1 = -B0 F2 eta1 + F3 eta2 - (C1 - B0) F2
//   d eta2 = -(1 + B0^2 F1) eta1 + B0 F2 eta2 - B0 (C1 - B0) F1
// eta1 = e/(e-1), eta2 = p1/(e-1) map the physical branch e < 1 onto
// eta1 < 1. Finite-time blow-up of (p1, e) is the transversal crossing of
// eta1 through 1, where the inverse chart e = eta1/(eta1 - 1) has its pole;
// the linear eta flow itself continues smoothly through it. The secular
// estimate in floquet.hpp uses the affine per-period map of this system.
std::array<double, 2> q_linear_rhs(const std::array<double, 2>& eta, const FieldState& s,
                                   double b0, double c1);

// ---------------------------------------------------------------------------
// Hill reduction: scalar second-order normal forms for the derivative flow.
//
// F1 = (1+P1^2)/gamma^3, F2 = P1 P2/gamma^3, F3 = (1+P2^2)/gamma^3 along the
// orbit; M1 = 1 + B0^2 F1, M2 = B0 F2, M3 = F3. The normal-form potential
//
//   K = M1 M3 - M2^2 - M2' - (3/4) M1'^2/M1^2 + (M1'' + 2 M2 M1')/(2 M1)
//
// governs z'' + K z = 0 after the standard damping removal; N2 is the same
// object obtained through the q-linear route, N1 its inhomogeneity (zero
// when C1 = B0). All theta-derivatives are exact (second-order jets chained
// through the characteristic equations), not finite differences.
struct HillSample {
  double f1, f2, f3;
  double f1p, f2p, f3p;   // d/dtheta
  double f3pp;
  double m1, m2, m3;
  double m1p, m2p, m1pp;
  double g1, g2, g3, g3p;
  double n1, n2;
  double k;
};

class HillCoefficients {
 public:
  HillCoefficients() = default;
  HillCoefficients(std::function<FieldState(double)> orbit, double b0, double c1);

  HillSample at(double theta) const;
  double k(double theta) const { return at(theta).k; }
  double n1(double theta) const { return at(theta).n1; }
  double n2(double theta) const { return at(theta).n2; }
  double b0() const { return b0_; }
  double c1() const { return c1_; }

  // minimum of K over [0, period], sampled then locally refined
  double min_k(double period, int samples = 2048) const;

 private:
  std::function<FieldState(double)> orbit_;
  double b0_ = 1, c1_ = 1;
  double f3_at_0_ = 1;
};

HillCoefficients hill_coefficients(std::function<FieldState(double)> orbit,
                                   double b0, double c1);

// ---------------------------------------------------------------------------
// Constant-K2 linear reduction for y = 1/(p2 - B0):  dy/dtheta = L1 + L2 y.
// E1 enters through the manifold relation E1 = e1_sign sqrt(K2 - 2 gamma);
// the driver tracks the sign dynamically (flips where the radicand
// vanishes). P1 -> 0 is a pole of both coefficients.
std::pair<double, double> constant_k2_coefficients(const FieldState& s, double c1,
                                                   double b0, int e1_sign);
double constant_k2_linear_rhs(double y, const FieldState& s, double c1, double b0,
                              int e1_sign);
// s = p2 - B0 form, ds = -L1 s^2 - L2 s; s = 0 is a fixed point.
double constant_k2_s_rhs(double sval, const FieldState& s, double c1, double b0,
                         int e1_sign);

struct K2ReductionTrace {
  std::vector<double> theta;
  std::vector<double> y;
  std::vector<double> p2;              // reconstructed: B0 + 1/y
  std::optional<double> pole_theta;    // P1 crossed zero here (coefficient pole)
};

// Integrates the y equation along a reference orbit from theta = 0 up to
// t_end, stopping at a P1 = 0 coefficient pole if one is crossed first.
K2ReductionTrace integrate_constant_k2_reduction(const ReferenceOrbit& orbit, double y0,
                                                 double c1, int e1_sign, double t_end,
                                                 const SimConfig& cfg);

}  // namespace coldwave
