#pragma once
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "coldwave/jet.hpp"

namespace coldwave {

// Lagrangian unknowns at time theta on one characteristic.
struct FieldState {
  double theta = 0;
  double rho = 0;
  double P1 = 0, P2 = 0, E1 = 0;
};

// Spatial derivatives riding along the characteristic.
struct DerivativeState {
  double p1 = 0, p2 = 0, e = 0;
};

struct FirstIntegrals {
  double K1 = 0;
  double K2 = 2;
  std::optional<double> C1;  // undefined when |e - 1| < 1e-14
};

double lorentz_gamma(double P1, double P2);
double lorentz_gamma(const FieldState& s);
std::pair<double, double> velocities(double P1, double P2);
std::pair<double, double> velocities(const FieldState& s);
FirstIntegrals first_integrals(const FieldState& s, double B0);
std::optional<double> c1_of(const DerivativeState& d, double B0);
double density(double e);

// Closed-form C^2 profile of one spatial variable. Built from expression
// combinators over Jet2 so value, slope and curvature are exact.
class Profile {
 public:
  using Fn = std::function<Jet2(double)>;

  Profile() : fn_(std::make_shared<Fn>([](double) { return Jet2{}; })) {}
  explicit Profile(Fn fn) : fn_(std::make_shared<Fn>(std::move(fn))) {}

  Jet2 jet(double rho) const { return (*fn_)(rho); }
  double value(double rho) const { return jet(rho).f; }
  double deriv(double rho) const { return jet(rho).d1; }
  double deriv2(double rho) const { return jet(rho).d2; }

  static Profile zero() { return Profile(); }
  static Profile constant(double c);
  static Profile linear(double slope, double intercept = 0);
  // amp * sin(k*rho + phase)
  static Profile sinusoid(double amp, double k, double phase = 0);
  static Profile apply(Profile p, std::function<Jet2(Jet2)> g);

  friend Profile operator+(Profile a, Profile b);
  friend Profile operator-(Profile a, Profile b);
  friend Profile operator*(Profile a, Profile b);
  friend Profile operator*(double c, Profile a);
  friend Profile operator+(Profile a, double c);

 private:
  std::shared_ptr<Fn> fn_;
};

enum class Family { General, ConstantK1, ConstantK2 };

// Periodic initial profiles plus the external field strength. Derivative
// evaluators come from the exact closed forms.
struct InitialData {
  double domain_length = 0;
  double B0 = 0;
  Family family = Family::General;
  Profile P1, P2, E1;

  FieldState state_at(double rho0) const;
  DerivativeState deriv_at(double rho0) const;
};

struct SimConfig {
  double B0 = 1.0;
  double horizon = 50.0;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double blowup_threshold = 1e6;
  int n_characteristics = 8;
  double epsilon = 0.1;
  // trace storage: keep every stride-th accepted step (1 = all)
  int sample_stride = 1;
  bool store_dense = true;

  void validate() const;  // throws ValidationError naming the violated bound
};

InitialData make_general(double L, double B0, Profile P1, Profile P2, Profile E1);
InitialData make_constant_k1(double L, double B0, Profile E1, Profile P1, double K1);
// P1 profile is sign * sqrt(((K2 - E1^2)/2)^2 - 1 - P2^2); rejects
// non-positive radicand on the validation grid and K2 < 2.
InitialData make_constant_k2(double L, double B0, Profile P2, Profile E1, double K2,
                             int sign);
// The built-in small-perturbation family:
//   P1 = eps cos(k rho), P2 = (eps B0/w) sin(k rho), E1 = (eps/w) sin(k rho),
// w = sqrt(1+B0^2). K1 vanishes identically; K2 varies at order eps^2.
InitialData make_small_perturbation(double eps, double B0, int k);
// Smooth profiles with K2 exactly constant and K1 = 0:
//   E1 = (eps/w) sin(k rho), P2 = B0 E1,
//   P1 = (E1m/2) cos(k rho) sqrt(x2 - E1^2),
// with E1m = eps/w, K2 = E1m^2 + 2 sqrt(1+B0^2 E1m^2), x2 = 2K2+4B0^2-E1m^2.
// The sign change of P1 across cos zeros keeps the data C^2 (the single-sign
// square-root branch of make_constant_k2 would kink there).
InitialData make_uniform_k2_wave(double eps, double B0, int k);
InitialData make_equilibrium(double B0);
// P2 = B0 rho, P1 = E1 = 0 (aperiodic; characteristic studies only).
InitialData make_linear_p2(double B0);

// checks the family's defining constancy on a 1024-point grid, tol 1e-12
void validate_family(const InitialData& data);

// Smoothness indicator of the nonrelativistic model evaluated at rho:
//   Delta = ((V1)')^2 + 2 E1' + 2 B0 (V2)' - B0^2 - 1.
// Negative everywhere <=> globally smooth. The data's momentum slots carry
// the velocities here.
double criterion_nonrel(const InitialData& data, double rho);

// Small-amplitude constant-K2 smoothness test on the initial derivatives:
// true iff 2e + 2 B0 p2 - 2 B0^2 - 1 < 0.
bool criterion_rel_smallamp(const DerivativeState& d, double B0);

}  // namespace coldwave
