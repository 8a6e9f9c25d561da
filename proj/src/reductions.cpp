#include "coldwave/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "coldwave/errors.hpp"
#include "coldwave/gauss_legendre.hpp"
#include "coldwave/jet.hpp"

namespace coldwave {

double p2_scalar_rhs(double p2, double k1, double k2, double b0, int branch_sign) {
  if (b0 == 0.0) throw DomainError("p2_scalar_rhs: B0 = 0 has no transverse reduction");
  if (k2 < 2.0) throw DomainError("p2_scalar_rhs: K2 < 2 is outside the physical manifold");
  double r = radicand(p2, k1, k2, b0);
  if (r < 0.0) throw DomainError("p2_scalar_rhs: R(P2) < 0, P2 outside the orbit band");
  double d = b0 * b0 * k2 - (p2 - k1) * (p2 - k1);
  if (d == 0.0) throw ZeroDenominator("p2_scalar_rhs: B0^2 K2 - (P2 - K1)^2 vanished");
  return branch_sign * b0 * std::sqrt(r) / d;
}

namespace {

// One bounded orbit band [lo, hi] of the radicand quartic together with the
// deflated quadratic factor: R(eta) = (eta - lo)(eta - hi) Q(eta), W = -Q >= 0
// on the band. Deflation is two synthetic divisions of the monic quartic.
struct OrbitBand {
  double lo = 0, hi = 0, c = 0, r = 0;
  bool degenerate = false;
  std::array<double, 3> q{};  // descending coefficients of Q

  double w_of(double eta) const { return -((q[0] * eta + q[1]) * eta + q[2]); }
  double eta_of(double phi) const { return c + r * std::sin(phi); }
};

OrbitBand orbit_band(double k1, double k2, double b0, double seed) {
  TurningPoints tp = turning_points(k1, k2, b0, seed);
  OrbitBand band;
  band.degenerate = tp.degenerate;
  band.lo = tp.p2_minus;
  band.hi = tp.p2_plus;
  band.c = 0.5 * (band.lo + band.hi);
  band.r = 0.5 * (band.hi - band.lo);
  if (!band.degenerate) {
    auto asc = radicand_coefficients(k1, k2, b0);
    double a[5] = {asc[4], asc[3], asc[2], asc[1], asc[0]};
    double bq[4];
    bq[0] = a[0];
    for (int i = 1; i < 4; ++i) bq[i] = a[i] + band.lo * bq[i - 1];
    band.q[0] = bq[0];
    for (int i = 1; i < 3; ++i) band.q[i] = bq[i] + band.hi * band.q[i - 1];
  }
  return band;
}

}  // namespace

std::vector<std::pair<double, double>> p2_scalar_orbit(double k1, double k2, double b0,
                                                       double p2_seed, int branch_sign,
                                                       double theta_end, int n_samples) {
  if (b0 == 0.0) throw DomainError("p2_scalar_orbit: B0 = 0 has no transverse reduction");
  if (n_samples < 2) throw ValidationError("p2_scalar_orbit: need at least two samples");
  OrbitBand band = orbit_band(k1, k2, b0, p2_seed);
  std::vector<std::pair<double, double>> out;
  out.reserve(n_samples);
  if (band.degenerate) {
    for (int i = 0; i < n_samples; ++i)
      out.emplace_back(theta_end * i / (n_samples - 1), band.c);
    return out;
  }
  double arg = std::clamp((p2_seed - band.c) / band.r, -1.0, 1.0);
  double phi0 = std::asin(arg);
  if (branch_sign < 0) phi0 = M_PI - phi0;

  auto rhs = [&](double, const ode::State<1>& y) -> ode::State<1> {
    double eta = band.eta_of(y[0]);
    double d = b0 * b0 * k2 - (eta - k1) * (eta - k1);
    return {b0 * std::sqrt(std::max(band.w_of(eta), 0.0)) / d};
  };
  ode::SolveOptions<1> opt;
  opt.ctl.rel_tol = 1e-12;
  opt.ctl.abs_tol = 1e-14;
  ode::DenseTrajectory<1> dense;
  opt.on_step = [&](const ode::DenseStep<1>& ds) { dense.push(ds); };
  auto sol = ode::solve<1>(rhs, {phi0}, 0.0, theta_end, std::move(opt));
  if (sol.status != ode::SolveStatus::ReachedEnd)
    throw DomainError("p2_scalar_orbit: integration of the angle chart failed");
  for (int i = 0; i < n_samples; ++i) {
    double th = theta_end * i / (n_samples - 1);
    double phi = (i == 0) ? phi0 : dense.eval(std::min(th, dense.t_end()))[0];
    out.emplace_back(th, band.eta_of(phi));
  }
  return out;
}

double period(double k1, double k2, double b0, double p2_seed) {
  if (b0 == 0.0)
    throw DomainError("period: B0 = 0 has no turning-point quadrature, use the return map");
  OrbitBand band = orbit_band(k1, k2, b0, p2_seed);
  if (band.degenerate) return 2.0 * M_PI / std::sqrt(1.0 + b0 * b0);
  static const auto gl = gauss_legendre(16);
  auto integrand = [&](double phi) {
    double eta = band.eta_of(phi);
    double w = std::max(band.w_of(eta), 1e-300);
    double d = b0 * b0 * k2 - (eta - k1) * (eta - k1);
    return d / std::sqrt(w);
  };
  double prev = 0.0;
  for (int m = 1; m <= 4096; m *= 2) {
    double h = M_PI / m;
    double total = 0.0;
    for (int p = 0; p < m; ++p) {
      double mid = -0.5 * M_PI + (p + 0.5) * h;
      for (std::size_t i = 0; i < gl.first.size(); ++i)
        total += gl.second[i] * integrand(mid + 0.5 * h * gl.first[i]);
    }
    total *= 0.5 * h * 2.0 / b0;
    if (m > 1 && std::fabs(total - prev) < 1e-10) return total;
    prev = total;
  }
  return prev;
}

// ---------------------------------------------------------------------------
// Traveling-wave driver. The profile is integrated in the uniformising angle
// phi with P2 = c + r sin(phi): sqrt(R) = r cos(phi) sqrt(W) with the branch
// carried by the sign of cos(phi), so turning points are smooth interior
// points of the chart and the only remaining event is the denominator zero.
// dxi/dphi = den / (B0 sqrt(W)); a denominator zero is a vertical tangent of
// the profile, past which P2(xi) would fold back, so the leg ends there.
namespace {

using DenFn = std::function<double(double eta, double signed_sqrt_r)>;

struct WaveLeg {
  std::vector<double> xi, p2, dp2;
  std::optional<double> terminated;
};

WaveLeg wave_leg(const OrbitBand& band, double b0, const DenFn& den, double phi0,
                 double xi_target, int leg_sign) {
  WaveLeg out;
  if (leg_sign > 0 ? xi_target <= 0.0 : xi_target >= 0.0) return out;
  auto sr_of = [&](double phi) {
    double eta = band.eta_of(phi);
    return band.r * std::cos(phi) * std::sqrt(std::max(band.w_of(eta), 0.0));
  };
  auto den_at = [&](double phi) { return den(band.eta_of(phi), sr_of(phi)); };
  if (std::fabs(den_at(phi0)) < 1e-12) {
    out.terminated = 0.0;
    return out;
  }
  // phi direction that advances xi toward the target
  double dir = (den_at(phi0) * leg_sign > 0) ? 1.0 : -1.0;
  auto rhs = [&](double s, const ode::State<1>&) -> ode::State<1> {
    double phi = phi0 + dir * s;
    double eta = band.eta_of(phi);
    double w = std::max(band.w_of(eta), 1e-300);
    return {dir * den(eta, band.r * std::cos(phi) * std::sqrt(w)) / (b0 * std::sqrt(w))};
  };
  ode::SolveOptions<1> opt;
  opt.ctl.rel_tol = 1e-12;
  opt.ctl.abs_tol = 1e-14;
  opt.events.push_back(
      [&](double s, const ode::State<1>&) { return den_at(phi0 + dir * s); });
  opt.events.push_back([&](double, const ode::State<1>& y) { return y[0] - xi_target; });
  std::vector<ode::DenseStep<1>> steps;
  opt.on_step = [&](const ode::DenseStep<1>& ds) { steps.push_back(ds); };
  auto sol = ode::solve<1>(rhs, {0.0}, 0.0, 1e5, opt);
  double s_end = sol.t_final;
  if (sol.status == ode::SolveStatus::EventLocated && sol.event_index == 0)
    out.terminated = sol.y_final[0];
  // sample the dense steps, clamped at the located end; the slope comes from
  // the chart: dP2/dxi = B0 * signed sqrt(R) / den, exact at the sample
  auto push_sample = [&](double xi_v, double s) {
    double phi = phi0 + dir * s;
    double sr = sr_of(phi);
    out.xi.push_back(xi_v);
    out.p2.push_back(band.eta_of(phi));
    double d = den(band.eta_of(phi), sr);
    out.dp2.push_back(d != 0.0 ? b0 * sr / d : 0.0);
  };
  for (const auto& ds : steps) {
    int nsub = 8;
    for (int i = 1; i <= nsub; ++i) {
      double s = ds.t0 + ds.h * i / nsub;
      if (s > s_end) break;
      push_sample(ds.eval(s)[0], s);
    }
  }
  if (sol.status == ode::SolveStatus::EventLocated)
    push_sample(sol.y_final[0], s_end);
  return out;
}

TravelingWave wave_driver(double w, double k1, double k2, double b0,
                          std::pair<double, double> xi_range, double p2_at_0,
                          int branch_sign, bool longitudinal) {
  if (b0 == 0.0) throw DomainError("traveling_wave: B0 = 0 has no scalar reduction");
  if (xi_range.first > 0.0 || xi_range.second < 0.0)
    throw ValidationError("traveling_wave: xi range must contain 0");
  if (radicand(p2_at_0, k1, k2, b0) < 0.0)
    throw DomainError("traveling_wave: R(P2) < 0 at xi = 0");
  TravelingWave tw;
  tw.w = w;
  tw.k1 = k1;
  tw.k2 = k2;
  tw.b0 = b0;
  tw.p2_at_0 = p2_at_0;
  tw.branch_at_0 = branch_sign;

  auto dfield = [k1, k2, b0](double eta) { return b0 * b0 * k2 - (eta - k1) * (eta - k1); };
  DenFn den;
  if (longitudinal)
    den = [dfield, w](double eta, double sr) { return sr - dfield(eta) * w; };
  else
    den = [dfield, w, b0](double eta, double sr) {
      (void)sr;
      return -dfield(eta) * w + 2.0 * b0 * b0 * eta;
    };

  OrbitBand band = orbit_band(k1, k2, b0, p2_at_0);
  if (band.degenerate) {
    // point orbit: the profile is flat
    tw.xi = {xi_range.first, 0.0, xi_range.second};
    tw.p2 = {band.c, band.c, band.c};
    tw.dp2 = {0.0, 0.0, 0.0};
    if (std::fabs(den(band.c, 0.0)) < 1e-12) tw.terminated_at = 0.0;
    return tw;
  }

  double arg = std::clamp((p2_at_0 - band.c) / band.r, -1.0, 1.0);
  double phi0 = std::asin(arg);
  if (branch_sign < 0) phi0 = M_PI - phi0;

  WaveLeg fwd = wave_leg(band, b0, den, phi0, xi_range.second, +1);
  WaveLeg bwd = wave_leg(band, b0, den, phi0, xi_range.first, -1);

  tw.xi.reserve(fwd.xi.size() + bwd.xi.size() + 1);
  for (std::size_t i = bwd.xi.size(); i-- > 0;) {
    tw.xi.push_back(bwd.xi[i]);
    tw.p2.push_back(bwd.p2[i]);
    tw.dp2.push_back(bwd.dp2[i]);
  }
  {
    double sr0 = band.r * std::cos(phi0) *
                 std::sqrt(std::max(band.w_of(band.eta_of(phi0)), 0.0));
    double d0 = den(band.eta_of(phi0), sr0);
    tw.xi.push_back(0.0);
    tw.p2.push_back(p2_at_0);
    tw.dp2.push_back(d0 != 0.0 ? b0 * sr0 / d0 : 0.0);
  }
  for (std::size_t i = 0; i < fwd.xi.size(); ++i) {
    tw.xi.push_back(fwd.xi[i]);
    tw.p2.push_back(fwd.p2[i]);
    tw.dp2.push_back(fwd.dp2[i]);
  }
  tw.terminated_forward = fwd.terminated;
  tw.terminated_backward = bwd.terminated;
  if (fwd.terminated && bwd.terminated)
    tw.terminated_at = std::fabs(*fwd.terminated) <= std::fabs(*bwd.terminated)
                           ? *fwd.terminated
                           : *bwd.terminated;
  else if (fwd.terminated)
    tw.terminated_at = *fwd.terminated;
  else if (bwd.terminated)
    tw.terminated_at = *bwd.terminated;
  return tw;
}

}  // namespace

TravelingWave traveling_wave(double w, double k1, double k2, double b0,
                             std::pair<double, double> xi_range, double p2_at_0,
                             int branch_sign) {
  return wave_driver(w, k1, k2, b0, xi_range, p2_at_0, branch_sign, false);
}

TravelingWave traveling_wave_longitudinal_resonance(double w, double k1, double k2,
                                                    double b0,
                                                    std::pair<double, double> xi_range,
                                                    double p2_at_0, int branch_sign) {
  return wave_driver(w, k1, k2, b0, xi_range, p2_at_0, branch_sign, true);
}

// ---------------------------------------------------------------------------

FieldState ReferenceOrbit::state(double theta) const {
  double t = theta;
  if (period_ > 0.0) {
    t = std::fmod(theta, period_);
    if (t < 0.0) t += period_;
  }
  t = std::clamp(t, dense_.t_begin(), dense_.t_end());
  auto y = dense_.eval(t);
  FieldState s;
  s.theta = theta;
  s.rho = y[3];
  s.P1 = y[0];
  s.P2 = y[1];
  s.E1 = y[2];
  return s;
}

std::function<FieldState(double)> ReferenceOrbit::evaluator() const {
  auto self = std::make_shared<ReferenceOrbit>(*this);
  return [self](double theta) { return self->state(theta); };
}

double return_map_period(const InitialData& data, double rho0, const SimConfig& cfg) {
  FieldState s0 = data.state_at(rho0);
  double b0 = data.B0;
  auto [v1, v2] = velocities(s0);
  double dp1_0 = -s0.E1 - b0 * v2;
  if (std::fabs(v1) < 1e-12 && std::fabs(dp1_0) < 1e-12)
    return 2.0 * M_PI / std::sqrt(1.0 + b0 * b0);
  // section: the E1 level when transversal there, else the P1 level
  bool use_e1 = std::fabs(v1) > 1e-9;
  double sign0 = use_e1 ? v1 : dp1_0;
  CharState y = {s0.P1, s0.P2, s0.E1, rho0, 0.0, 0.0, 0.0};
  auto rhs = [&](double, const CharState& st) { return char_rhs_rel(st, b0); };
  double t_accum = 0.0;
  double guard = 400.0;
  for (int pass = 0; pass < 12; ++pass) {
    ode::SolveOptions<7> opt;
    opt.ctl.rel_tol = std::min(cfg.rel_tol, 1e-12);
    opt.ctl.abs_tol = std::min(cfg.abs_tol, 1e-14);
    opt.events.push_back([&](double, const CharState& st) {
      return use_e1 ? st[2] - s0.E1 : st[0] - s0.P1;
    });
    auto sol = ode::solve<7>(rhs, y, 0.0, guard, opt);
    if (sol.status != ode::SolveStatus::EventLocated)
      throw DomainError("return_map_period: no section return within the horizon");
    t_accum += sol.t_final;
    y = sol.y_final;
    FieldState sc;
    sc.theta = t_accum;
    sc.rho = y[3];
    sc.P1 = y[0];
    sc.P2 = y[1];
    sc.E1 = y[2];
    auto [w1, w2] = velocities(sc);
    double der = use_e1 ? w1 : (-sc.E1 - b0 * w2);
    if (der * sign0 > 0.0) return t_accum;
  }
  throw DomainError("return_map_period: direction-matched return not found");
}

ReferenceOrbit reference_orbit(const InitialData& data, double rho0, const SimConfig& cfg) {
  FieldState s0 = data.state_at(rho0);
  double t_period;
  if (data.B0 != 0.0) {
    auto k = first_integrals(s0, data.B0);
    t_period = period(k.K1, k.K2, data.B0, s0.P2);
  } else {
    t_period = return_map_period(data, rho0, cfg);
  }
  CharState y0 = {s0.P1, s0.P2, s0.E1, rho0, 0.0, 0.0, 0.0};
  ode::SolveOptions<7> opt;
  opt.ctl.rel_tol = std::min(cfg.rel_tol, 1e-12);
  opt.ctl.abs_tol = std::min(cfg.abs_tol, 1e-14);
  ode::DenseTrajectory<7> dense;
  opt.on_step = [&](const ode::DenseStep<7>& ds) { dense.push(ds); };
  auto rhs = [&](double, const CharState& st) { return char_rhs_rel(st, data.B0); };
  auto sol = ode::solve<7>(rhs, y0, 0.0, t_period, opt);
  if (sol.status != ode::SolveStatus::ReachedEnd)
    throw StepSizeUnderflow(sol.t_final, "reference_orbit: failed before one period");
  return ReferenceOrbit(t_period, std::move(dense), data.B0);
}

// ---------------------------------------------------------------------------

namespace {
struct FCoeffs {
  double f1, f2, f3;
};
FCoeffs f_coeffs(const FieldState& s) {
  double g = lorentz_gamma(s);
  double g3 = g * g * g;
  return {(1.0 + s.P1 * s.P1) / g3, s.P1 * s.P2 / g3, (1.0 + s.P2 * s.P2) / g3};
}
}  // namespace

std::array<double, 3> ulam_rhs(const std::array<double, 3>& uls, const FieldState& s,
                               double b0) {
  auto [f1, f2, f3] = f_coeffs(s);
  double u = uls[0], l = uls[1], sig = uls[2];
  return {u * u + b0 * f1 * u * sig - b0 * f2 * u - f2 * sig + f3,
          l * (u + b0 * f1 * sig - b0 * f2),
          b0 * f1 * sig * sig + u * sig - 2.0 * b0 * f2 * sig + b0 * f3};
}

std::array<double, 2> ulam_reduced_rhs(const std::array<double, 2>& ul, const FieldState& s,
                                       double b0, double c1) {
  auto [f1, f2, f3] = f_coeffs(s);
  double u = ul[0], l = ul[1];
  double m1 = 1.0 + b0 * b0 * f1;
  double cc = c1 - b0;
  return {m1 * u * u + b0 * cc * f1 * u * l - 2.0 * b0 * f2 * u - cc * f2 * l + f3,
          m1 * u * l + b0 * cc * f1 * l * l - b0 * f2 * l};
}

double ulam_u_rhs(double u, double sigma, const FieldState& s, double b0) {
  auto [f1, f2, f3] = f_coeffs(s);
  return u * u + b0 * f1 * u * sigma - b0 * f2 * u - f2 * sigma + f3;
}

double ulam_sigma_rhs(double u, double sigma, const FieldState& s, double b0) {
  auto [f1, f2, f3] = f_coeffs(s);
  return b0 * f1 * sigma * sigma + u * sigma - 2.0 * b0 * f2 * sigma + b0 * f3;
}

DerivativeState invert_ulam(const std::array<double, 2>& ul, double b0, double c1) {
  double d = ul[0] - ul[1];
  if (d == 0.0) throw ZeroDenominator("invert_ulam: u = lambda is the e = 1 slice");
  DerivativeState out;
  out.e = ul[0] / d;
  out.p1 = 1.0 / d;
  out.p2 = b0 + c1 * ul[1] / d;
  return out;
}

std::array<double, 2> q_linear_rhs(const std::array<double, 2>& eta, const FieldState& s,
                                   double b0, double c1) {
  auto [f1, f2, f3] = f_coeffs(s);
  double cc = c1 - b0;
  return {-b0 * f2 * eta[0] + f3 * eta[1] - cc * f2,
          -(1.0 + b0 * b0 * f1) * eta[0] + b0 * f2 * eta[1] - b0 * cc * f1};
}

// ---------------------------------------------------------------------------

HillCoefficients::HillCoefficients(std::function<FieldState(double)> orbit, double b0,
                                   double c1)
    : orbit_(std::move(orbit)), b0_(b0), c1_(c1) {
  FieldState s = orbit_(0.0);
  f3_at_0_ = f_coeffs(s).f3;
}

HillCoefficients hill_coefficients(std::function<FieldState(double)> orbit, double b0,
                                   double c1) {
  return HillCoefficients(std::move(orbit), b0, c1);
}

HillSample HillCoefficients::at(double theta) const {
  FieldState s = orbit_(theta);
  double b0 = b0_;
  auto [v1, v2] = velocities(s);
  double g = lorentz_gamma(s);
  // exact theta-jets of P1, P2 through the characteristic equations
  double dp1 = -s.E1 - b0 * v2;
  double dp2 = b0 * v1;
  double gd = (s.P1 * dp1 + s.P2 * dp2) / g;
  double dv1 = (dp1 * g - s.P1 * gd) / (g * g);
  double dv2 = (dp2 * g - s.P2 * gd) / (g * g);
  double ddp1 = -v1 - b0 * dv2;  // dE1/dtheta = V1
  double ddp2 = b0 * dv1;
  Jet2 p1{s.P1, dp1, ddp1};
  Jet2 p2{s.P2, dp2, ddp2};
  Jet2 g3 = powi(sqrt(1.0 + p1 * p1 + p2 * p2), 3);
  Jet2 f1 = (1.0 + p1 * p1) / g3;
  Jet2 f2 = (p1 * p2) / g3;
  Jet2 f3 = (1.0 + p2 * p2) / g3;
  Jet2 m1 = 1.0 + b0 * b0 * f1;
  Jet2 m2 = b0 * f2;

  HillSample h;
  h.f1 = f1.f;
  h.f2 = f2.f;
  h.f3 = f3.f;
  h.f1p = f1.d1;
  h.f2p = f2.d1;
  h.f3p = f3.d1;
  h.f3pp = f3.d2;
  h.m1 = m1.f;
  h.m2 = m2.f;
  h.m3 = f3.f;
  h.m1p = m1.d1;
  h.m2p = m2.d1;
  h.m1pp = m1.d2;
  h.k = h.m1 * h.m3 - h.m2 * h.m2 - h.m2p - 0.75 * h.m1p * h.m1p / (h.m1 * h.m1) +
        (h.m1pp + 2.0 * h.m2 * h.m1p) / (2.0 * h.m1);
  double cc = c1_ - b0;
  double f3r = f3.d1 / f3.f;
  h.g1 = cc * (f2.d1 - b0 * f2.f * f2.f + b0 * f1.f * f3.f - f2.f * f3r);
  h.g2 = f3.f * (1.0 + b0 * b0 * f1.f) - b0 * b0 * f2.f * f2.f + b0 * f2.d1 -
         b0 * f2.f * f3r;
  h.g3 = -f3r;
  h.g3p = -f3.d2 / f3.f + f3r * f3r;
  h.n1 = h.g1 * std::sqrt(f3_at_0_ / f3.f);
  h.n2 = h.g2 - 0.25 * h.g3 * h.g3 - 0.5 * h.g3p;
  return h;
}

double HillCoefficients::min_k(double period, int samples) const {
  double best = std::numeric_limits<double>::infinity();
  double bt = 0.0;
  for (int i = 0; i <= samples; ++i) {
    double t = period * i / samples;
    double v = k(t);
    if (v < best) {
      best = v;
      bt = t;
    }
  }
  double lo = bt - period / samples, hi = bt + period / samples;
  for (int it = 0; it < 100; ++it) {
    double ma = lo + (hi - lo) / 3.0, mb = hi - (hi - lo) / 3.0;
    if (k(ma) <= k(mb))
      hi = mb;
    else
      lo = ma;
  }
  return std::min(best, k(0.5 * (lo + hi)));
}

// ---------------------------------------------------------------------------

std::pair<double, double> constant_k2_coefficients(const FieldState& s, double c1,
                                                   double b0, int e1_sign) {
  if (s.P1 == 0.0)
    throw ZeroDenominator("constant_k2_coefficients: P1 = 0 is a coefficient pole");
  if (c1 == 0.0) throw ZeroDenominator("constant_k2_coefficients: C1 = 0");
  double g = lorentz_gamma(s);
  double k2 = 2.0 * g + s.E1 * s.E1;
  double e1 = e1_sign * std::sqrt(std::max(k2 - 2.0 * g, 0.0));
  double g3 = g * g * g;
  double q = 1.0 + s.P2 * s.P2;
  double l1 = -q * (e1 * g + c1 * s.P2) / (c1 * g3 * s.P1) - s.P1 * s.P2 / g3;
  double l2 = -q * (e1 * g + s.P2) / (g3 * s.P1) - b0 * s.P1 * s.P2 / g3;
  return {l1, l2};
}

double constant_k2_linear_rhs(double y, const FieldState& s, double c1, double b0,
                              int e1_sign) {
  auto [l1, l2] = constant_k2_coefficients(s, c1, b0, e1_sign);
  return l1 + l2 * y;
}

double constant_k2_s_rhs(double sval, const FieldState& s, double c1, double b0,
                         int e1_sign) {
  auto [l1, l2] = constant_k2_coefficients(s, c1, b0, e1_sign);
  return -l1 * sval * sval - l2 * sval;
}

K2ReductionTrace integrate_constant_k2_reduction(const ReferenceOrbit& orbit, double y0,
                                                 double c1, int e1_sign, double t_end,
                                                 const SimConfig& cfg) {
  if (!std::isfinite(y0))
    throw ValidationError("integrate_constant_k2_reduction: y0 must be finite");
  double b0 = orbit.b0();

  // locate the first coefficient pole (P1 = 0) before t_end, if any; the
  // integration is subdivided there and the crossing reported
  std::optional<double> t_pole;
  {
    int nscan = 4096;
    double prev = orbit.state(0.0).P1;
    if (prev == 0.0)
      throw ZeroDenominator("integrate_constant_k2_reduction: P1(0) = 0");
    for (int i = 1; i <= nscan; ++i) {
      double t = t_end * i / nscan;
      double cur = orbit.state(t).P1;
      if (cur == 0.0 || cur * prev < 0.0) {
        double lo = t_end * (i - 1) / nscan, hi = t;
        for (int it = 0; it < 100; ++it) {
          double mid = 0.5 * (lo + hi);
          double v = orbit.state(mid).P1;
          if (v == 0.0 || v * prev < 0.0)
            hi = mid;
          else
            lo = mid;
        }
        t_pole = 0.5 * (lo + hi);
        break;
      }
      prev = cur;
    }
  }
  double t_stop = t_pole ? *t_pole - 1e-6 * std::max(1.0, orbit.period()) : t_end;
  if (t_stop <= 0.0)
    throw ZeroDenominator("integrate_constant_k2_reduction: pole at the start");

  auto rhs = [&](double t, const ode::State<1>& y) -> ode::State<1> {
    FieldState s = orbit.state(t);
    int sg = s.E1 > 1e-12 ? 1 : (s.E1 < -1e-12 ? -1 : e1_sign);
    auto [l1, l2] = constant_k2_coefficients(s, c1, b0, sg);
    return {l1 + l2 * y[0]};
  };
  K2ReductionTrace tr;
  tr.theta.push_back(0.0);
  tr.y.push_back(y0);
  tr.p2.push_back(b0 + 1.0 / y0);
  ode::SolveOptions<1> opt;
  opt.ctl.rel_tol = cfg.rel_tol;
  opt.ctl.abs_tol = cfg.abs_tol;
  opt.on_step = [&](const ode::DenseStep<1>& ds) {
    double te = ds.t0 + ds.h;
    double yv = ds.eval(te)[0];
    tr.theta.push_back(te);
    tr.y.push_back(yv);
    tr.p2.push_back(b0 + 1.0 / yv);
  };
  auto sol = ode::solve<1>(rhs, {y0}, 0.0, t_stop, opt);
  if (sol.status != ode::SolveStatus::ReachedEnd)
    throw StepSizeUnderflow(sol.t_final, "integrate_constant_k2_reduction: solver stalled");
  tr.pole_theta = t_pole;
  return tr;
}

}  // namespace coldwave
