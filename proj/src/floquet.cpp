#include "coldwave/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coldwave/errors.hpp"
#include "coldwave/reductions.hpp"
#include "coldwave/rk45.hpp"

namespace coldwave {

MathieuParams mathieu_params(double eps, double b0) {
  MathieuParams mp;
  double w2 = 1.0 + b0 * b0;
  mp.omega = std::sqrt(w2);
  double s = 8.0 * b0 * b0 * w2 + 3.0;
  mp.a_hat = w2 - s / (4.0 * w2) * eps * eps;
  mp.b_hat = s / (8.0 * w2) * eps * eps;
  mp.a = mp.a_hat / w2;
  mp.b = mp.b_hat / w2;
  return mp;
}

double asymptotic_coshmupi(double eps, double b0) {
  double w2 = 1.0 + b0 * b0;
  double s = 8.0 * b0 * b0 * w2 + 3.0;
  double p = s / (w2 * w2);
  double e2 = eps * eps;
  return -1.0 - (M_PI * M_PI / 2048.0) * p * p * p * e2 * e2 * e2;
}

FloquetClass classify(double half_trace, double margin) {
  double a = std::fabs(half_trace);
  if (a < 1.0 - margin) return FloquetClass::Stable;
  if (a <= 1.0 + margin) return FloquetClass::MarginallyStable;
  return FloquetClass::Unstable;
}

Monodromy monodromy(const std::function<double(double)>& k, double period,
                    double rel_tol) {
  using S4 = ode::State<4>;
  auto rhs = [&](double t, const S4& y) -> S4 {
    double kv = k(t);
    return {y[1], -kv * y[0], y[3], -kv * y[2]};
  };
  S4 y0 = {1.0, 0.0, 0.0, 1.0};
  ode::SolveOptions<4> opt;
  opt.ctl.rel_tol = rel_tol;
  opt.ctl.abs_tol = rel_tol * 1e-2;
  auto sol = ode::solve<4>(rhs, y0, 0.0, period, opt);
  if (sol.status != ode::SolveStatus::ReachedEnd)
    throw StepSizeUnderflow(sol.t_final, "monodromy: integration stalled");
  Monodromy m;
  m.m11 = sol.y_final[0];
  m.m12 = sol.y_final[2];
  m.m21 = sol.y_final[1];
  m.m22 = sol.y_final[3];
  m.half_trace = 0.5 * (m.m11 + m.m22);
  m.wronskian = m.m11 * m.m22 - m.m12 * m.m21;
  return m;
}

double monodromy_coshmupi(const std::function<double(double)>& k, double period,
                          double rel_tol) {
  return monodromy(k, period, rel_tol).half_trace;
}

// ---------------------------------------------------------------------------

namespace {

SecularSeedEstimate secular_seed(const InitialData& data, const SimConfig& cfg,
                                 double rho0, int n_tau) {
  SecularSeedEstimate out;
  out.rho0 = rho0;
  FieldState s0 = data.state_at(rho0);
  DerivativeState d0 = data.deriv_at(rho0);
  if (std::fabs(d0.e - 1.0) < 1e-14)
    throw DomainError("secular_breaking_estimate: e = 1 at the seed, chart undefined");
  double b0 = data.B0;
  auto c1opt = c1_of(d0, b0);
  double c1 = c1opt ? *c1opt : b0;
  double cc = c1 - b0;

  double t_period;
  if (b0 != 0.0) {
    auto fi = first_integrals(s0, b0);
    t_period = period(fi.K1, fi.K2, b0, s0.P2);
  } else {
    t_period = return_map_period(data, rho0, cfg);
  }
  out.period = t_period;

  // fields + two fundamental eta columns + the particular (driven) solution
  using S9 = ode::State<9>;
  auto rhs = [&](double, const S9& y) -> S9 {
    FieldState s;
    s.P1 = y[0];
    s.P2 = y[1];
    s.E1 = y[2];
    auto [v1, v2] = velocities(s);
    double g = lorentz_gamma(s);
    double g3 = g * g * g;
    double f1 = (1.0 + s.P1 * s.P1) / g3;
    double f2 = s.P1 * s.P2 / g3;
    double f3 = (1.0 + s.P2 * s.P2) / g3;
    double m1 = 1.0 + b0 * b0 * f1;
    S9 dy;
    dy[0] = -s.E1 - b0 * v2;
    dy[1] = b0 * v1;
    dy[2] = v1;
    dy[3] = -b0 * f2 * y[3] + f3 * y[4];
    dy[4] = -m1 * y[3] + b0 * f2 * y[4];
    dy[5] = -b0 * f2 * y[5] + f3 * y[6];
    dy[6] = -m1 * y[5] + b0 * f2 * y[6];
    dy[7] = -b0 * f2 * y[7] + f3 * y[8] - cc * f2;
    dy[8] = -m1 * y[7] + b0 * f2 * y[8] - b0 * cc * f1;
    return dy;
  };
  S9 y0 = {s0.P1, s0.P2, s0.E1, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0};
  ode::SolveOptions<9> opt;
  opt.ctl.rel_tol = 1e-12;
  opt.ctl.abs_tol = 1e-14;
  ode::DenseTrajectory<9> dense;
  opt.on_step = [&](const ode::DenseStep<9>& ds) { dense.push(ds); };
  auto sol = ode::solve<9>(rhs, y0, 0.0, t_period, opt);
  if (sol.status != ode::SolveStatus::ReachedEnd)
    throw StepSizeUnderflow(sol.t_final, "secular_breaking_estimate: stalled");
  const auto& yf = sol.y_final;

  // per-period affine map eta -> Phi eta + v
  double phi11 = yf[3], phi12 = yf[5], phi21 = yf[4], phi22 = yf[6];
  out.phi_t = {phi11, phi12, phi21, phi22};
  out.drive = {yf[7], yf[8]};
  double s11 = phi11 - 1.0, s12 = phi12, s21 = phi21, s22 = phi22 - 1.0;
  out.s_norm = std::max(std::max(std::fabs(s11), std::fabs(s12)),
                        std::max(std::fabs(s21), std::fabs(s22)));
  double q11 = s11 * s11 + s12 * s21, q12 = s11 * s12 + s12 * s22;
  double q21 = s21 * s11 + s22 * s21, q22 = s21 * s12 + s22 * s22;
  out.s2_norm = std::max(std::max(std::fabs(q11), std::fabs(q12)),
                         std::max(std::fabs(q21), std::fabs(q22)));

  double eta0_1 = d0.e / (d0.e - 1.0);
  double eta0_2 = d0.p1 / (d0.e - 1.0);
  out.eta0 = {eta0_1, eta0_2};
  double se1 = s11 * eta0_1 + s12 * eta0_2;  // S eta0
  double se2 = s21 * eta0_1 + s22 * eta0_2;
  double sv1 = s11 * yf[7] + s12 * yf[8];  // S v
  double sv2 = s21 * yf[7] + s22 * yf[8];

  // eta(nT + tau) = Phi(tau) (eta0 + n S eta0 + n v + n(n-1)/2 S v) + eta_p(tau);
  // solve [.]_1 = 1 for the smallest n >= 0 on each tau, then minimise n T + tau
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_tau; ++i) {
    double tau = t_period * i / (n_tau - 1);
    auto yt = dense.eval(std::min(tau, dense.t_end()));
    double p11 = yt[3], p12 = yt[5];
    double a = p11 * eta0_1 + p12 * eta0_2 + yt[7];
    double bl = p11 * (se1 + yf[7] - 0.5 * sv1) + p12 * (se2 + yf[8] - 0.5 * sv2);
    double cq = 0.5 * (p11 * sv1 + p12 * sv2);
    double n = std::numeric_limits<double>::infinity();
    if (a >= 1.0) {
      n = 0.0;
    } else if (std::fabs(cq) < 1e-300) {
      if (bl > 0.0) n = (1.0 - a) / bl;
    } else {
      double disc = bl * bl - 4.0 * cq * (a - 1.0);
      if (disc >= 0.0) {
        double sq = std::sqrt(disc);
        double r1 = (-bl + sq) / (2.0 * cq), r2 = (-bl - sq) / (2.0 * cq);
        if (r1 > r2) std::swap(r1, r2);
        if (r1 >= 0.0)
          n = r1;
        else if (r2 >= 0.0)
          n = r2;
      }
    }
    if (std::isfinite(n)) best = std::min(best, n * t_period + tau);
  }
  out.theta_star = best;
  return out;
}

}  // namespace

SecularEstimate secular_breaking_estimate(const InitialData& data, const SimConfig& cfg,
                                          int n_seeds, int n_tau) {
  SecularEstimate est;
  est.theta_star = std::numeric_limits<double>::infinity();
  est.seeds.reserve(n_seeds);
  for (int i = 0; i < n_seeds; ++i) {
    double rho0 = data.domain_length * i / n_seeds;
    auto seed = secular_seed(data, cfg, rho0, n_tau);
    if (seed.theta_star < est.theta_star) {
      est.theta_star = seed.theta_star;
      est.rho_star = rho0;
    }
    est.seeds.push_back(std::move(seed));
  }
  return est;
}

std::vector<BreakingMapRow> breaking_map(const std::vector<double>& b0_values, double eps,
                                         int k, const SimConfig& cfg) {
  std::vector<BreakingMapRow> rows;
  rows.reserve(b0_values.size());
  for (double b0 : b0_values) {
    InitialData data = make_small_perturbation(eps, b0, k);
    SimConfig c = cfg;
    c.B0 = b0;
    auto est = secular_breaking_estimate(data, c);
    rows.push_back({b0, est.theta_star});
  }
  return rows;
}

}  // namespace coldwave
