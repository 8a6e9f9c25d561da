#include "coldwave/characteristics.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "coldwave/errors.hpp"

namespace coldwave {

std::array<double, 4> rhs_rel(const FieldState& s, double B0) {
  auto [V1, V2] = velocities(s.P1, s.P2);
  return {-s.E1 - B0 * V2, B0 * V1, V1, V1};
}

std::array<double, 3> rhs_rel_extended(const FieldState& s, const DerivativeState& d,
                                       double B0) {
  double g = lorentz_gamma(s.P1, s.P2);
  double g3 = g * g * g;
  double mix = (d.p1 * s.P1 + d.p2 * s.P2) / g3;
  double vq1 = d.p1 / g - s.P1 * mix;
  double vq2 = d.p2 / g - s.P2 * mix;
  return {-vq1 * d.p1 - B0 * vq2 - d.e, -vq1 * d.p2 + B0 * vq1, (1.0 - d.e) * vq1};
}

std::array<double, 4> rhs_nonrel(const FieldState& s, double B0) {
  double V1 = s.P1, V2 = s.P2;  // velocity variables live in the momentum slots
  return {-s.E1 - B0 * V2, B0 * V1, V1, V1};
}

std::array<double, 3> rhs_nonrel_extended(const DerivativeState& d, double B0) {
  return {-d.p1 * d.p1 - B0 * d.p2 - d.e, (B0 - d.p2) * d.p1, (1.0 - d.e) * d.p1};
}

CharState char_rhs_rel(const CharState& y, double B0) {
  FieldState s{0, y[3], y[0], y[1], y[2]};
  DerivativeState d{y[4], y[5], y[6]};
  auto fs = rhs_rel(s, B0);
  auto fd = rhs_rel_extended(s, d, B0);
  return {fs[0], fs[1], fs[2], fs[3], fd[0], fd[1], fd[2]};
}

CharState char_rhs_nonrel(const CharState& y, double B0) {
  FieldState s{0, y[3], y[0], y[1], y[2]};
  DerivativeState d{y[4], y[5], y[6]};
  auto fs = rhs_nonrel(s, B0);
  auto fd = rhs_nonrel_extended(d, B0);
  return {fs[0], fs[1], fs[2], fs[3], fd[0], fd[1], fd[2]};
}

namespace {

double deriv_mag(const CharState& y) {
  return std::max({std::fabs(y[4]), std::fabs(y[5]), std::fabs(y[6])});
}

char trigger_component(const CharState& y) {
  double a1 = std::fabs(y[4]), a2 = std::fabs(y[5]), ae = std::fabs(y[6]);
  if (a1 >= a2 && a1 >= ae) return '1';
  if (a2 >= a1 && a2 >= ae) return '2';
  return 'e';
}

// Fit A(theta) ~ c/(theta* - theta) over the trailing growth decade:
// 1/A is linear in theta; theta* is the root of the least-squares line.
std::optional<double> reciprocal_extrapolation(const std::vector<double>& th,
                                               const std::vector<double>& amp) {
  if (th.size() < 4) return std::nullopt;
  double peak = amp.back();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < th.size(); ++i) {
    if (amp[i] < peak / 10 || amp[i] <= 0) continue;
    double x = th[i], y = 1.0 / amp[i];
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++n;
  }
  if (n < 4) return std::nullopt;
  double det = n * sxx - sx * sx;
  if (det == 0) return std::nullopt;
  double slope = (n * sxy - sx * sy) / det;
  double icept = (sy * sxx - sx * sxy) / det;
  if (slope >= 0) return std::nullopt;  // not blowing up
  return -icept / slope;
}

}  // namespace

CharacteristicTrace integrate_characteristic(const InitialData& data, double rho0,
                                             const SimConfig& cfg, bool relativistic) {
  cfg.validate();
  CharacteristicTrace tr;
  tr.rho0 = rho0;
  tr.relativistic = relativistic;

  FieldState s0 = data.state_at(rho0);
  DerivativeState d0 = data.deriv_at(rho0);
  CharState y0{s0.P1, s0.P2, s0.E1, rho0, d0.p1, d0.p2, d0.e};

  double B0 = data.B0;
  FirstIntegrals fi0 = first_integrals(s0, B0);
  tr.C1 = c1_of(d0, B0);

  // amplitude history for the blow-up extrapolation
  std::vector<double> amp_t, amp_v;
  long step_count = 0;

  auto record = [&](double th, const CharState& y) {
    FieldState s{th, y[3], y[0], y[1], y[2]};
    DerivativeState d{y[4], y[5], y[6]};
    FirstIntegrals fi = first_integrals(s, B0);
    if (relativistic) {
      tr.drift_K1 = std::max(tr.drift_K1, std::fabs(fi.K1 - fi0.K1));
      tr.drift_K2 = std::max(tr.drift_K2, std::fabs(fi.K2 - fi0.K2));
      if (tr.C1 && std::fabs(d.e - 1.0) >= 1e-14) {
        auto c1 = c1_of(d, B0);
        if (c1) tr.drift_C1 = std::max(tr.drift_C1, std::fabs(*c1 - *tr.C1));
      }
    }
    if (step_count % cfg.sample_stride == 0)
      tr.samples.push_back({th, s, d});
    double a = std::max({std::fabs(d.p1), std::fabs(d.p2), std::fabs(d.e)});
    if (a >= cfg.blowup_threshold / 1e4) {
      amp_t.push_back(th);
      amp_v.push_back(a);
    }
    ++step_count;
  };
  record(0.0, y0);

  ode::SolveOptions<7> opt;
  opt.ctl.rel_tol = cfg.rel_tol;
  opt.ctl.abs_tol = cfg.abs_tol;
  opt.events.push_back([&cfg](double, const CharState& y) {
    return deriv_mag(y) - cfg.blowup_threshold;
  });
  opt.on_step = [&](const ode::DenseStep<7>& ds) {
    if (cfg.store_dense) tr.dense.push(ds);
    record(ds.t0 + ds.h, ds.eval(ds.t0 + ds.h));
  };

  auto rhs = [&](double, const CharState& y) {
    return relativistic ? char_rhs_rel(y, B0) : char_rhs_nonrel(y, B0);
  };
  auto sol = ode::solve<7>(rhs, y0, 0.0, cfg.horizon, std::move(opt));

  if (sol.status == ode::SolveStatus::EventLocated) {
    tr.breaking_time = sol.t_final;
    tr.trigger = trigger_component(sol.y_final);
    // make the last stored sample the located crossing
    FieldState s{sol.t_final, sol.y_final[3], sol.y_final[0], sol.y_final[1],
                 sol.y_final[2]};
    DerivativeState d{sol.y_final[4], sol.y_final[5], sol.y_final[6]};
    if (!tr.samples.empty() && tr.samples.back().theta > sol.t_final)
      tr.samples.back() = {sol.t_final, s, d};
    else
      tr.samples.push_back({sol.t_final, s, d});
    tr.extrapolated_blowup = reciprocal_extrapolation(amp_t, amp_v);
  } else if (sol.status == ode::SolveStatus::StepSizeUnderflow) {
    tr.underflow = true;
    tr.extrapolated_blowup = reciprocal_extrapolation(amp_t, amp_v);
    // an explicit integrator dying within 1e-8 of the extrapolated singular
    // time is the singularity, not a solver defect
    if (tr.extrapolated_blowup &&
        std::fabs(*tr.extrapolated_blowup - sol.t_final) <= 1e-8) {
      tr.breaking_time = sol.t_final;
      tr.suspected_breaking = true;
      tr.trigger = trigger_component(sol.y_final);
    }
  }
  return tr;
}

std::optional<double> breaking_time(const CharacteristicTrace& trace) {
  return trace.breaking_time;
}

std::vector<CharacteristicTrace> ensemble(const InitialData& data, const SimConfig& cfg,
                                          bool relativistic) {
  cfg.validate();
  int n = cfg.n_characteristics;
  std::vector<CharacteristicTrace> out(n);
  std::atomic<int> next{0};
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned n_threads = std::min<unsigned>(hw, n);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n_threads; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        double rho0 = data.domain_length * i / n;
        out[i] = integrate_characteristic(data, rho0, cfg, relativistic);
      }
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

std::optional<double> min_breaking_time(const std::vector<CharacteristicTrace>& traces) {
  std::optional<double> tmin;
  for (const auto& tr : traces)
    if (tr.breaking_time && (!tmin || *tr.breaking_time < *tmin)) tmin = tr.breaking_time;
  return tmin;
}

}  // namespace coldwave
