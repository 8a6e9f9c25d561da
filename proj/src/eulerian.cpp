#include "coldwave/eulerian.hpp"

#include <algorithm>
#include <cmath>

#include "coldwave/errors.hpp"
#include "coldwave/pchip.hpp"
#include "coldwave/reductions.hpp"
#include "coldwave/rk45.hpp"

namespace coldwave {

namespace {

void validate_grid_n(int n) {
  if (n < 16 || (n & (n - 1)) != 0)
    throw ValidationError("grid size must be a power of two, at least 16");
}

inline void vel(double p1, double p2, double& v1, double& v2) {
  double g = std::sqrt(1.0 + p1 * p1 + p2 * p2);
  v1 = p1 / g;
  v2 = p2 / g;
}

}  // namespace

GridSolution grid_from_data(const InitialData& data, int n) {
  validate_grid_n(n);
  GridSolution g;
  g.n = n;
  g.length = data.domain_length;
  g.b0 = data.B0;
  g.time = 0;
  g.rho.resize(n);
  g.p1.resize(n);
  g.p2.resize(n);
  g.e1.resize(n);
  for (int j = 0; j < n; ++j) {
    double r = data.domain_length * j / n;
    FieldState s = data.state_at(r);
    g.rho[j] = r;
    g.p1[j] = s.P1;
    g.p2[j] = s.P2;
    g.e1[j] = s.E1;
  }
  return g;
}

void step_grid(GridSolution& g, double dt, double cfl_max) {
  if (dt <= 0.0) throw ValidationError("step_grid: dt must be positive");
  if (cfl_max <= 0.0 || cfl_max > 0.5)
    throw ValidationError("step_grid: CFL bound must be in (0, 0.5]");
  int n = g.n;
  double dx = g.length / n;
  double vmax = 0.0;
  for (int j = 0; j < n; ++j) {
    double v1, v2;
    vel(g.p1[j], g.p2[j], v1, v2);
    vmax = std::max(vmax, std::fabs(v1));
  }
  if (dt * vmax > cfl_max * dx * (1.0 + 1e-12))
    throw CFLViolation("step_grid: dt exceeds the CFL bound");
  double b0 = g.b0;
  // half-step face values
  std::vector<double> fp1(n), fp2(n), fe1(n);
  for (int j = 0; j < n; ++j) {
    int jp = (j + 1) % n;
    double a1 = 0.5 * (g.p1[j] + g.p1[jp]);
    double a2 = 0.5 * (g.p2[j] + g.p2[jp]);
    double a3 = 0.5 * (g.e1[j] + g.e1[jp]);
    double v1, v2;
    vel(a1, a2, v1, v2);
    double c = 0.5 * dt / dx * v1;
    fp1[j] = a1 - c * (g.p1[jp] - g.p1[j]) + 0.5 * dt * (-a3 - b0 * v2);
    fp2[j] = a2 - c * (g.p2[jp] - g.p2[j]) + 0.5 * dt * (b0 * v1);
    fe1[j] = a3 - c * (g.e1[jp] - g.e1[j]) + 0.5 * dt * v1;
  }
  std::vector<double> np1(n), np2(n), ne1(n);
  for (int j = 0; j < n; ++j) {
    int jm = (j - 1 + n) % n;
    double m1 = 0.5 * (fp1[j] + fp1[jm]);
    double m2 = 0.5 * (fp2[j] + fp2[jm]);
    double m3 = 0.5 * (fe1[j] + fe1[jm]);
    double v1, v2;
    vel(m1, m2, v1, v2);
    double c = dt / dx * v1;
    np1[j] = g.p1[j] - c * (fp1[j] - fp1[jm]) + dt * (-m3 - b0 * v2);
    np2[j] = g.p2[j] - c * (fp2[j] - fp2[jm]) + dt * (b0 * v1);
    ne1[j] = g.e1[j] - c * (fe1[j] - fe1[jm]) + dt * v1;
  }
  g.p1.swap(np1);
  g.p2.swap(np2);
  g.e1.swap(ne1);
  g.time += dt;
}

void evolve_grid(GridSolution& g, double t_end, double cfl) {
  if (!(cfl > 0.0) || cfl > 0.5)
    throw ValidationError("evolve_grid: cfl must be in (0, 0.5]");
  if (t_end < g.time) throw ValidationError("evolve_grid: t_end is in the past");
  g.cfl = cfl;
  double dx = g.length / g.n;
  while (g.time < t_end) {
    double vmax = 1e-12;
    for (int j = 0; j < g.n; ++j) {
      double v1, v2;
      vel(g.p1[j], g.p2[j], v1, v2);
      vmax = std::max(vmax, std::fabs(v1));
    }
    double dt = cfl * dx / vmax;
    if (g.time + dt >= t_end) dt = t_end - g.time;
    if (dt <= 0.0) break;
    step_grid(g, dt, 0.5);
  }
  g.time = t_end;
}

std::vector<double> density_field(const GridSolution& g) {
  int n = g.n;
  double dx = g.length / n;
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) {
    int jp = (j + 1) % n, jpp = (j + 2) % n;
    int jm = (j - 1 + n) % n, jmm = (j - 2 + n) % n;
    double de = (-g.e1[jpp] + 8.0 * g.e1[jp] - 8.0 * g.e1[jm] + g.e1[jmm]) / (12.0 * dx);
    out[j] = 1.0 - de;
  }
  return out;
}

namespace {

// sort by position, drop near-coincident knots and a wrapped duplicate of
// the first knot
std::vector<std::array<double, 4>> fold_points(std::vector<std::array<double, 4>> pts,
                                               double length) {
  std::sort(pts.begin(), pts.end(),
            [](const auto& a, const auto& b) { return a[0] < b[0]; });
  std::vector<std::array<double, 4>> uniq;
  uniq.reserve(pts.size());
  for (const auto& p : pts)
    if (uniq.empty() || p[0] - uniq.back()[0] > 1e-12 * length) uniq.push_back(p);
  if (uniq.size() >= 2 && (uniq.front()[0] + length) - uniq.back()[0] <= 1e-12 * length)
    uniq.pop_back();
  return uniq;
}

}  // namespace

CrossCheck cross_check(const GridSolution& g, const std::vector<CharacteristicTrace>& traces) {
  CrossCheck cc;
  double length = g.length;
  std::vector<std::array<double, 4>> pts;
  pts.reserve(traces.size());
  for (const auto& tr : traces) {
    if ((tr.breaking_time && *tr.breaking_time <= g.time) || tr.underflow)
      cc.unreliable = true;
    // tolerate the solver stopping an ulp short of the requested horizon
    double slack = 1e-9 * std::max(1.0, g.time);
    if (tr.dense.empty() || tr.dense.t_end() < g.time - slack) {
      cc.unreliable = true;
      continue;
    }
    auto y = tr.dense.eval(std::min(g.time, tr.dense.t_end()));
    double r = std::fmod(y[3], length);
    if (r < 0.0) r += length;
    pts.push_back({r, y[0], y[1], y[2]});
  }
  auto uniq = fold_points(std::move(pts), length);
  if (uniq.size() < 4)
    throw InsufficientCoverage("cross_check: fewer than 4 usable characteristics");
  double maxgap = uniq.front()[0] + length - uniq.back()[0];
  for (std::size_t i = 1; i < uniq.size(); ++i)
    maxgap = std::max(maxgap, uniq[i][0] - uniq[i - 1][0]);
  if (maxgap > 0.01 * length)
    throw InsufficientCoverage("cross_check: largest characteristic gap above 1% of the domain");
  std::vector<double> xs(uniq.size());
  std::array<std::vector<double>, 3> ys;
  for (auto& v : ys) v.resize(uniq.size());
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    xs[i] = uniq[i][0];
    ys[0][i] = uniq[i][1];
    ys[1][i] = uniq[i][2];
    ys[2][i] = uniq[i][3];
  }
  for (int f = 0; f < 3; ++f) {
    PchipPeriodic interp(xs, ys[f], length);
    const std::vector<double>& gridv = f == 0 ? g.p1 : (f == 1 ? g.p2 : g.e1);
    double mx = 0.0, s2 = 0.0;
    for (int j = 0; j < g.n; ++j) {
      double d = std::fabs(interp(g.rho[j]) - gridv[j]);
      mx = std::max(mx, d);
      s2 += d * d;
    }
    cc.max_err[f] = mx;
    cc.l2_err[f] = std::sqrt(s2 / g.n);
  }
  return cc;
}

GridSolution wave_profile_grid(double w, double k1, double k2, double b0, int n) {
  validate_grid_n(n);
  if (w <= 0.0) throw ValidationError("wave_profile_grid: wave speed must be positive");
  if (k2 < 2.0) throw ValidationError("wave_profile_grid: K2 < 2");
  double g0 = 0.5 * k2;
  double rad = g0 * g0 - 1.0 - k1 * k1;
  if (rad <= 0.0)
    throw ValidationError("wave_profile_grid: no orbit point with E1 = 0 on this manifold");
  double t_period = period(k1, k2, b0, k1);
  double length = w * t_period;

  using S4 = ode::State<4>;
  auto rhs = [&](double, const S4& y) -> S4 {
    double ga = std::sqrt(1.0 + y[0] * y[0] + y[1] * y[1]);
    double v1 = y[0] / ga, v2 = y[1] / ga;
    return {-y[2] - b0 * v2, b0 * v1, v1, v1 - w};
  };
  S4 y0 = {std::sqrt(rad), k1, 0.0, 0.0};
  ode::SolveOptions<4> opt;
  opt.ctl.rel_tol = 1e-12;
  opt.ctl.abs_tol = 1e-14;
  ode::DenseTrajectory<4> dense;
  opt.on_step = [&](const ode::DenseStep<4>& ds) { dense.push(ds); };
  auto sol = ode::solve<4>(rhs, y0, 0.0, t_period, opt);
  if (sol.status != ode::SolveStatus::ReachedEnd)
    throw StepSizeUnderflow(sol.t_final, "wave_profile_grid: orbit integration stalled");

  int m = std::max(8 * n, 8192);
  std::vector<std::array<double, 4>> pts;
  pts.reserve(m);
  double vmax = 0.0;
  for (int i = 0; i < m; ++i) {
    double th = t_period * i / m;
    auto y = dense.eval(th);
    double ga = std::sqrt(1.0 + y[0] * y[0] + y[1] * y[1]);
    vmax = std::max(vmax, std::fabs(y[0]) / ga);
    double r = std::fmod(y[3], length);
    if (r < 0.0) r += length;
    pts.push_back({r, y[0], y[1], y[2]});
  }
  if (w <= vmax)
    throw ValidationError(
        "wave_profile_grid: wave speed inside the orbit velocity range, profile folds");
  auto uniq = fold_points(std::move(pts), length);

  std::vector<double> xs(uniq.size());
  std::array<std::vector<double>, 3> ys;
  for (auto& v : ys) v.resize(uniq.size());
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    xs[i] = uniq[i][0];
    ys[0][i] = uniq[i][1];
    ys[1][i] = uniq[i][2];
    ys[2][i] = uniq[i][3];
  }
  GridSolution g;
  g.n = n;
  g.length = length;
  g.b0 = b0;
  g.time = 0;
  g.rho.resize(n);
  g.p1.resize(n);
  g.p2.resize(n);
  g.e1.resize(n);
  for (int f = 0; f < 3; ++f) {
    PchipPeriodic interp(xs, ys[f], length);
    for (int j = 0; j < n; ++j) {
      double r = length * j / n;
      g.rho[j] = r;
      double v = interp(r);
      (f == 0 ? g.p1 : (f == 1 ? g.p2 : g.e1))[j] = v;
    }
  }
  return g;
}

}  // namespace coldwave
