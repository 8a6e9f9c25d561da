#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace coldwave::ode {

// Embedded Dormand-Prince 5(4) pair with PI step control, FSAL, and the
// standard quartic dense output. Local extrapolation: the 5th-order value is
// propagated, so accepted-step error scales roughly linearly with the
// tolerance (relevant when interpreting tolerance-halving experiments).

template <std::size_t N>
using State = std::array<double, N>;

struct StepControl {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double h_init = 0;  // 0 = choose automatically
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 200'000'000;
};

enum class SolveStatus { ReachedEnd, EventLocated, StepSizeUnderflow, MaxSteps };

// Continuous extension over one accepted step:
// y(t0 + s*h) = r0 + s*(r1 + (1-s)*(r2 + s*(r3 + (1-s)*r4)))
template <std::size_t N>
struct DenseStep {
  double t0 = 0, h = 0;
  std::array<State<N>, 5> r{};

  State<N> eval(double t) const {
    double s = (t - t0) / h;
    State<N> y;
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = r[0][i] +
             s * (r[1][i] + (1 - s) * (r[2][i] + s * (r[3][i] + (1 - s) * r[4][i])));
    }
    return y;
  }
};

template <std::size_t N>
class DenseTrajectory {
 public:
  void push(const DenseStep<N>& st) { steps_.push_back(st); }
  bool empty() const { return steps_.empty(); }
  double t_begin() const { return steps_.front().t0; }
  double t_end() const { return steps_.back().t0 + steps_.back().h; }

  State<N> eval(double t) const {
    // binary search for the covering step; clamp to the trajectory range
    std::size_t lo = 0, hi = steps_.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi + 1) / 2;
      if (steps_[mid].t0 <= t) lo = mid;
      else hi = mid - 1;
    }
    return steps_[lo].eval(t);
  }

 private:
  std::vector<DenseStep<N>> steps_;
};

template <std::size_t N>
struct Solution {
  SolveStatus status = SolveStatus::ReachedEnd;
  double t_final = 0;
  State<N> y_final{};
  int event_index = -1;
  long n_accepted = 0, n_rejected = 0;
};

template <std::size_t N>
struct SolveOptions {
  StepControl ctl;
  // terminal events: report the first sign change, located by bisection on
  // the dense output to 1e-10 in t
  std::vector<std::function<double(double, const State<N>&)>> events;
  // called after every accepted step with its dense interpolant
  std::function<void(const DenseStep<N>&)> on_step;
};

namespace detail {
// Dormand-Prince coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace detail

template <std::size_t N, class F>
Solution<N> solve(F&& f, State<N> y0, double t0, double t1, SolveOptions<N> opt = {}) {
  using namespace detail;
  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  const double rtol = opt.ctl.rel_tol, atol = opt.ctl.abs_tol;

  Solution<N> sol;
  State<N> y = y0, k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
  double t = t0;
  k1 = f(t, y);

  std::vector<double> ev_prev(opt.events.size());
  for (std::size_t j = 0; j < opt.events.size(); ++j) ev_prev[j] = opt.events[j](t, y);

  double h = opt.ctl.h_init;
  if (h == 0) {
    // small trial step from the rhs scale
    double dy = 0, yy = 0;
    for (std::size_t i = 0; i < N; ++i) {
      dy = std::max(dy, std::fabs(k1[i]));
      yy = std::max(yy, std::fabs(y[i]));
    }
    h = (dy > 1e-12) ? 0.01 * std::max(1e-6, yy + 1.0) / dy : 1e-4;
    h = std::min(h, std::fabs(t1 - t0));
  }
  h = dir * std::min(std::fabs(h), opt.ctl.h_max);

  double facold = 1e-4;
  bool last = false;

  while (!last) {
    if (sol.n_accepted + sol.n_rejected >= opt.ctl.max_steps) {
      sol.status = SolveStatus::MaxSteps;
      break;
    }
    if (std::fabs(h) <= std::fabs(t) * 1e-15 + 1e-300) {
      sol.status = SolveStatus::StepSizeUnderflow;
      break;
    }
    if ((t + h - t1) * dir > 0) {
      h = t1 - t;
      last = true;
    }

    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    k2 = f(t + c2 * h, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(t + c3 * h, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(t + c4 * h, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f(t + c5 * h, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                            a65 * k5[i]);
    k6 = f(t + h, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = f(t + h, ynew);

    double err = 0;
    for (std::size_t i = 0; i < N; ++i) {
      double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                       e7 * k7[i]);
      double sc = atol + rtol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
      err += (ei / sc) * (ei / sc);
    }
    err = std::sqrt(err / N);

    double fac11 = std::pow(std::max(err, 1e-32), 0.17);
    if (err <= 1.0) {
      // accept
      double fac = fac11 / std::pow(facold, 0.04);
      fac = std::max(0.2, std::min(10.0, fac / 0.9));
      double hnew = h / fac;
      facold = std::max(err, 1e-4);

      DenseStep<N> ds;
      ds.t0 = t;
      ds.h = h;
      for (std::size_t i = 0; i < N; ++i) {
        double ydiff = ynew[i] - y[i];
        double bspl = h * k1[i] - ydiff;
        ds.r[0][i] = y[i];
        ds.r[1][i] = ydiff;
        ds.r[2][i] = bspl;
        ds.r[3][i] = ydiff - h * k7[i] - bspl;
        ds.r[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                          d7 * k7[i]);
      }

      double tnew = t + h;
      // terminal events: bisection on the dense interpolant
      for (std::size_t j = 0; j < opt.events.size(); ++j) {
        double gv = opt.events[j](tnew, ynew);
        if (ev_prev[j] == 0.0) ev_prev[j] = gv;  // ignore roots at the seed point
        else if (gv == 0.0 || (gv > 0) != (ev_prev[j] > 0)) {
          double lo = t, hi = tnew;
          while (std::fabs(hi - lo) > 1e-10) {
            double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;  // interval is at FP resolution
            State<N> ym = ds.eval(mid);
            double gm = opt.events[j](mid, ym);
            if (gm == 0.0) { lo = hi = mid; break; }
            if ((gm > 0) == (ev_prev[j] > 0)) lo = mid;
            else hi = mid;
          }
          sol.status = SolveStatus::EventLocated;
          sol.event_index = int(j);
          sol.t_final = hi;
          sol.y_final = ds.eval(hi);
          // the full step is kept: the interpolant is valid on [t, t+h] and
          // callers clamp their sampling at the event time
          if (opt.on_step) opt.on_step(ds);
          ++sol.n_accepted;
          return sol;
        }
        ev_prev[j] = gv;
      }

      if (opt.on_step) opt.on_step(ds);
      ++sol.n_accepted;
      y = ynew;
      k1 = k7;  // FSAL
      t = tnew;
      h = dir * std::min(std::fabs(hnew), opt.ctl.h_max);
    } else {
      // reject
      last = false;
      double hnew = h / std::min(10.0, fac11 / 0.9);
      h = hnew;
      ++sol.n_rejected;
    }
  }

  sol.t_final = t;
  sol.y_final = y;
  return sol;
}

}  // namespace coldwave::ode
