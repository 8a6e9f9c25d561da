#pragma once
#include <algorithm>
#include <cmath>
#include <vector>

#include "coldwave/errors.hpp"

namespace coldwave {

// Shape-preserving periodic cubic interpolant with Fritsch-Carlson slopes.
// Knots must be strictly increasing and span less than one period; two
// wrapped knots are padded on each side so the seam gets real slopes.
class PchipPeriodic {
 public:
  PchipPeriodic() = default;
  PchipPeriodic(const std::vector<double>& x, const std::vector<double>& y, double period)
      : period_(period) {
    std::size_t n = x.size();
    if (n < 3 || y.size() != n) throw ValidationError("pchip: need at least 3 knots");
    x_.reserve(n + 4);
    y_.reserve(n + 4);
    x_.push_back(x[n - 2] - period);
    y_.push_back(y[n - 2]);
    x_.push_back(x[n - 1] - period);
    y_.push_back(y[n - 1]);
    x_.insert(x_.end(), x.begin(), x.end());
    y_.insert(y_.end(), y.begin(), y.end());
    x_.push_back(x[0] + period);
    y_.push_back(y[0]);
    x_.push_back(x[1] + period);
    y_.push_back(y[1]);
    for (std::size_t i = 1; i < x_.size(); ++i)
      if (!(x_[i] > x_[i - 1]))
        throw ValidationError("pchip: knots must be strictly increasing within one period");
    std::size_t m = x_.size();
    m_.assign(m, 0.0);
    std::vector<double> h(m - 1), d(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) {
      h[i] = x_[i + 1] - x_[i];
      d[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < m; ++i) {
      if (d[i - 1] == 0.0 || d[i] == 0.0 || (d[i - 1] > 0.0) != (d[i] > 0.0)) {
        m_[i] = 0.0;
      } else {
        double w1 = 2.0 * h[i] + h[i - 1], w2 = h[i] + 2.0 * h[i - 1];
        m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
      }
    }
    m_[0] = d[0];
    m_[m - 1] = d[m - 2];  // padding ends, never evaluated
    x0_ = x[0];
  }

  double operator()(double xq) const {
    double t = std::fmod(xq - x0_, period_);
    if (t < 0.0) t += period_;
    t += x0_;
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t j = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    j = std::min(j, x_.size() - 2);
    double h = x_[j + 1] - x_[j];
    double s = (t - x_[j]) / h;
    double oms = 1.0 - s;
    double h00 = (1.0 + 2.0 * s) * oms * oms;
    double h10 = s * oms * oms;
    double h01 = s * s * (3.0 - 2.0 * s);
    double h11 = s * s * (s - 1.0);
    return h00 * y_[j] + h10 * h * m_[j] + h01 * y_[j + 1] + h11 * h * m_[j + 1];
  }

 private:
  std::vector<double> x_, y_, m_;
  double period_ = 0, x0_ = 0;
};

}  // namespace coldwave
