#include "coldwave/quartic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "coldwave/errors.hpp"

namespace coldwave {

double radicand(double eta, double K1, double K2, double B0) {
  double D = B0 * B0 * K2 - (eta - K1) * (eta - K1);
  double b4 = B0 * B0 * B0 * B0;
  return D * D - 4.0 * b4 * (eta * eta + 1.0);
}

double radicand_deriv(double eta, double K1, double K2, double B0) {
  double D = B0 * B0 * K2 - (eta - K1) * (eta - K1);
  double b4 = B0 * B0 * B0 * B0;
  return 2.0 * D * (-2.0 * (eta - K1)) - 8.0 * b4 * eta;
}

std::array<double, 5> radicand_coefficients(double K1, double K2, double B0) {
  // expand (A - (eta-K1)^2)^2 - 4 B0^4 (eta^2 + 1) by polynomial convolution
  double A = B0 * B0 * K2;
  // q(eta) = A - (eta-K1)^2 = (A - K1^2) + 2 K1 eta - eta^2
  std::array<double, 3> q{A - K1 * K1, 2.0 * K1, -1.0};
  std::array<double, 5> c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c[i + j] += q[i] * q[j];
  double b4 = B0 * B0 * B0 * B0;
  c[0] -= 4.0 * b4;
  c[2] -= 4.0 * b4;
  return c;  // c[4] = 1
}

std::vector<double> real_quartic_roots(const std::array<double, 5>& c) {
  Eigen::Matrix4d comp = Eigen::Matrix4d::Zero();
  comp(1, 0) = comp(2, 1) = comp(3, 2) = 1.0;
  for (int i = 0; i < 4; ++i) comp(i, 3) = -c[i] / c[4];
  Eigen::EigenSolver<Eigen::Matrix4d> es(comp);
  double scale = 0;
  for (double v : c) scale = std::max(scale, std::fabs(v));

  std::vector<double> roots;
  for (int i = 0; i < 4; ++i) {
    std::complex<double> z = es.eigenvalues()[i];
    if (std::fabs(z.imag()) > 1e-8 * std::max(1.0, std::fabs(z.real()))) continue;
    double x = z.real();
    for (int it = 0; it < 2; ++it) {  // Newton polish
      double p = (((c[4] * x + c[3]) * x + c[2]) * x + c[1]) * x + c[0];
      double dp = ((4 * c[4] * x + 3 * c[3]) * x + 2 * c[2]) * x + c[1];
      if (std::fabs(dp) < 1e-14 * scale) break;  // double root: keep eigenvalue
      x -= p / dp;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

TurningPoints turning_points(double K1, double K2, double B0, double p2_seed) {
  if (B0 == 0) throw DomainError("turning points require B0 != 0");
  if (K2 < 2) throw DomainError("K2 < 2 is inconsistent with gamma >= 1");

  auto c = radicand_coefficients(K1, K2, B0);
  TurningPoints tp;
  tp.all_roots = real_quartic_roots(c);
  const auto& r = tp.all_roots;
  std::ostringstream msg;
  double otol = 1e-12 * std::max(1.0, std::fabs(p2_seed));
  if (r.empty() || p2_seed < r.front() - otol || p2_seed > r.back() + otol) {
    msg << "seed " << p2_seed << " lies outside every bounded admissible band";
    throw NoBracketingRoots(msg.str());
  }

  // Bracketing pair of consecutive roots. A seed equal to a shared root (an
  // orbit started exactly at a turning point) borders two intervals; prefer
  // the admissible or degenerate one.
  std::size_t best = r.size();
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    double tol = 1e-12 * std::max({1.0, std::fabs(r[i]), std::fabs(r[i + 1])});
    if (p2_seed < r[i] - tol || p2_seed > r[i + 1] + tol) continue;
    if (best == r.size()) best = i;
    double span = std::max({1.0, std::fabs(r[i]), std::fabs(r[i + 1])});
    if (r[i + 1] - r[i] <= 1e-9 * span) {
      best = i;
      break;
    }
    double m = 0.5 * (r[i] + r[i + 1]);
    double Dm = B0 * B0 * K2 - (m - K1) * (m - K1);
    if (radicand(m, K1, K2, B0) >= 0 && Dm > 0) {
      best = i;
      break;
    }
  }
  double lo = r[best], hi = r[best + 1];

  double scale = std::max({1.0, std::fabs(lo), std::fabs(hi)});
  if (hi - lo <= 1e-9 * scale) {
    tp.p2_minus = tp.p2_plus = 0.5 * (lo + hi);
    tp.degenerate = true;
    return tp;
  }
  // the band is admissible only where the radicand is nonnegative and the
  // orbit denominator B0^2 K2 - (eta-K1)^2 = 2 gamma B0^2 stays positive
  double mid = 0.5 * (lo + hi);
  double Dmid = B0 * B0 * K2 - (mid - K1) * (mid - K1);
  if (radicand(mid, K1, K2, B0) < 0 || Dmid <= 0) {
    msg << "seed " << p2_seed << " sits between roots bounding a forbidden gap";
    throw NoBracketingRoots(msg.str());
  }
  tp.p2_minus = lo;
  tp.p2_plus = hi;
  return tp;
}

}  // namespace coldwave
