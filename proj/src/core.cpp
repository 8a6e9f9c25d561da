#include "coldwave/core.hpp"

#include <cmath>
#include <sstream>

#include "coldwave/errors.hpp"

namespace coldwave {

double lorentz_gamma(double P1, double P2) {
  return std::sqrt(1.0 + P1 * P1 + P2 * P2);
}

double lorentz_gamma(const FieldState& s) { return lorentz_gamma(s.P1, s.P2); }

std::pair<double, double> velocities(double P1, double P2) {
  double g = lorentz_gamma(P1, P2);
  return {P1 / g, P2 / g};
}

std::pair<double, double> velocities(const FieldState& s) {
  return velocities(s.P1, s.P2);
}

FirstIntegrals first_integrals(const FieldState& s, double B0) {
  FirstIntegrals fi;
  fi.K1 = s.P2 - B0 * s.E1;
  fi.K2 = 2.0 * lorentz_gamma(s.P1, s.P2) + s.E1 * s.E1;
  return fi;
}

std::optional<double> c1_of(const DerivativeState& d, double B0) {
  if (std::fabs(d.e - 1.0) < 1e-14) return std::nullopt;
  return (d.p2 - B0) / (d.e - 1.0);
}

double density(double e) { return 1.0 - e; }

Profile Profile::constant(double c) {
  return Profile([c](double) { return Jet2::con(c); });
}

Profile Profile::linear(double slope, double intercept) {
  return Profile([=](double rho) { return Jet2{slope * rho + intercept, slope, 0}; });
}

Profile Profile::sinusoid(double amp, double k, double phase) {
  return Profile([=](double rho) {
    return amp * sin(Jet2{k * rho + phase, k, 0});
  });
}

Profile Profile::apply(Profile p, std::function<Jet2(Jet2)> g) {
  return Profile([p = std::move(p), g = std::move(g)](double rho) { return g(p.jet(rho)); });
}

Profile operator+(Profile a, Profile b) {
  return Profile([a, b](double rho) { return a.jet(rho) + b.jet(rho); });
}
Profile operator-(Profile a, Profile b) {
  return Profile([a, b](double rho) { return a.jet(rho) - b.jet(rho); });
}
Profile operator*(Profile a, Profile b) {
  return Profile([a, b](double rho) { return a.jet(rho) * b.jet(rho); });
}
Profile operator*(double c, Profile a) {
  return Profile([c, a](double rho) { return c * a.jet(rho); });
}
Profile operator+(Profile a, double c) {
  return Profile([a, c](double rho) { return a.jet(rho) + c; });
}

FieldState InitialData::state_at(double rho0) const {
  return {0.0, rho0, P1.value(rho0), P2.value(rho0), E1.value(rho0)};
}

DerivativeState InitialData::deriv_at(double rho0) const {
  return {P1.deriv(rho0), P2.deriv(rho0), E1.deriv(rho0)};
}

void SimConfig::validate() const {
  std::ostringstream err;
  if (!(horizon > 0)) err << "horizon must be > 0 (got " << horizon << ")";
  else if (!(rel_tol > 0 && rel_tol < 1)) err << "rel_tol must lie in (0,1)";
  else if (!(abs_tol > 0 && abs_tol < 1)) err << "abs_tol must lie in (0,1)";
  else if (!(blowup_threshold > 1)) err << "blowup_threshold must be > 1";
  else if (n_characteristics < 1) err << "n_characteristics must be >= 1";
  else if (epsilon < 0) err << "epsilon must be >= 0 (got " << epsilon << ")";
  else if (sample_stride < 1) err << "sample_stride must be >= 1";
  else return;
  throw ValidationError(err.str());
}

void validate_family(const InitialData& data) {
  constexpr int kGrid = 1024;
  constexpr double kTol = 1e-12;
  if (data.family == Family::General) return;
  double ref = 0;
  for (int i = 0; i < kGrid; ++i) {
    double rho = data.domain_length * i / kGrid;
    FieldState s = data.state_at(rho);
    FirstIntegrals fi = first_integrals(s, data.B0);
    double v = (data.family == Family::ConstantK1) ? fi.K1 : fi.K2;
    if (i == 0) ref = v;
    else if (std::fabs(v - ref) > kTol * std::max(1.0, std::fabs(ref)))
      throw ValidationError("family integral not constant on validation grid");
  }
}

InitialData make_general(double L, double B0, Profile P1, Profile P2, Profile E1) {
  InitialData d;
  d.domain_length = L;
  d.B0 = B0;
  d.family = Family::General;
  d.P1 = std::move(P1);
  d.P2 = std::move(P2);
  d.E1 = std::move(E1);
  return d;
}

InitialData make_constant_k1(double L, double B0, Profile E1, Profile P1, double K1) {
  InitialData d;
  d.domain_length = L;
  d.B0 = B0;
  d.family = Family::ConstantK1;
  d.E1 = E1;
  d.P1 = std::move(P1);
  d.P2 = B0 * E1 + K1;
  validate_family(d);
  return d;
}

InitialData make_constant_k2(double L, double B0, Profile P2, Profile E1, double K2,
                             int sign) {
  if (K2 < 2)
    throw ValidationError("constant-K2 data requires K2 >= 2");
  InitialData d;
  d.domain_length = L;
  d.B0 = B0;
  d.family = Family::ConstantK2;
  d.P2 = P2;
  d.E1 = E1;
  double s = sign >= 0 ? 1.0 : -1.0;
  Profile radicand([P2, E1, K2](double rho) {
    Jet2 half = (K2 - powi(E1.jet(rho), 2)) * 0.5;
    return half * half - 1.0 - powi(P2.jet(rho), 2);
  });
  // data must be real and C^2: the radicand may touch zero only at the
  // equilibrium value K2 = 2 with vanishing profiles
  constexpr int kGrid = 1024;
  for (int i = 0; i < kGrid; ++i) {
    double rho = L * i / kGrid;
    double r = radicand.value(rho);
    bool equilibrium = (K2 == 2.0) && std::fabs(r) < 1e-14;
    if (r <= 0 && !equilibrium) {
      std::ostringstream msg;
      msg << "constant-K2 radicand non-positive at rho=" << rho << " (value " << r
          << "); data would not be real and C^2";
      throw ValidationError(msg.str());
    }
  }
  if (K2 == 2.0) {
    d.P1 = Profile::zero();
  } else {
    d.P1 = Profile([radicand, s](double rho) { return s * sqrt(radicand.jet(rho)); });
  }
  validate_family(d);
  return d;
}

InitialData make_small_perturbation(double eps, double B0, int k) {
  if (k < 1) throw ValidationError("wavenumber k must be >= 1");
  if (eps < 0) throw ValidationError("epsilon must be >= 0");
  double w = std::sqrt(1.0 + B0 * B0);
  InitialData d;
  d.domain_length = 2.0 * M_PI / k;
  d.B0 = B0;
  d.family = Family::General;
  d.P1 = Profile::sinusoid(eps, k, M_PI / 2);  // eps cos(k rho)
  d.P2 = Profile::sinusoid(eps * B0 / w, k);
  d.E1 = Profile::sinusoid(eps / w, k);
  return d;
}

InitialData make_uniform_k2_wave(double eps, double B0, int k) {
  if (k < 1) throw ValidationError("wavenumber k must be >= 1");
  if (eps < 0) throw ValidationError("epsilon must be >= 0");
  double w = std::sqrt(1.0 + B0 * B0);
  double E1m = eps / w;
  double K2 = E1m * E1m + 2.0 * std::sqrt(1.0 + B0 * B0 * E1m * E1m);
  double x2 = 2.0 * K2 + 4.0 * B0 * B0 - E1m * E1m;
  InitialData d;
  d.domain_length = 2.0 * M_PI / k;
  d.B0 = B0;
  d.family = Family::ConstantK2;
  d.E1 = Profile::sinusoid(E1m, k);
  d.P2 = B0 * d.E1;
  Profile E1p = d.E1;
  d.P1 = Profile([E1p, E1m, x2, k](double rho) {
    Jet2 c = cos(Jet2{k * rho, double(k), 0});
    Jet2 e1 = E1p.jet(rho);
    return (E1m * 0.5) * c * sqrt(x2 - e1 * e1);
  });
  validate_family(d);
  return d;
}

InitialData make_equilibrium(double B0) {
  InitialData d;
  d.domain_length = 2.0 * M_PI;
  d.B0 = B0;
  d.family = Family::ConstantK2;
  return d;
}

InitialData make_linear_p2(double B0) {
  InitialData d;
  d.domain_length = 2.0 * M_PI;
  d.B0 = B0;
  d.family = Family::General;
  d.P2 = Profile::linear(B0);
  return d;
}

double criterion_nonrel(const InitialData& data, double rho) {
  double v1p = data.P1.deriv(rho);  // momentum slots carry V1, V2 here
  double v2p = data.P2.deriv(rho);
  double e1p = data.E1.deriv(rho);
  double B0 = data.B0;
  return v1p * v1p + 2.0 * e1p + 2.0 * B0 * v2p - B0 * B0 - 1.0;
}

bool criterion_rel_smallamp(const DerivativeState& d, double B0) {
  return 2.0 * d.e + 2.0 * B0 * d.p2 - 2.0 * B0 * B0 - 1.0 < 0.0;
}

}  // namespace coldwave
