#include <doctest.h>

#include <cmath>
#include <random>

#include "coldwave/core.hpp"
#include "coldwave/errors.hpp"

using namespace coldwave;

TEST_CASE("lorentz factor") {
  CHECK(lorentz_gamma(0.0, 0.0) == 1.0);
  CHECK(lorentz_gamma(std::sqrt(3.0), 0.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(lorentz_gamma(3.0, 4.0) == doctest::Approx(std::sqrt(26.0)).epsilon(1e-15));
}

TEST_CASE("velocities") {
  auto [v1, v2] = velocities(0.0, 0.0);
  CHECK(v1 == 0.0);
  CHECK(v2 == 0.0);
  auto [w1, w2] = velocities(std::sqrt(3.0), 0.0);
  CHECK(w1 == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-15));
  CHECK(w2 == 0.0);
  auto [u1, u2] = velocities(0.0, std::sqrt(3.0));
  CHECK(u1 == 0.0);
  CHECK(u2 == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-15));
}

TEST_CASE("gamma >= 1 and subluminal speeds on random momenta") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (int i = 0; i < 2000; ++i) {
    double p1 = dist(rng), p2 = dist(rng);
    double g = lorentz_gamma(p1, p2);
    CHECK(g >= 1.0);
    if (p1 == 0.0 && p2 == 0.0) CHECK(g == 1.0);
    auto [v1, v2] = velocities(p1, p2);
    CHECK(v1 * v1 + v2 * v2 < 1.0);
  }
}

TEST_CASE("first integrals") {
  FieldState s;
  auto fi = first_integrals(s, 3.0);
  CHECK(fi.K1 == 0.0);
  CHECK(fi.K2 == 2.0);

  s.P2 = 1.0;
  fi = first_integrals(s, 2.0);
  CHECK(fi.K1 == 1.0);
  CHECK(fi.K2 == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));

  s = FieldState{};
  s.P1 = std::sqrt(3.0);
  s.E1 = 1.0;
  fi = first_integrals(s, 1.0);
  CHECK(fi.K1 == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(fi.K2 == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("C1 of a derivative state") {
  DerivativeState d;
  d.p2 = 1.0;
  d.e = 0.0;
  auto c = c1_of(d, 1.0);  // p2 = B0, e = 0 -> C1 = 0
  REQUIRE(c.has_value());
  CHECK(*c == 0.0);

  d.p2 = 2.0;
  c = c1_of(d, 1.0);
  REQUIRE(c.has_value());
  CHECK(*c == doctest::Approx(-1.0).epsilon(1e-15));

  d.e = 1.0;
  CHECK(!c1_of(d, 1.0).has_value());
  d.e = 1.0 + 1e-15;
  CHECK(!c1_of(d, 1.0).has_value());
}

TEST_CASE("density") {
  CHECK(density(0.0) == 1.0);
  CHECK(density(0.5) == 0.5);
  CHECK(density(-1.0) == 2.0);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    double e = dist(rng);
    CHECK(density(e) == 1.0 - e);  // definitional
    CHECK(std::fabs(density(e) + e - 1.0) < 4e-15);
  }
}

TEST_CASE("profiles carry exact derivatives") {
  Profile p = Profile::sinusoid(2.0, 3.0, 0.5);
  double rho = 0.7;
  CHECK(p.value(rho) == doctest::Approx(2.0 * std::sin(3.0 * rho + 0.5)).epsilon(1e-15));
  CHECK(p.deriv(rho) == doctest::Approx(6.0 * std::cos(3.0 * rho + 0.5)).epsilon(1e-15));
  CHECK(p.deriv2(rho) == doctest::Approx(-18.0 * std::sin(3.0 * rho + 0.5)).epsilon(1e-15));

  Profile q = Profile::linear(2.0, -1.0) + Profile::constant(4.0);
  CHECK(q.value(1.5) == doctest::Approx(2.0 * 1.5 + 3.0).epsilon(1e-15));
  CHECK(q.deriv(1.5) == 2.0);
  CHECK(q.deriv2(1.5) == 0.0);

  Profile prod = p * q;
  double h = 1e-6;
  double num = (p.value(rho + h) * q.value(rho + h) - p.value(rho - h) * q.value(rho - h)) /
               (2 * h);
  CHECK(prod.deriv(rho) == doctest::Approx(num).epsilon(1e-8));
}

TEST_CASE("small perturbation family values") {
  InitialData data = make_small_perturbation(0.1, 1.0, 1);
  CHECK(data.domain_length == doctest::Approx(2 * M_PI));
  // transverse momentum amplitude eps B0 / sqrt(1 + B0^2)
  CHECK(data.P2.value(M_PI / 2) == doctest::Approx(0.1 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(data.P2.value(M_PI / 2) == doctest::Approx(0.070711).epsilon(1e-4));
  CHECK(data.P1.value(0.0) == doctest::Approx(0.1).epsilon(1e-15));
  // K1 = P2 - B0 E1 vanishes identically for this family
  for (double rho = 0; rho < 2 * M_PI; rho += 0.37) {
    auto fi = first_integrals(data.state_at(rho), data.B0);
    CHECK(std::fabs(fi.K1) < 1e-15);
  }
}

TEST_CASE("constant-K2 construction rejects a negative radicand") {
  // E1 = 0.5 sin(rho), K2 = 2: at rho = pi/2 the radicand
  // ((2 - 0.25)/2)^2 - 1 = -0.234 < 0
  CHECK_THROWS_AS(
      make_constant_k2(2 * M_PI, 1.0, Profile::zero(), Profile::sinusoid(0.5, 1.0), 2.0, 1),
      ValidationError);
  CHECK_THROWS_AS(
      make_constant_k2(2 * M_PI, 1.0, Profile::zero(), Profile::zero(), 1.5, 1),
      ValidationError);
}

TEST_CASE("constant-K2 with K2 = 2 and zero profiles is the equilibrium") {
  InitialData data = make_constant_k2(2 * M_PI, 1.0, Profile::zero(), Profile::zero(), 2.0, 1);
  for (double rho = 0; rho < 2 * M_PI; rho += 0.5) {
    auto s = data.state_at(rho);
    CHECK(s.P1 == 0.0);
    CHECK(s.P2 == 0.0);
    CHECK(s.E1 == 0.0);
  }
}

TEST_CASE("family invariants hold on a 1000-point grid") {
  InitialData k1data =
      make_constant_k1(2 * M_PI, 0.5, Profile::sinusoid(0.05, 1.0), Profile::sinusoid(0.03, 1.0), 0.25);
  double k1ref = first_integrals(k1data.state_at(0.0), k1data.B0).K1;
  InitialData k2data = make_uniform_k2_wave(0.1, 1.0, 1);
  double k2ref = first_integrals(k2data.state_at(0.0), k2data.B0).K2;
  for (int i = 0; i < 1000; ++i) {
    double rho = 2 * M_PI * i / 1000.0;
    CHECK(std::fabs(first_integrals(k1data.state_at(rho), k1data.B0).K1 - k1ref) < 1e-12);
    CHECK(std::fabs(first_integrals(k2data.state_at(rho), k2data.B0).K2 - k2ref) < 1e-12);
  }
  validate_family(k1data);
  validate_family(k2data);
}

TEST_CASE("nonrelativistic smoothness indicator") {
  // all-zero profiles, B0 = 0: Delta = -1
  InitialData z = make_general(2 * M_PI, 0.0, Profile::zero(), Profile::zero(), Profile::zero());
  CHECK(criterion_nonrel(z, 1.0) == doctest::Approx(-1.0).epsilon(1e-15));

  // (E1)' = 1: Delta = 2 - 0 - 1 = 1
  InitialData e = make_general(2 * M_PI, 0.0, Profile::zero(), Profile::zero(),
                               Profile::linear(1.0));
  CHECK(criterion_nonrel(e, 0.3) == doctest::Approx(1.0).epsilon(1e-15));

  // (V2)' = 1, B0 = 2: Delta = 2*2*1 - 4 - 1 = -1
  InitialData v = make_general(2 * M_PI, 2.0, Profile::zero(), Profile::linear(1.0),
                               Profile::zero());
  CHECK(criterion_nonrel(v, 0.3) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("smoothness indicator depends only on derivatives") {
  InitialData a = make_general(2 * M_PI, 1.0, Profile::sinusoid(0.2, 1.0),
                               Profile::sinusoid(0.1, 2.0), Profile::sinusoid(0.15, 1.0));
  InitialData b = make_general(2 * M_PI, 1.0, Profile::sinusoid(0.2, 1.0) + 5.0,
                               Profile::sinusoid(0.1, 2.0) + (-2.0), Profile::sinusoid(0.15, 1.0) + 0.5);
  for (double rho = 0; rho < 2 * M_PI; rho += 0.21)
    CHECK(criterion_nonrel(a, rho) == doctest::Approx(criterion_nonrel(b, rho)).epsilon(1e-13));
}

TEST_CASE("small-amplitude relativistic criterion") {
  DerivativeState d;
  CHECK(criterion_rel_smallamp(d, 0.0));  // -1 < 0
  d.e = 1.0;
  CHECK(!criterion_rel_smallamp(d, 0.0));  // 2 - 1 = 1 > 0
  d.e = 0.0;
  d.p2 = 2.0;
  CHECK(!criterion_rel_smallamp(d, 1.0));  // 4 - 2 - 1 = 1 > 0
}

TEST_CASE("config validation names its bounds") {
  SimConfig c;
  CHECK_NOTHROW(c.validate());
  c.epsilon = -1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = SimConfig{};
  c.horizon = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = SimConfig{};
  c.rel_tol = 2.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = SimConfig{};
  c.blowup_threshold = 0.5;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = SimConfig{};
  c.n_characteristics = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("equilibrium data is the zero state") {
  InitialData eq = make_equilibrium(2.0);
  CHECK(eq.B0 == 2.0);
  auto s = eq.state_at(1.234);
  CHECK(s.P1 == 0.0);
  CHECK(s.P2 == 0.0);
  CHECK(s.E1 == 0.0);
  auto d = eq.deriv_at(1.234);
  CHECK(d.p1 == 0.0);
  CHECK(d.p2 == 0.0);
  CHECK(d.e == 0.0);
}

TEST_CASE("linear transverse data has p2 identically B0") {
  InitialData lin = make_linear_p2(1.5);
  for (double rho = -3; rho < 3; rho += 0.7) {
    CHECK(lin.deriv_at(rho).p2 == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(lin.state_at(rho).P2 == doctest::Approx(1.5 * rho).epsilon(1e-15));
  }
}
