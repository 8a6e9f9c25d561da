#include "coldwave/clirun.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "coldwave/characteristics.hpp"
#include "coldwave/config.hpp"
#include "coldwave/errors.hpp"
#include "coldwave/eulerian.hpp"
#include "coldwave/floquet.hpp"
#include "coldwave/reductions.hpp"

namespace coldwave {

namespace {

constexpr const char* kToolVersion = "1.0.0";

std::string fmt(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

std::string opt_fmt(const std::optional<double>& v) {
  return v ? fmt(*v) : std::string("none");
}

struct Outputs {
  std::filesystem::path dir;
  std::vector<std::string> files;

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw ValidationError("cannot write output file: " + name);
    f << content;
    files.push_back(name);
  }
};

std::string trace_csv(const CharacteristicTrace& tr, double b0) {
  std::ostringstream out;
  out << "theta, rho, P1, P2, E1, p1, p2, e, K1, K2, N\n";
  for (const auto& s : tr.samples) {
    FirstIntegrals fi = first_integrals(s.state, b0);
    out << fmt(s.theta) << ", " << fmt(s.state.rho) << ", " << fmt(s.state.P1) << ", "
        << fmt(s.state.P2) << ", " << fmt(s.state.E1) << ", " << fmt(s.deriv.p1) << ", "
        << fmt(s.deriv.p2) << ", " << fmt(s.deriv.e) << ", " << fmt(fi.K1) << ", "
        << fmt(fi.K2) << ", " << fmt(density(s.deriv.e)) << "\n";
  }
  return out.str();
}

std::string grid_csv(const GridSolution& g) {
  auto dens = density_field(g);
  std::ostringstream out;
  out << "rho, P1, P2, E1, N\n";
  for (int j = 0; j < g.n; ++j)
    out << fmt(g.rho[j]) << ", " << fmt(g.p1[j]) << ", " << fmt(g.p2[j]) << ", "
        << fmt(g.e1[j]) << ", " << fmt(dens[j]) << "\n";
  return out.str();
}

void summarize_trace(std::ostringstream& sum, const CharacteristicTrace& tr) {
  sum << "final_theta: " << fmt(tr.final_theta()) << "\n";
  sum << "breaking_time: " << opt_fmt(tr.breaking_time) << "\n";
  sum << "extrapolated_blowup: " << opt_fmt(tr.extrapolated_blowup) << "\n";
  sum << "suspected_breaking: " << (tr.suspected_breaking ? "true" : "false") << "\n";
  sum << "drift_K1: " << fmt(tr.drift_K1) << "\n";
  sum << "drift_K2: " << fmt(tr.drift_K2) << "\n";
  if (tr.C1) {
    sum << "C1: " << fmt(*tr.C1) << "\n";
    sum << "drift_C1: " << fmt(tr.drift_C1) << "\n";
  }
}

double orbit_period_of(const InitialData& data, double rho0, const SimConfig& sim) {
  if (data.B0 != 0.0) {
    FieldState s0 = data.state_at(rho0);
    auto fi = first_integrals(s0, data.B0);
    return period(fi.K1, fi.K2, data.B0, s0.P2);
  }
  return return_map_period(data, rho0, sim);
}

void do_simulate(const RunConfig& cfg, double rho0, Outputs& out, std::ostringstream& sum) {
  InitialData data = cfg.make_data();
  auto tr = integrate_characteristic(data, rho0, cfg.sim);
  out.write("trace_0.csv", trace_csv(tr, cfg.sim.B0));
  sum << "seed_rho: " << fmt(rho0) << "\n";
  summarize_trace(sum, tr);
}

void do_ensemble(const RunConfig& cfg, Outputs& out, std::ostringstream& sum) {
  InitialData data = cfg.make_data();
  auto traces = ensemble(data, cfg.sim);
  for (std::size_t i = 0; i < traces.size(); ++i)
    out.write("trace_" + std::to_string(i) + ".csv", trace_csv(traces[i], cfg.sim.B0));
  sum << "n_characteristics: " << traces.size() << "\n";
  sum << "min_breaking_time: " << opt_fmt(min_breaking_time(traces)) << "\n";
  int broke = 0;
  double dk2 = 0;
  for (const auto& t : traces) {
    if (t.breaking_time) ++broke;
    dk2 = std::max(dk2, t.drift_K2);
  }
  sum << "broken_count: " << broke << "\n";
  sum << "max_drift_K2: " << fmt(dk2) << "\n";
}

void do_period(const RunConfig& cfg, double rho0, Outputs&, std::ostringstream& sum) {
  InitialData data = cfg.make_data();
  FieldState s0 = data.state_at(rho0);
  auto fi = first_integrals(s0, cfg.sim.B0);
  sum << "seed_rho: " << fmt(rho0) << "\n";
  sum << "K1: " << fmt(fi.K1) << "\n";
  sum << "K2: " << fmt(fi.K2) << "\n";
  if (cfg.sim.B0 != 0.0)
    sum << "period_quadrature: " << fmt(period(fi.K1, fi.K2, cfg.sim.B0, s0.P2)) << "\n";
  else
    sum << "period_quadrature: none\n";
  sum << "period_return_map: " << fmt(return_map_period(data, rho0, cfg.sim)) << "\n";
  sum << "period_linear: " << fmt(2.0 * M_PI / std::sqrt(1.0 + cfg.sim.B0 * cfg.sim.B0))
      << "\n";
}

void do_wave(const RunConfig& cfg, Outputs& out, std::ostringstream& sum) {
  double w = cfg.wave_speed, k1 = cfg.wave_k1, k2 = cfg.wave_k2, b0 = cfg.sim.B0;
  double t_orbit = period(k1, k2, b0, cfg.wave_p2_at_0);
  double length = w * t_orbit;
  double span = cfg.wave_xi_span > 0.0 ? cfg.wave_xi_span : length;
  auto tw = traveling_wave(w, k1, k2, b0, {-0.5 * span, 0.5 * span}, cfg.wave_p2_at_0,
                           cfg.wave_branch);
  sum << "orbit_period: " << fmt(t_orbit) << "\n";
  sum << "wave_length: " << fmt(length) << "\n";
  sum << "profile_samples: " << tw.xi.size() << "\n";
  sum << "profile_terminated_at: " << opt_fmt(tw.terminated_at) << "\n";
  sum << "profile_terminated_forward: " << opt_fmt(tw.terminated_forward) << "\n";
  sum << "profile_terminated_backward: " << opt_fmt(tw.terminated_backward) << "\n";
  try {
    GridSolution g = wave_profile_grid(w, k1, k2, b0, cfg.grid_n);
    out.write("grid.csv", grid_csv(g));
    sum << "wave_grid: written\n";
  } catch (const ValidationError& e) {
    sum << "wave_grid: skipped (" << e.what() << ")\n";
  }
}

void do_floquet(const RunConfig& cfg, double rho0, Outputs&, std::ostringstream& sum) {
  InitialData data = cfg.make_data();
  double b0 = cfg.sim.B0;
  auto orbit = reference_orbit(data, rho0, cfg.sim);
  auto d0 = data.deriv_at(rho0);
  double c1 = c1_of(d0, b0).value_or(b0);
  HillCoefficients hc = hill_coefficients(orbit.evaluator(), b0, c1);
  auto kfn = [&](double t) { return hc.at(t).k; };
  // full-period monodromy (the genuine Floquet object for the orbit) plus the
  // half-trace over pi/omega, which is cosh(mu pi) in the Mathieu normalization
  auto mono = monodromy(kfn, orbit.period());
  MathieuParams mp = mathieu_params(cfg.sim.epsilon, b0);
  double cmp = monodromy_coshmupi(kfn, M_PI / mp.omega);
  sum << "seed_rho: " << fmt(rho0) << "\n";
  sum << "orbit_period: " << fmt(orbit.period()) << "\n";
  sum << "omega: " << fmt(mp.omega) << "\n";
  sum << "mathieu_a_hat: " << fmt(mp.a_hat) << "\n";
  sum << "mathieu_b_hat: " << fmt(mp.b_hat) << "\n";
  sum << "mathieu_a: " << fmt(mp.a) << "\n";
  sum << "mathieu_b: " << fmt(mp.b) << "\n";
  sum << "asymptotic_coshmupi: " << fmt(asymptotic_coshmupi(cfg.sim.epsilon, b0)) << "\n";
  sum << "monodromy_coshmupi: " << fmt(cmp) << "\n";
  sum << "monodromy_half_trace: " << fmt(mono.half_trace) << "\n";
  sum << "monodromy_wronskian: " << fmt(mono.wronskian) << "\n";
  const char* cls = "stable";
  switch (classify(cmp, 1e-9)) {
    case FloquetClass::Stable: cls = "stable"; break;
    case FloquetClass::MarginallyStable: cls = "marginally-stable"; break;
    case FloquetClass::Unstable: cls = "unstable"; break;
  }
  sum << "floquet_class: " << cls << "\n";
  sum << "min_K: " << fmt(hc.min_k(orbit.period())) << "\n";
}

void do_criteria(const RunConfig& cfg, Outputs&, std::ostringstream& sum) {
  InitialData data = cfg.make_data();
  double b0 = cfg.sim.B0;
  constexpr int kGrid = 1024;
  double dmax = -std::numeric_limits<double>::infinity();
  double mmax = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    double rho = data.domain_length * i / kGrid;
    dmax = std::max(dmax, criterion_nonrel(data, rho));
    auto d = data.deriv_at(rho);
    mmax = std::max(mmax, 2.0 * d.e + 2.0 * b0 * d.p2 - 2.0 * b0 * b0 - 1.0);
  }
  sum << "nonrel_delta_max: " << fmt(dmax) << "\n";
  sum << "nonrel_smooth: " << (dmax < 0.0 ? "true" : "false") << "\n";
  sum << "rel_smallamp_margin_max: " << fmt(mmax) << "\n";
  sum << "rel_smallamp_smooth: " << (mmax < 0.0 ? "true" : "false") << "\n";
}

void do_crosscheck(const RunConfig& cfg, Outputs& out, std::ostringstream& sum) {
  InitialData data = cfg.make_data();
  double theta = cfg.crosscheck_theta;
  if (theta <= 0.0) theta = orbit_period_of(data, 0.0, cfg.sim);
  SimConfig sc = cfg.sim;
  sc.horizon = theta;
  sc.sample_stride = 50;
  // the 1%-of-domain coverage requirement needs a dense fan of characteristics
  sc.n_characteristics = std::max(sc.n_characteristics, 256);
  auto traces = ensemble(data, sc);
  GridSolution g = grid_from_data(data, cfg.grid_n);
  evolve_grid(g, theta, cfg.grid_cfl);
  auto cc = cross_check(g, traces);
  for (std::size_t i = 0; i < traces.size(); ++i)
    out.write("trace_" + std::to_string(i) + ".csv", trace_csv(traces[i], cfg.sim.B0));
  out.write("grid.csv", grid_csv(g));
  sum << "crosscheck_theta: " << fmt(theta) << "\n";
  sum << "maxerr_P1: " << fmt(cc.max_err[0]) << "\n";
  sum << "maxerr_P2: " << fmt(cc.max_err[1]) << "\n";
  sum << "maxerr_E1: " << fmt(cc.max_err[2]) << "\n";
  sum << "l2err_P1: " << fmt(cc.l2_err[0]) << "\n";
  sum << "l2err_P2: " << fmt(cc.l2_err[1]) << "\n";
  sum << "l2err_E1: " << fmt(cc.l2_err[2]) << "\n";
  sum << "unreliable: " << (cc.unreliable ? "true" : "false") << "\n";
}

void do_breaking_map(const RunConfig& cfg, Outputs& out, std::ostringstream& sum) {
  auto rows = breaking_map(cfg.map_b0, cfg.sim.epsilon, cfg.k, cfg.sim);
  std::ostringstream csv;
  csv << "B0, breaking_time\n";
  for (const auto& r : rows) csv << fmt(r.b0) << ", " << fmt(r.theta_star) << "\n";
  out.write("breaking_map.csv", csv.str());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    sum << "b0_" << i << ": " << fmt(rows[i].b0) << "\n";
    sum << "breaking_time_" << i << ": " << fmt(rows[i].theta_star) << "\n";
  }
}

}  // namespace

int run_cli(const CliOptions& opts) {
  auto wall0 = std::chrono::steady_clock::now();
  try {
    RunConfig cfg = load_config(opts.config_path);
    std::filesystem::create_directories(opts.out_dir);
    Outputs out;
    out.dir = opts.out_dir;
    std::ostringstream sum;
    double rho0 = opts.seed_rho_set ? opts.seed_rho : 0.0;

    const std::string& sub = opts.subcommand;
    if (sub == "simulate") do_simulate(cfg, rho0, out, sum);
    else if (sub == "ensemble") do_ensemble(cfg, out, sum);
    else if (sub == "period") do_period(cfg, rho0, out, sum);
    else if (sub == "wave") do_wave(cfg, out, sum);
    else if (sub == "floquet") do_floquet(cfg, rho0, out, sum);
    else if (sub == "criteria") do_criteria(cfg, out, sum);
    else if (sub == "crosscheck") do_crosscheck(cfg, out, sum);
    else if (sub == "breaking-map") do_breaking_map(cfg, out, sum);
    else throw ValidationError("unknown subcommand: " + sub);

    out.write("summary.txt", sum.str());

    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    std::ostringstream man;
    man << "tool_version: " << kToolVersion << "\n";
    man << "subcommand: " << sub << "\n";
    man << "seed_rho: " << (opts.seed_rho_set ? fmt(rho0) : std::string("default")) << "\n";
    man << render_config(cfg);
    for (const auto& f : out.files) man << "output: " << f << "\n";
    man << "wall_clock_seconds: " << fmt(wall) << "\n";
    {
      std::ofstream f(out.dir / "manifest.txt", std::ios::binary);
      f << man.str();
    }
    if (!opts.quiet)
      std::cout << "wrote " << out.files.size() + 1 << " files to " << opts.out_dir << "\n";
    return 0;
  } catch (const StepSizeUnderflow& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace coldwave
