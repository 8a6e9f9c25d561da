#include "coldwave/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "coldwave/errors.hpp"

namespace coldwave {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos]))) ++pos;
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ParseError("invalid number for " + key + ": '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  double x = parse_double(key, v);
  double r = std::round(x);
  if (std::fabs(x - r) > 0.0 || std::fabs(r) > 2e9)
    throw ParseError("expected an integer for " + key + ": '" + v + "'");
  return static_cast<int>(r);
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ParseError("empty element in list for " + key);
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw ParseError("empty list for " + key);
  return out;
}

void apply_key(RunConfig& c, const std::string& key, const std::string& val) {
  if (key == "sim.b0") c.sim.B0 = parse_double(key, val);
  else if (key == "sim.rel_tol") c.sim.rel_tol = parse_double(key, val);
  else if (key == "sim.abs_tol") c.sim.abs_tol = parse_double(key, val);
  else if (key == "sim.blowup_threshold") c.sim.blowup_threshold = parse_double(key, val);
  else if (key == "sim.n_characteristics") c.sim.n_characteristics = parse_int(key, val);
  else if (key == "data.family") {
    if (val != "equilibrium" && val != "small-perturbation" && val != "constant-k2" &&
        val != "linear-p2")
      throw ParseError("unknown value for data.family: '" + val + "'");
    c.family = val;
  } else if (key == "data.epsilon") c.sim.epsilon = parse_double(key, val);
  else if (key == "data.k") c.k = parse_int(key, val);
  else if (key == "run.horizon") c.sim.horizon = parse_double(key, val);
  else if (key == "grid.n") c.grid_n = parse_int(key, val);
  else if (key == "grid.cfl") c.grid_cfl = parse_double(key, val);
  else if (key == "wave.speed") c.wave_speed = parse_double(key, val);
  else if (key == "wave.k1") c.wave_k1 = parse_double(key, val);
  else if (key == "wave.k2") c.wave_k2 = parse_double(key, val);
  else if (key == "wave.xi_span") c.wave_xi_span = parse_double(key, val);
  else if (key == "wave.p2_at_0") c.wave_p2_at_0 = parse_double(key, val);
  else if (key == "wave.branch") c.wave_branch = parse_int(key, val);
  else if (key == "map.b0_values") c.map_b0 = parse_double_list(key, val);
  else if (key == "crosscheck.theta") c.crosscheck_theta = parse_double(key, val);
  else throw ParseError("unknown configuration key: " + key);
}

void validate_extras(const RunConfig& c) {
  c.sim.validate();
  if (c.k < 1) throw ValidationError("data.k must be >= 1");
  if (c.grid_n < 16 || (c.grid_n & (c.grid_n - 1)) != 0)
    throw ValidationError("grid.n must be a power of two, at least 16");
  if (!(c.grid_cfl > 0.0) || c.grid_cfl > 0.5)
    throw ValidationError("grid.cfl must lie in (0, 0.5]");
  if (c.wave_branch != 1 && c.wave_branch != -1)
    throw ValidationError("wave.branch must be +1 or -1");
  if (c.wave_k2 < 2.0) throw ValidationError("wave.k2 must be >= 2");
  if (c.wave_xi_span < 0.0) throw ValidationError("wave.xi_span must be >= 0");
  if (c.crosscheck_theta < 0.0) throw ValidationError("crosscheck.theta must be >= 0");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw ParseError("config line " + std::to_string(lineno) + ": empty key");
    apply_key(c, key, val);
  }
  validate_extras(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string render_config(const RunConfig& c) {
  std::ostringstream out;
  out << "sim.b0 = " << fmt(c.sim.B0) << "\n";
  out << "sim.rel_tol = " << fmt(c.sim.rel_tol) << "\n";
  out << "sim.abs_tol = " << fmt(c.sim.abs_tol) << "\n";
  out << "sim.blowup_threshold = " << fmt(c.sim.blowup_threshold) << "\n";
  out << "sim.n_characteristics = " << c.sim.n_characteristics << "\n";
  out << "data.family = " << c.family << "\n";
  out << "data.epsilon = " << fmt(c.sim.epsilon) << "\n";
  out << "data.k = " << c.k << "\n";
  out << "run.horizon = " << fmt(c.sim.horizon) << "\n";
  out << "grid.n = " << c.grid_n << "\n";
  out << "grid.cfl = " << fmt(c.grid_cfl) << "\n";
  out << "wave.speed = " << fmt(c.wave_speed) << "\n";
  out << "wave.k1 = " << fmt(c.wave_k1) << "\n";
  out << "wave.k2 = " << fmt(c.wave_k2) << "\n";
  out << "wave.xi_span = " << fmt(c.wave_xi_span) << "\n";
  out << "wave.p2_at_0 = " << fmt(c.wave_p2_at_0) << "\n";
  out << "wave.branch = " << c.wave_branch << "\n";
  out << "map.b0_values = ";
  for (std::size_t i = 0; i < c.map_b0.size(); ++i)
    out << (i ? "," : "") << fmt(c.map_b0[i]);
  out << "\n";
  out << "crosscheck.theta = " << fmt(c.crosscheck_theta) << "\n";
  return out.str();
}

InitialData RunConfig::make_data() const {
  if (family == "equilibrium") return make_equilibrium(sim.B0);
  if (family == "small-perturbation")
    return make_small_perturbation(sim.epsilon, sim.B0, k);
  if (family == "constant-k2") return make_uniform_k2_wave(sim.epsilon, sim.B0, k);
  if (family == "linear-p2") return make_linear_p2(sim.B0);
  throw ValidationError("unknown data family: " + family);
}

}  // namespace coldwave
