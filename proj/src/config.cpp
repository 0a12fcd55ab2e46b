#include "unicurrent/config.hpp"

#include <cmath>
#include <fstream>

#include "unicurrent/errors.hpp"
#include "unicurrent/propagation.hpp"

namespace unicurrent::config {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ValidationError("config: " + msg); }

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing field '") + key + "'");
  return *it;
}

double require_number(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number()) fail(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double def) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  if (!it->is_number()) fail(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

std::string string_or(const json& j, const char* key, const std::string& def) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  if (!it->is_string()) fail(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

WavefunctionSpec parse_wavefunction(const json& j) {
  WavefunctionSpec spec;
  if (j.contains("eigenstate")) {
    const json& e = j.at("eigenstate");
    spec.is_eigenstate = true;
    const double n = require_number(e, "n");
    if (n < 1.0 || n != std::floor(n)) fail("eigenstate n must be a positive integer");
    spec.eigen_n = static_cast<int>(n);
    spec.eigen_a = require_number(e, "a");
    if (!(spec.eigen_a > 0.0)) fail("eigenstate a must be positive");
    const double order = number_or(e, "order", 11.0);
    if (order < 3.0 || order != std::floor(order) || static_cast<int>(order) % 2 == 0)
      fail("eigenstate order must be an odd integer >= 3");
    spec.eigen_order = static_cast<int>(order);
    return spec;
  }
  const json& coeffs = require(j, "coefficients");
  if (!coeffs.is_array() || coeffs.empty()) fail("wavefunction coefficients must be a non-empty array");
  for (const json& c : coeffs) {
    if (c.is_number()) {
      spec.coefficients.emplace_back(c.get<double>(), 0.0);
    } else if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number()) {
      spec.coefficients.emplace_back(c[0].get<double>(), c[1].get<double>());
    } else {
      fail("wavefunction coefficients must be numbers or [re, im] pairs");
    }
  }
  bool all_zero = true;
  for (const cd& q : spec.coefficients)
    if (q != cd{}) all_zero = false;
  if (all_zero) fail("wavefunction is identically zero");
  const std::string kind = string_or(j, "kind", "finite");
  if (kind == "finite") {
    spec.kind = SupportKind::FiniteReflecting;
    spec.support = require_number(j, "support");
    if (!(spec.support > 0.0)) fail("wavefunction support must be positive");
  } else if (kind == "semi-infinite") {
    spec.kind = SupportKind::SemiInfinite;
  } else {
    fail("wavefunction kind must be 'finite' or 'semi-infinite'");
  }
  return spec;
}

SweepSpec parse_sweep(const json& j) {
  SweepSpec s;
  s.min_control = require_number(j, "min");
  s.max_control = require_number(j, "max");
  const double ppd = number_or(j, "points_per_decade", 8.0);
  if (!(s.min_control > 0.0) || !(s.max_control > s.min_control))
    fail("sweep range must satisfy 0 < min < max");
  if (ppd < 1.0 || ppd != std::floor(ppd)) fail("points_per_decade must be a positive integer");
  s.points_per_decade = static_cast<int>(ppd);
  return s;
}

ModelSpec parse_model(const json& j) {
  ModelSpec m;
  const std::string kind = string_or(j, "kind", "brownian");
  m.sigma = require_number(j, "sigma");
  if (!(m.sigma > 0.0)) fail("model sigma must be positive");
  if (kind == "brownian") {
    m.kind = ModelSpec::Kind::Brownian;
  } else if (kind == "ou") {
    m.kind = ModelSpec::Kind::OU;
    m.rate = number_or(j, "rate", 1.0);
    if (!(m.rate > 0.0)) fail("ou rate must be positive");
  } else if (kind == "custom-polynomial-drift") {
    m.kind = ModelSpec::Kind::PolynomialDrift;
    const json& coeffs = require(j, "drift_coeffs");
    if (!coeffs.is_array() || coeffs.empty()) fail("drift_coeffs must be a non-empty array");
    for (const json& c : coeffs) {
      if (!c.is_number()) fail("drift_coeffs entries must be numbers");
      m.drift_coeffs.push_back(c.get<double>());
    }
  } else {
    fail("model kind must be 'brownian', 'ou' or 'custom-polynomial-drift'");
  }
  return m;
}

DensitySpec parse_density(const json& j) {
  DensitySpec d;
  const std::string kind = string_or(j, "kind", "gaussian");
  if (kind == "gaussian") {
    d.kind = DensitySpec::Kind::Gaussian;
    d.mean = number_or(j, "mean", 0.0);
    d.variance = require_number(j, "variance");
    if (!(d.variance > 0.0)) fail("density variance must be positive");
  } else if (kind == "ou-stationary") {
    d.kind = DensitySpec::Kind::OUStationary;
  } else if (kind == "image-brownian") {
    d.kind = DensitySpec::Kind::ImageBrownian;
    d.x0 = require_number(j, "x0");
    if (!(d.x0 < 0.0)) fail("image-brownian x0 must be negative");
  } else {
    fail("density kind must be 'gaussian', 'ou-stationary' or 'image-brownian'");
  }
  return d;
}

std::vector<double> parse_number_list(const json& j, const char* key) {
  const json& arr = require(j, key);
  std::vector<double> out;
  if (arr.is_number()) {
    out.push_back(arr.get<double>());
    return out;
  }
  if (!arr.is_array() || arr.empty()) fail(std::string("field '") + key + "' must be a number or non-empty array");
  for (const json& v : arr) {
    if (!v.is_number()) fail(std::string("field '") + key + "' entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Propagate: return "propagate";
    case ExperimentKind::SweepDt: return "sweep-dt";
    case ExperimentKind::MassBeyond: return "mass-beyond";
    case ExperimentKind::Current: return "current";
    case ExperimentKind::DiffusionFlux: return "diffusion-flux";
    case ExperimentKind::SimulateAbsorbing: return "simulate-absorbing";
    case ExperimentKind::Zeno: return "zeno";
    case ExperimentKind::Moments: return "moments";
  }
  return "unknown";
}

PiecewiseWavefunction WavefunctionSpec::build() const {
  try {
    if (is_eigenstate)
      return closed_eigenstate_polynomial(BoxEigenstate(eigen_n, eigen_a), eigen_order);
    if (kind == SupportKind::SemiInfinite)
      return PiecewiseWavefunction::semi_infinite(coefficients);
    return PiecewiseWavefunction(coefficients, support, kind);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("config: wavefunction invalid: ") + e.what());
  }
}

double WavefunctionSpec::validity_scale(const NaturalUnits& units) const {
  if (is_eigenstate)
    return validity_bound(BoxEigenstate(eigen_n, eigen_a), units);
  return polynomial_validity_bound(build(), units);
}

std::vector<double> SweepSpec::control_grid() const {
  std::vector<double> grid;
  const double step = std::pow(10.0, 1.0 / points_per_decade);
  for (double v = min_control; v < max_control * (1.0 + 1e-12); v *= step)
    grid.push_back(v);
  if (grid.back() < max_control * (1.0 - 1e-12)) grid.push_back(max_control);
  return grid;
}

diffusion::DiffusionModel ModelSpec::build() const {
  switch (kind) {
    case Kind::Brownian: return diffusion::brownian_model(sigma);
    case Kind::OU: return diffusion::ou_model(rate, sigma);
    case Kind::PolynomialDrift:
      return diffusion::polynomial_drift_model(drift_coeffs, sigma);
  }
  throw ValidationError("config: unknown model kind");
}

diffusion::DensityField DensitySpec::build(const ModelSpec& model) const {
  switch (kind) {
    case Kind::Gaussian: return diffusion::gaussian_density(mean, variance);
    case Kind::OUStationary:
      if (model.kind != ModelSpec::Kind::OU)
        throw ValidationError("config: ou-stationary density needs an ou model");
      return diffusion::ou_stationary_density(model.rate, model.sigma);
    case Kind::ImageBrownian: return diffusion::brownian_image_density(x0, model.sigma);
  }
  throw ValidationError("config: unknown density kind");
}

ExperimentConfig parse_config_json(const json& j) {
  ExperimentConfig cfg;
  cfg.config_hash = canonical_hash(j);

  const json& kind_field = require(j, "experiment");
  if (!kind_field.is_string()) fail("field 'experiment' must be a string");
  const std::string kind = kind_field.get<std::string>();
  if (kind == "propagate") cfg.kind = ExperimentKind::Propagate;
  else if (kind == "sweep-dt") cfg.kind = ExperimentKind::SweepDt;
  else if (kind == "mass-beyond") cfg.kind = ExperimentKind::MassBeyond;
  else if (kind == "current") cfg.kind = ExperimentKind::Current;
  else if (kind == "diffusion-flux") cfg.kind = ExperimentKind::DiffusionFlux;
  else if (kind == "simulate-absorbing") cfg.kind = ExperimentKind::SimulateAbsorbing;
  else if (kind == "zeno") cfg.kind = ExperimentKind::Zeno;
  else if (kind == "moments") cfg.kind = ExperimentKind::Moments;
  else fail("unknown experiment kind '" + kind + "'");

  if (j.contains("units")) {
    const json& u = j.at("units");
    cfg.units.hbar = number_or(u, "hbar", 1.0);
    cfg.units.mass = number_or(u, "mass", 1.0);
    if (!(cfg.units.hbar > 0.0) || !(cfg.units.mass > 0.0))
      fail("units must be positive");
  }
  cfg.tolerance = number_or(j, "tolerance", 1e-8);
  if (!(cfg.tolerance > 0.0)) fail("tolerance must be positive");
  const double seed = number_or(j, "seed", 0.0);
  if (seed < 0.0 || seed != std::floor(seed)) fail("seed must be a non-negative integer");
  cfg.seed = static_cast<std::uint64_t>(seed);

  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    cfg.outputs.prefix = string_or(o, "prefix", "run");
    if (o.contains("gnuplot")) {
      if (!o.at("gnuplot").is_boolean()) fail("outputs.gnuplot must be a boolean");
      cfg.outputs.gnuplot = o.at("gnuplot").get<bool>();
    }
  }

  switch (cfg.kind) {
    case ExperimentKind::Propagate: {
      cfg.wavefunction = parse_wavefunction(require(j, "wavefunction"));
      cfg.delta_t = require_number(j, "delta_t");
      if (!(cfg.delta_t > 0.0)) fail("delta_t must be positive");
      if (j.contains("grid")) {
        const json& g = j.at("grid");
        if (g.contains("y_min")) cfg.grid_y_min = require_number(g, "y_min");
        if (g.contains("y_max")) cfg.grid_y_max = require_number(g, "y_max");
        if (g.contains("max_spacing")) cfg.grid_spacing = require_number(g, "max_spacing");
      }
      break;
    }
    case ExperimentKind::SweepDt: {
      cfg.wavefunction = parse_wavefunction(require(j, "wavefunction"));
      cfg.sweep = parse_sweep(require(j, "sweep"));
      cfg.observable = string_or(j, "observable", "p_out");
      if (cfg.observable != "p_out" && cfg.observable != "j_lr")
        fail("observable must be 'p_out' or 'j_lr'");
      break;
    }
    case ExperimentKind::MassBeyond: {
      cfg.wavefunction = parse_wavefunction(require(j, "wavefunction"));
      cfg.sweep = parse_sweep(require(j, "sweep"));
      cfg.c = require_number(j, "c");
      if (!(cfg.c > 0.0)) fail("c must be positive");
      break;
    }
    case ExperimentKind::Current: {
      cfg.current_mode = string_or(j, "mode", "unidirectional");
      if (cfg.current_mode == "unidirectional") {
        cfg.wavefunction = parse_wavefunction(require(j, "wavefunction"));
        cfg.sweep = parse_sweep(require(j, "sweep"));
      } else if (cfg.current_mode == "feynman-vs-schrodinger") {
        const json& g = require(j, "gaussian");
        GaussianPacketSpec packet;
        packet.x0 = number_or(g, "x0", 0.0);
        packet.width = number_or(g, "s", 1.0);
        packet.momentum = number_or(g, "k", 1.0);
        if (!(packet.width > 0.0)) fail("gaussian width must be positive");
        cfg.gaussian = packet;
        cfg.current_x = number_or(j, "x", 0.0);
        cfg.delta_t_sequence = parse_number_list(j, "delta_t_sequence");
        for (std::size_t i = 0; i + 1 < cfg.delta_t_sequence.size(); ++i)
          if (!(cfg.delta_t_sequence[i] > cfg.delta_t_sequence[i + 1]))
            fail("delta_t_sequence must be strictly decreasing");
        if (cfg.delta_t_sequence.size() < 2 || !(cfg.delta_t_sequence.back() > 0.0))
          fail("delta_t_sequence needs at least two positive entries");
      } else {
        fail("current mode must be 'unidirectional' or 'feynman-vs-schrodinger'");
      }
      break;
    }
    case ExperimentKind::DiffusionFlux: {
      cfg.model = parse_model(require(j, "model"));
      cfg.density = parse_density(require(j, "density"));
      cfg.x1_list = parse_number_list(j, "x1");
      cfg.time = number_or(j, "t", 0.5);
      cfg.delta_t_sequence = parse_number_list(j, "delta_t");
      for (double dt : cfg.delta_t_sequence)
        if (!(dt > 0.0)) fail("delta_t entries must be positive");
      if (cfg.density->kind == DensitySpec::Kind::ImageBrownian) {
        for (double dt : cfg.delta_t_sequence)
          if (!(cfg.time - dt > 0.0)) fail("image-brownian density needs t - delta_t > 0");
      }
      break;
    }
    case ExperimentKind::SimulateAbsorbing: {
      cfg.model = parse_model(require(j, "model"));
      const json& init = require(j, "initial");
      if (string_or(init, "kind", "point") != "point") fail("initial kind must be 'point'");
      cfg.initial_x0 = require_number(init, "x0");
      cfg.boundary = number_or(j, "boundary", 0.0);
      cfg.t_max = require_number(j, "t_max");
      cfg.dt_step = require_number(j, "dt_step");
      const double n_paths = require_number(j, "n_paths");
      if (n_paths < 10000.0 || n_paths != std::floor(n_paths))
        fail("n_paths must be an integer >= 1e4");
      cfg.n_paths = static_cast<std::uint64_t>(n_paths);
      const double n_out = number_or(j, "n_output_times", 20.0);
      if (n_out < 1.0 || n_out != std::floor(n_out)) fail("n_output_times must be a positive integer");
      cfg.n_output_times = static_cast<int>(n_out);
      if (!(cfg.t_max > 0.0) || !(cfg.dt_step > 0.0)) fail("t_max and dt_step must be positive");
      if (cfg.initial_x0 >= cfg.boundary) fail("initial point must lie left of the boundary");
      break;
    }
    case ExperimentKind::Zeno: {
      const std::string law = string_or(j, "law", "zeno-3-2");
      if (law == "zeno-3-2") cfg.law = scaling::DecayLaw::Zeno3_2;
      else if (law == "anti-zeno-1-2") cfg.law = scaling::DecayLaw::AntiZeno1_2;
      else fail("law must be 'zeno-3-2' or 'anti-zeno-1-2'");
      cfg.prefactor = require_number(j, "prefactor");
      cfg.total_time = require_number(j, "T");
      if (!(cfg.prefactor > 0.0) || !(cfg.total_time > 0.0))
        fail("prefactor and T must be positive");
      for (double n : parse_number_list(j, "N")) {
        if (n < 1.0 || n != std::floor(n)) fail("N entries must be positive integers");
        cfg.n_list.push_back(static_cast<std::uint64_t>(n));
      }
      break;
    }
    case ExperimentKind::Moments: {
      cfg.sigmas = parse_number_list(j, "sigma");
      for (double s : cfg.sigmas)
        if (!(s > 0.0)) fail("sigma entries must be positive");
      break;
    }
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j = json::parse(in);  // propagates nlohmann parse_error
  return parse_config_json(j);
}

std::string canonical_hash(const json& j) {
  const std::string canonical = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace unicurrent::config
