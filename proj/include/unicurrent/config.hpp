#pragma once

// Declarative experiment configs: JSON in, validated typed structs out.
// Config hashing uses the canonical (key-sorted, shortest-round-trip)
// serialization, so the same file hashes identically everywhere.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "unicurrent/diffusion.hpp"
#include "unicurrent/scaling.hpp"
#include "unicurrent/units.hpp"
#include "unicurrent/wavefunction.hpp"

namespace unicurrent::config {

using json = nlohmann::json;

enum class ExperimentKind {
  Propagate,
  SweepDt,
  MassBeyond,
  Current,
  DiffusionFlux,
  SimulateAbsorbing,
  Zeno,
  Moments,
};

std::string to_string(ExperimentKind kind);

struct WavefunctionSpec {
  // polynomial form
  std::vector<cd> coefficients;
  double support = 0.0;
  SupportKind kind = SupportKind::FiniteReflecting;
  // eigenstate form
  bool is_eigenstate = false;
  int eigen_n = 1;
  double eigen_a = 1.0;
  int eigen_order = 11;

  PiecewiseWavefunction build() const;
  // Raw dt scale of the short-time expansion (callers divide by 100).
  double validity_scale(const NaturalUnits& units) const;
};

struct SweepSpec {
  double min_control = 1e-5;
  double max_control = 1e-2;
  int points_per_decade = 8;

  std::vector<double> control_grid() const;
};

struct GaussianPacketSpec {
  double x0 = 0.0;
  double width = 1.0;   // s
  double momentum = 1.0;  // k
};

struct ModelSpec {
  enum class Kind { Brownian, OU, PolynomialDrift } kind = Kind::Brownian;
  double sigma = 1.0;
  double rate = 1.0;
  std::vector<double> drift_coeffs;

  diffusion::DiffusionModel build() const;
};

struct DensitySpec {
  enum class Kind { Gaussian, OUStationary, ImageBrownian } kind = Kind::Gaussian;
  double mean = 0.0;
  double variance = 1.0;
  double x0 = -1.0;

  diffusion::DensityField build(const ModelSpec& model) const;
};

struct OutputSpec {
  std::string prefix = "run";
  bool gnuplot = false;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Moments;
  NaturalUnits units;
  double tolerance = 1e-8;
  std::uint64_t seed = 0;
  OutputSpec outputs;

  std::optional<WavefunctionSpec> wavefunction;
  std::optional<SweepSpec> sweep;
  std::string observable = "p_out";  // sweep-dt: p_out | j_lr

  double delta_t = 1e-3;  // propagate
  std::optional<double> grid_y_min, grid_y_max, grid_spacing;

  double c = 1.0;  // mass-beyond distance

  std::string current_mode = "unidirectional";
  std::optional<GaussianPacketSpec> gaussian;
  double current_x = 0.0;
  std::vector<double> delta_t_sequence;

  std::optional<ModelSpec> model;
  std::optional<DensitySpec> density;
  std::vector<double> x1_list;
  double time = 0.5;

  double boundary = 0.0;  // simulate-absorbing
  double t_max = 1.0;
  double dt_step = 1e-4;
  std::uint64_t n_paths = 100000;
  int n_output_times = 20;
  double initial_x0 = -1.0;

  scaling::DecayLaw law = scaling::DecayLaw::Zeno3_2;  // zeno
  double prefactor = 0.1;
  double total_time = 1.0;
  std::vector<std::uint64_t> n_list;

  std::vector<double> sigmas;  // moments

  std::string config_hash;
};

// Parses and validates; throws nlohmann parse errors on malformed JSON and
// ValidationError on schema or invariant violations.
ExperimentConfig parse_config_json(const json& j);
ExperimentConfig parse_config_file(const std::string& path);

std::string canonical_hash(const json& j);

}  // namespace unicurrent::config
