#include "unicurrent/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <random>

#include "unicurrent/artifacts.hpp"
#include "unicurrent/errors.hpp"
#include "unicurrent/propagation.hpp"

namespace unicurrent::runner {

namespace {

namespace fs = std::filesystem;
using config::ExperimentConfig;
using config::ExperimentKind;

std::string art_path(const RunOptions& opt, const ExperimentConfig& cfg,
                     const std::string& suffix) {
  fs::create_directories(opt.out_dir);
  return (fs::path(opt.out_dir) / (cfg.outputs.prefix + suffix)).string();
}

double effective_tol(const ExperimentConfig& cfg, const RunOptions& opt) {
  return opt.tol_override.value_or(cfg.tolerance);
}

std::uint64_t effective_seed(const ExperimentConfig& cfg, const RunOptions& opt) {
  return opt.seed_override.value_or(cfg.seed);
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return std::string(buf);
}

GridSpec grid_from_config(const ExperimentConfig& cfg) {
  GridSpec spec;
  spec.y_min = cfg.grid_y_min;
  spec.y_max = cfg.grid_y_max;
  spec.max_spacing = cfg.grid_spacing;
  return spec;
}

GridWavefunction make_packet(const config::GaussianPacketSpec& g) {
  const double norm = std::pow(2.0 * M_PI * g.width * g.width, -0.25);
  auto f = [&](double x) -> cd {
    const double u = (x - g.x0) / (2.0 * g.width);
    return std::polar(norm * std::exp(-u * u), g.momentum * x);
  };
  const double half = std::max(12.0 * g.width, std::abs(g.x0) + 10.0 * g.width);
  return GridWavefunction::sample(f, g.x0 - half, g.x0 + half, 4096);
}

RunOutcome run_propagate(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const PiecewiseWavefunction wf = cfg.wavefunction->build();
  const PropagationResult result =
      propagate(wf, cfg.delta_t, cfg.units, grid_from_config(cfg), effective_tol(cfg, opt));

  RunOutcome out;
  artifacts::CsvWriter csv(art_path(opt, cfg, "_grid.csv"), cfg.config_hash, "propagate");
  csv.comment("columns: y, Re(psi), Im(psi), |psi|^2");
  csv.columns({"y", "re_psi", "im_psi", "abs2_psi"});
  for (std::size_t i = 0; i < result.grid.size(); ++i) {
    const cd v = result.grid[i];
    const double row[4] = {result.grid.x(i), v.real(), v.imag(), std::norm(v)};
    csv.row(row);
  }
  out.artifacts.push_back(csv.finish());

  nlohmann::json summary{{"experiment", "propagate"},
                         {"alpha", result.alpha},
                         {"p_out", result.p_out},
                         {"p_out_tail_bound", result.p_out_tail_bound},
                         {"validity_ok", result.validity_ok},
                         {"grid_points", result.grid.size()}};
  out.artifacts.push_back(artifacts::write_summary_json(
      art_path(opt, cfg, "_summary.json"), summary, cfg.config_hash));
  if (cfg.outputs.gnuplot)
    out.artifacts.push_back(artifacts::write_gnuplot_script(
        art_path(opt, cfg, ".gp"), cfg.outputs.prefix + "_grid.csv",
        "propagated density", false, 1, 4));

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.summary_line = fmt("propagate: p_out=%.6g (tail<=%.2g) alpha=%.3g validity_ok=%d wall=%.2fs",
                         result.p_out, result.p_out_tail_bound, result.alpha,
                         result.validity_ok ? 1 : 0, secs);
  return out;
}

RunOutcome run_current_comparison(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const GridWavefunction packet = make_packet(*cfg.gaussian);
  const CurrentEstimate schrod = schrodinger_current(packet, cfg.current_x, cfg.units);
  const CurrentEstimate feynman =
      feynman_limit_current(packet, cfg.current_x, cfg.delta_t_sequence, cfg.units);
  const double rel =
      std::abs(feynman.value - schrod.value) / std::max(std::abs(schrod.value), 1e-300);

  RunOutcome out;
  artifacts::CsvWriter csv(art_path(opt, cfg, "_current.csv"), cfg.config_hash, "current");
  csv.columns({"delta_t", "feynman_quotient_extrapolated", "schrodinger"});
  for (double dt : cfg.delta_t_sequence) {
    const double row[3] = {dt, feynman.value, schrod.value};
    csv.row(row);
  }
  out.artifacts.push_back(csv.finish());
  nlohmann::json summary{{"experiment", "current"},
                         {"mode", "feynman-vs-schrodinger"},
                         {"feynman_limit", feynman.value},
                         {"schrodinger", schrod.value},
                         {"relative_difference", rel}};
  out.artifacts.push_back(artifacts::write_summary_json(
      art_path(opt, cfg, "_summary.json"), summary, cfg.config_hash));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.summary_line = fmt("current: feynman=%.6g schrodinger=%.6g rel_diff=%.3g wall=%.2fs",
                         feynman.value, schrod.value, rel, secs);
  return out;
}

RunOutcome run_diffusion_flux(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const diffusion::DiffusionModel model = cfg.model->build();
  const diffusion::DensityField density = cfg.density->build(*cfg.model);
  const double tol = effective_tol(cfg, opt);

  RunOutcome out;
  artifacts::CsvWriter csv(art_path(opt, cfg, "_flux.csv"), cfg.config_hash, "diffusion-flux");
  csv.columns({"x1", "delta_t", "j_lr", "j_rl", "j_net", "j_net_closed_form"});
  nlohmann::json table = nlohmann::json::array();
  for (double x1 : cfg.x1_list) {
    const double closed = diffusion::net_flux_closed_form(model, density, x1, cfg.time);
    for (double dt : cfg.delta_t_sequence) {
      const diffusion::FluxEstimate f =
          diffusion::estimate_flux(model, density, x1, cfg.time, dt, tol);
      const double row[6] = {x1, dt, f.j_lr, f.j_rl, f.j_net, closed};
      csv.row(row);
    }
    double change = 0.0;
    const double extrapolated = diffusion::net_flux_extrapolated(
        model, density, x1, cfg.time, cfg.delta_t_sequence, tol, &change);
    table.push_back({{"x1", x1},
                     {"j_net_closed_form", closed},
                     {"j_net_extrapolated", extrapolated},
                     {"extrapolation_change", change}});
  }
  out.artifacts.push_back(csv.finish());
  nlohmann::json summary{{"experiment", "diffusion-flux"}, {"t", cfg.time}, {"points", table}};
  out.artifacts.push_back(artifacts::write_summary_json(
      art_path(opt, cfg, "_summary.json"), summary, cfg.config_hash));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.summary_line =
      fmt("diffusion-flux: %zu point(s), %zu dt value(s), wall=%.2fs",
          cfg.x1_list.size(), cfg.delta_t_sequence.size(), secs);
  return out;
}

RunOutcome run_simulate_absorbing(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const diffusion::DiffusionModel model = cfg.model->build();
  diffusion::MonteCarloSpec spec;
  spec.t_max = cfg.t_max;
  spec.dt_step = cfg.dt_step;
  spec.n_paths = cfg.n_paths;
  spec.seed = effective_seed(cfg, opt);
  spec.n_output_times = cfg.n_output_times;
  spec.threads = opt.threads;
  const double x0 = cfg.initial_x0;
  const diffusion::SurvivalCurve curve = diffusion::simulate_absorbing(
      model, [x0](std::mt19937_64&) { return x0; }, cfg.boundary, spec);

  RunOutcome out;
  artifacts::CsvWriter csv(art_path(opt, cfg, "_survival.csv"), cfg.config_hash,
                           "simulate-absorbing");
  csv.comment(fmt("n_paths=%llu dt_step=%s seed=%llu",
                  static_cast<unsigned long long>(curve.n_paths),
                  artifacts::format_double(curve.dt_step).c_str(),
                  static_cast<unsigned long long>(spec.seed)));
  csv.columns({"t", "survival", "stderr", "absorption_rate"});
  for (const auto& p : curve.points) {
    const double row[4] = {p.t, p.survival, p.std_error, p.absorption_rate};
    csv.row(row);
  }
  out.artifacts.push_back(csv.finish());
  nlohmann::json summary{{"experiment", "simulate-absorbing"},
                         {"n_paths", curve.n_paths},
                         {"dt_step", curve.dt_step},
                         {"seed", spec.seed},
                         {"final_survival", curve.points.back().survival}};
  out.artifacts.push_back(artifacts::write_summary_json(
      art_path(opt, cfg, "_summary.json"), summary, cfg.config_hash));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.summary_line = fmt("simulate-absorbing: S(%.3g)=%.4f after %llu paths, wall=%.2fs",
                         curve.points.back().t, curve.points.back().survival,
                         static_cast<unsigned long long>(curve.n_paths), secs);
  return out;
}

RunOutcome run_zeno(const ExperimentConfig& cfg, const RunOptions& opt) {
  RunOutcome out;
  artifacts::CsvWriter csv(art_path(opt, cfg, "_zeno.csv"), cfg.config_hash, "zeno");
  csv.columns({"N", "delta_t", "per_step_survival", "product_survival",
               "exponential_approx", "expected_decays"});
  double last_decays = 0.0;
  for (std::uint64_t n : cfg.n_list) {
    const scaling::SurvivalStatistics s =
        scaling::zeno_survival(cfg.law, cfg.prefactor, cfg.total_time, n);
    const double row[6] = {static_cast<double>(n), s.delta_t, s.per_step_survival,
                           s.product_survival, s.exponential_approx, s.expected_decays};
    csv.row(row);
    last_decays = s.expected_decays;
  }
  out.artifacts.push_back(csv.finish());
  nlohmann::json summary{
      {"experiment", "zeno"},
      {"law", cfg.law == scaling::DecayLaw::Zeno3_2 ? "zeno-3-2" : "anti-zeno-1-2"},
      {"prefactor", cfg.prefactor},
      {"T", cfg.total_time}};
  out.artifacts.push_back(artifacts::write_summary_json(
      art_path(opt, cfg, "_summary.json"), summary, cfg.config_hash));
  out.summary_line = fmt("zeno: %zu N value(s), expected_decays(last)=%.6g",
                         cfg.n_list.size(), last_decays);
  return out;
}

RunOutcome run_moments(const ExperimentConfig& cfg, const RunOptions& opt) {
  RunOutcome out;
  artifacts::CsvWriter csv(art_path(opt, cfg, "_moments.csv"), cfg.config_hash, "moments");
  csv.columns({"sigma", "m_cubic", "m_linear", "m_difference"});
  std::string values;
  for (double s : cfg.sigmas) {
    const auto m = diffusion::gaussian_moment_identities(s, effective_tol(cfg, opt) * 1e-4);
    const double row[4] = {s, m[0], m[1], m[2]};
    csv.row(row);
    if (!values.empty()) values += "; ";
    values += fmt("sigma=%g: %g %g %g", s, m[0], m[1], m[2]);
  }
  out.artifacts.push_back(csv.finish());
  nlohmann::json summary{{"experiment", "moments"}, {"sigmas", cfg.sigmas}};
  out.artifacts.push_back(artifacts::write_summary_json(
      art_path(opt, cfg, "_summary.json"), summary, cfg.config_hash));
  out.summary_line = "moments: " + values;
  return out;
}

}  // namespace

scaling::SweepResult run_sweep(const config::ExperimentConfig& cfg,
                               const RunOptions& opt,
                               std::vector<std::string>* artifact_sink) {
  if (!cfg.sweep || !cfg.wavefunction)
    throw ValidationError("run_sweep: config lacks sweep or wavefunction");
  const double tol = effective_tol(cfg, opt);
  const PiecewiseWavefunction wf = cfg.wavefunction->build();
  const double validity = cfg.wavefunction->validity_scale(cfg.units) / 100.0;

  const bool is_mass_beyond = cfg.kind == ExperimentKind::MassBeyond;
  const bool is_current =
      cfg.kind == ExperimentKind::Current || cfg.observable == "j_lr";
  const std::string observable =
      is_mass_beyond ? "P_c" : (is_current ? "J_LR" : "P_out");

  std::vector<double> controls;
  std::size_t pruned = 0;
  for (double dt : cfg.sweep->control_grid()) {
    if (dt <= validity) controls.push_back(dt);
    else ++pruned;
  }

  artifacts::CsvWriter csv(art_path(opt, cfg, "_sweep.csv"), cfg.config_hash,
                           config::to_string(cfg.kind));
  csv.comment("observable: " + observable);
  if (pruned > 0)
    csv.comment(fmt("%zu point(s) pruned by validity bound dt <= %.6g", pruned, validity));
  csv.columns({is_mass_beyond ? "alpha" : "delta_t", "value", "error"});

  std::vector<scaling::SweepPoint> points;
  try {
    for (double dt : controls) {
      double value;
      if (is_mass_beyond) {
        value = mass_beyond(wf, cfg.c, dt, cfg.units, tol);
      } else if (is_current) {
        value = unidirectional_current_lr(wf, dt, cfg.units, tol).value;
      } else {
        value = mass_beyond(wf, 0.0, dt, cfg.units, tol);
      }
      const double control = is_mass_beyond ? cfg.units.alpha(dt) : dt;
      const scaling::SweepPoint p{control, value, tol * std::abs(value)};
      points.push_back(p);
      const double row[3] = {p.control, p.value, p.error};
      csv.row(row);
    }
  } catch (...) {
    // Persist what we have, flagged, then propagate the failure.
    csv.comment("status: aborted mid-sweep");
    if (artifact_sink) artifact_sink->push_back(csv.finish());
    nlohmann::json summary{{"experiment", config::to_string(cfg.kind)},
                           {"status", "aborted"},
                           {"points_completed", points.size()}};
    const std::string p = artifacts::write_summary_json(
        art_path(opt, cfg, "_summary.json"), summary, cfg.config_hash);
    if (artifact_sink) artifact_sink->push_back(p);
    throw;
  }
  if (artifact_sink) artifact_sink->push_back(csv.finish());

  const scaling::SweepResult fit = scaling::fit_exponent(points);
  nlohmann::json summary{{"experiment", config::to_string(cfg.kind)},
                         {"observable", observable},
                         {"exponent", fit.fitted_exponent},
                         {"stderr", fit.exponent_stderr},
                         {"prefactor", fit.fitted_prefactor},
                         {"window", {fit.window_low, fit.window_high}},
                         {"points", points.size()},
                         {"pruned", pruned}};
  const std::string p = artifacts::write_summary_json(
      art_path(opt, cfg, "_summary.json"), summary, cfg.config_hash);
  if (artifact_sink) artifact_sink->push_back(p);
  if (cfg.outputs.gnuplot) {
    const std::string gp = artifacts::write_gnuplot_script(
        art_path(opt, cfg, ".gp"), cfg.outputs.prefix + "_sweep.csv",
        observable + " sweep", true, 1, 2);
    if (artifact_sink) artifact_sink->push_back(gp);
  }
  return fit;
}

RunOutcome run(const config::ExperimentConfig& cfg, const RunOptions& opt) {
  switch (cfg.kind) {
    case ExperimentKind::Propagate:
      return run_propagate(cfg, opt);
    case ExperimentKind::SweepDt:
    case ExperimentKind::MassBeyond:
      break;  // handled below
    case ExperimentKind::Current:
      if (cfg.current_mode == "feynman-vs-schrodinger")
        return run_current_comparison(cfg, opt);
      break;  // unidirectional: sweep driver
    case ExperimentKind::DiffusionFlux:
      return run_diffusion_flux(cfg, opt);
    case ExperimentKind::SimulateAbsorbing:
      return run_simulate_absorbing(cfg, opt);
    case ExperimentKind::Zeno:
      return run_zeno(cfg, opt);
    case ExperimentKind::Moments:
      return run_moments(cfg, opt);
  }

  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome out;
  out.sweep = run_sweep(cfg, opt, &out.artifacts);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.summary_line = fmt("%s: exponent=%.4g±%.2g prefactor=%.4g points=%zu wall=%.2fs",
                         config::to_string(cfg.kind).c_str(), out.sweep->fitted_exponent,
                         out.sweep->exponent_stderr, out.sweep->fitted_prefactor,
                         out.sweep->points.size(), secs);
  return out;
}

}  // namespace unicurrent::runner
