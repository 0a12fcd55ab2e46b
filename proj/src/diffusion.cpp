#include "unicurrent/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "unicurrent/quadrature.hpp"

namespace unicurrent::diffusion {

namespace {

constexpr double kGaussianCut = 10.0;  // exp(-50) leaves nothing behind

double central_derivative(const Field& f, double x, double t) {
  const double h = 1e-4 * std::max(1.0, std::abs(x));
  return (-f(x + 2 * h, t) + 8.0 * f(x + h, t) - 8.0 * f(x - h, t) + f(x - 2 * h, t)) /
         (12.0 * h);
}

// J_LR(x1, t, dt) in the stretched variables:
//   int_0^inf dxi int_xi^inf dzeta
//     exp(-[zeta - b(y) sqrt(dt)]^2 / (2 sigma^2(y))) p(y, t - dt)
//       / (sqrt(2 pi dt) sigma(y)),
// with y = x1 - (zeta - xi) sqrt(dt). Integration order is swapped so the
// inner xi-range is finite: zeta outer over [0, zeta_max], xi inner [0, zeta].
double flux_lr_impl(const DiffusionModel& model, const DensityField& density,
                    double x1, double t, double dt, double tol) {
  model.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("flux: delta_t must be positive");
  const double sdt = std::sqrt(dt);

  // Bound sigma and drift over the reachable y-range to size the cut-off.
  double sigma_max = model.sigma_floor, drift_max = 0.0;
  {
    double zeta_reach = kGaussianCut * std::max(model.noise(x1, t), model.sigma_floor) +
                        std::abs(model.drift(x1, t)) * sdt + 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      sigma_max = model.sigma_floor;
      drift_max = 0.0;
      for (int i = 0; i <= 64; ++i) {
        const double y = x1 - zeta_reach * sdt * static_cast<double>(i) / 64.0;
        sigma_max = std::max(sigma_max, model.noise(y, t));
        drift_max = std::max(drift_max, std::abs(model.drift(y, t)));
      }
      zeta_reach = kGaussianCut * sigma_max + drift_max * sdt + 1.0;
    }
  }
  const double zeta_max = kGaussianCut * sigma_max + drift_max * sdt;
  const double norm = 1.0 / std::sqrt(2.0 * M_PI * dt);

  auto outer = [&](double zeta) -> double {
    auto inner = [&](double xi) -> double {
      const double y = x1 - (zeta - xi) * sdt;
      const double sigma = std::max(model.noise(y, t), model.sigma_floor);
      const double u = zeta - model.drift(y, t) * sdt;
      const double dens = density.p(y, t - dt);
      if (dens == 0.0) return 0.0;
      return std::exp(-0.5 * u * u / (sigma * sigma)) / sigma * dens;
    };
    if (zeta <= 0.0) return 0.0;
    return quad::adaptive<double>(inner, 0.0, zeta, tol / (4.0 * zeta_max) * zeta);
  };
  const double value = quad::adaptive<double>(outer, 0.0, zeta_max, tol);
  return norm * value;
}

DiffusionModel mirror(const DiffusionModel& m) {
  DiffusionModel out;
  out.drift = [f = m.drift](double x, double t) { return -f(-x, t); };
  out.noise = [f = m.noise](double x, double t) { return f(-x, t); };
  if (m.d_sigma_sq_dx)
    out.d_sigma_sq_dx = [f = m.d_sigma_sq_dx](double x, double t) { return -f(-x, t); };
  out.sigma_floor = m.sigma_floor;
  return out;
}

DensityField mirror(const DensityField& d) {
  DensityField out;
  out.p = [f = d.p](double x, double t) { return f(-x, t); };
  if (d.dp_dx) out.dp_dx = [f = d.dp_dx](double x, double t) { return -f(-x, t); };
  out.absorbing_at_zero = d.absorbing_at_zero;
  return out;
}

}  // namespace

void DiffusionModel::validate() const {
  if (!drift || !noise)
    throw std::invalid_argument("DiffusionModel: drift and noise fields are required");
}

double flux_lr_finite_dt(const DiffusionModel& model, const DensityField& density,
                         double x1, double t, double delta_t, double tol) {
  return flux_lr_impl(model, density, x1, t, delta_t, tol);
}

double flux_rl_finite_dt(const DiffusionModel& model, const DensityField& density,
                         double x1, double t, double delta_t, double tol) {
  return flux_lr_impl(mirror(model), mirror(density), -x1, t, delta_t, tol);
}

FluxEstimate estimate_flux(const DiffusionModel& model, const DensityField& density,
                           double x1, double t, double delta_t, double tol) {
  const double lr = flux_lr_finite_dt(model, density, x1, t, delta_t, tol);
  const double rl = flux_rl_finite_dt(model, density, x1, t, delta_t, tol);
  const bool divergent = density.p(x1, t) > 0.0;
  return FluxEstimate{lr, rl, lr - rl, delta_t, divergent, divergent};
}

double net_flux_closed_form(const DiffusionModel& model, const DensityField& density,
                            double x1, double t) {
  model.validate();
  const double p = density.p(x1, t);
  const double dp = density.dp_dx ? density.dp_dx(x1, t)
                                  : central_derivative(density.p, x1, t);
  const double sigma = model.noise(x1, t);
  double dss;
  if (model.d_sigma_sq_dx) {
    dss = model.d_sigma_sq_dx(x1, t);
  } else {
    Field sq = [&](double x, double tt) {
      const double s = model.noise(x, tt);
      return s * s;
    };
    dss = central_derivative(sq, x1, t);
  }
  // -d/dx [sigma^2 p / 2] + b p
  return -0.5 * (dss * p + sigma * sigma * dp) + model.drift(x1, t) * p;
}

double net_flux_extrapolated(const DiffusionModel& model, const DensityField& density,
                             double x1, double t, std::span<const double> delta_ts,
                             double tol, double* change_out) {
  if (delta_ts.size() < 2)
    throw std::invalid_argument("net_flux_extrapolated: need at least two dt values");
  std::vector<double> h(delta_ts.size()), values(delta_ts.size());
  for (std::size_t i = 0; i < delta_ts.size(); ++i) {
    const FluxEstimate f = estimate_flux(model, density, x1, t, delta_ts[i], tol);
    h[i] = std::sqrt(delta_ts[i]);  // the expansion runs in sqrt(dt)
    values[i] = f.j_net;
  }
  return quad::neville_to_zero<double>(h, values, change_out);
}

std::array<double, 3> gaussian_moment_identities(double sigma, double tol) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("gaussian_moment_identities: sigma must be positive");
  const double cut = 12.0 * sigma;
  const double norm = 1.0 / (std::sqrt(2.0 * M_PI) * sigma);
  auto weighted = [&](auto&& w) -> double {
    auto outer = [&](double xi) -> double {
      auto inner = [&](double zeta) -> double {
        return w(xi, zeta) * std::exp(-0.5 * zeta * zeta / (sigma * sigma));
      };
      return quad::adaptive<double>(inner, xi, cut, tol / (3.0 * cut));
    };
    return norm * quad::adaptive<double>(outer, 0.0, cut, tol / 3.0);
  };
  return {
      weighted([](double xi, double zeta) { return zeta * zeta * (zeta - xi); }),
      weighted([](double, double zeta) { return zeta; }),
      weighted([](double xi, double zeta) { return zeta - xi; }),
  };
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SurvivalCurve simulate_absorbing(const DiffusionModel& model,
                                 const std::function<double(std::mt19937_64&)>& initial_sampler,
                                 double boundary, const MonteCarloSpec& spec) {
  model.validate();
  if (spec.n_paths < 10000)
    throw std::invalid_argument("simulate_absorbing: need at least 1e4 paths");
  if (!(spec.dt_step > 0.0) || !(spec.t_max > 0.0))
    throw std::invalid_argument("simulate_absorbing: t_max and dt_step must be positive");
  if (spec.n_output_times < 1)
    throw std::invalid_argument("simulate_absorbing: need at least one output time");

  const std::uint64_t n = spec.n_paths;
  const double dt = spec.dt_step;
  const std::uint64_t n_steps =
      static_cast<std::uint64_t>(std::ceil(spec.t_max / dt - 1e-9));
  std::vector<double> absorb_time(n, std::numeric_limits<double>::infinity());

  auto run_block = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      std::mt19937_64 rng(splitmix64(spec.seed ^ (i + 1) * 0x9e3779b97f4a7c15ULL));
      std::normal_distribution<double> gauss;
      double x = initial_sampler(rng);
      if (x >= boundary) {
        absorb_time[i] = 0.0;
        continue;
      }
      const double sdt = std::sqrt(dt);
      double time = 0.0;
      for (std::uint64_t s = 0; s < n_steps; ++s) {
        x += model.drift(x, time) * dt + model.noise(x, time) * sdt * gauss(rng);
        time = static_cast<double>(s + 1) * dt;
        if (x >= boundary) {
          absorb_time[i] = time;
          break;
        }
      }
    }
  };

  const int threads = std::max(1, spec.threads);
  if (threads == 1) {
    run_block(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t block = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::uint64_t b = std::min<std::uint64_t>(n, t * block);
      const std::uint64_t e = std::min<std::uint64_t>(n, (t + 1) * block);
      if (b < e) pool.emplace_back(run_block, b, e);
    }
    for (auto& th : pool) th.join();
  }

  SurvivalCurve curve;
  curve.n_paths = n;
  curve.dt_step = dt;
  curve.points.resize(spec.n_output_times);
  const double dt_out = spec.t_max / spec.n_output_times;
  std::vector<std::uint64_t> absorbed_by(spec.n_output_times, 0);
  for (double at : absorb_time) {
    if (!std::isfinite(at)) continue;
    int bin = static_cast<int>(std::ceil(at / dt_out - 1e-12)) - 1;
    bin = std::clamp(bin, 0, spec.n_output_times - 1);
    ++absorbed_by[bin];
  }
  std::uint64_t cumulative = 0;
  for (int k = 0; k < spec.n_output_times; ++k) {
    cumulative += absorbed_by[k];
    const double s = 1.0 - static_cast<double>(cumulative) / static_cast<double>(n);
    curve.points[k] = SurvivalPoint{
        dt_out * (k + 1), s,
        std::sqrt(std::max(s * (1.0 - s), 1.0 / static_cast<double>(n)) /
                  static_cast<double>(n)),
        static_cast<double>(absorbed_by[k]) / (static_cast<double>(n) * dt_out)};
  }
  return curve;
}

DiffusionModel brownian_model(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("brownian_model: sigma must be positive");
  DiffusionModel m;
  m.drift = [](double, double) { return 0.0; };
  m.noise = [sigma](double, double) { return sigma; };
  m.d_sigma_sq_dx = [](double, double) { return 0.0; };
  return m;
}

DiffusionModel ou_model(double rate, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("ou_model: sigma must be positive");
  DiffusionModel m;
  m.drift = [rate](double x, double) { return -rate * x; };
  m.noise = [sigma](double, double) { return sigma; };
  m.d_sigma_sq_dx = [](double, double) { return 0.0; };
  return m;
}

DiffusionModel polynomial_drift_model(std::vector<double> drift_coeffs, double sigma) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("polynomial_drift_model: sigma must be positive");
  DiffusionModel m;
  m.drift = [c = std::move(drift_coeffs)](double x, double) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  };
  m.noise = [sigma](double, double) { return sigma; };
  m.d_sigma_sq_dx = [](double, double) { return 0.0; };
  return m;
}

DensityField gaussian_density(double mean, double variance) {
  if (!(variance > 0.0))
    throw std::invalid_argument("gaussian_density: variance must be positive");
  DensityField d;
  d.p = [mean, variance](double x, double) {
    return std::exp(-0.5 * (x - mean) * (x - mean) / variance) /
           std::sqrt(2.0 * M_PI * variance);
  };
  d.dp_dx = [mean, variance, p = d.p](double x, double t) {
    return -(x - mean) / variance * p(x, t);
  };
  return d;
}

DensityField ou_stationary_density(double rate, double sigma) {
  if (!(rate > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("ou_stationary_density: rate and sigma must be positive");
  return gaussian_density(0.0, sigma * sigma / (2.0 * rate));
}

DensityField brownian_image_density(double x0, double sigma) {
  if (!(x0 < 0.0))
    throw std::invalid_argument("brownian_image_density: source must sit left of the boundary");
  if (!(sigma > 0.0))
    throw std::invalid_argument("brownian_image_density: sigma must be positive");
  const double diff = 0.5 * sigma * sigma;  // diffusion coefficient D
  DensityField d;
  d.absorbing_at_zero = true;
  d.p = [x0, diff](double x, double t) {
    if (x >= 0.0 || !(t > 0.0)) return 0.0;
    const double denom = 4.0 * diff * t;
    const double direct = std::exp(-(x - x0) * (x - x0) / denom);
    const double image = std::exp(-(x + x0) * (x + x0) / denom);
    return (direct - image) / std::sqrt(M_PI * denom);
  };
  d.dp_dx = [x0, diff](double x, double t) {
    if (x > 0.0 || !(t > 0.0)) return 0.0;
    const double denom = 4.0 * diff * t;
    const double direct = std::exp(-(x - x0) * (x - x0) / denom);
    const double image = std::exp(-(x + x0) * (x + x0) / denom);
    return (-2.0 * (x - x0) / denom * direct + 2.0 * (x + x0) / denom * image) /
           std::sqrt(M_PI * denom);
  };
  return d;
}

}  // namespace unicurrent::diffusion
