#pragma once

// Finite-dt uni-directional flux estimators for a 1-D diffusion with drift
// b(x,t) and noise sigma(x,t), the closed-form net flux, the Gaussian moment
// identities behind it, and an absorbing-boundary Euler-Maruyama Monte
// Carlo. The finite-dt estimators are evaluated after the change of
// variables x = x1 + xi sqrt(dt), y = x1 - (zeta - xi) sqrt(dt), which
// removes the dt-stiffness from the double Gaussian integral.

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace unicurrent::diffusion {

using Field = std::function<double(double, double)>;  // (x, t) -> value

struct DiffusionModel {
  Field drift;                       // b(x, t)
  Field noise;                       // sigma(x, t) > 0
  Field d_sigma_sq_dx;               // optional analytic (sigma^2)'
  double sigma_floor = 1e-12;

  void validate() const;
};

struct DensityField {
  Field p;        // p(x, t) >= 0
  Field dp_dx;    // optional analytic spatial derivative
  bool absorbing_at_zero = false;
};

struct FluxEstimate {
  double j_lr, j_rl, j_net;
  double delta_t;
  // The one-way fluxes blow up like 1/sqrt(dt) as dt -> 0 wherever the
  // density at the crossing point is positive; the net flux stays finite.
  bool lr_divergent = false;
  bool rl_divergent = false;
};

// Probability per unit time carried by trajectories crossing x1 leftward ray
// -> rightward ray during one step of length dt. Diverges like 1/sqrt(dt)
// where p(x1, t) > 0.
double flux_lr_finite_dt(const DiffusionModel& model, const DensityField& density,
                         double x1, double t, double delta_t, double tol = 1e-9);

// Mirror image of flux_lr_finite_dt (evaluated through the same quadrature
// on the mirrored model, so ray swapping is exact).
double flux_rl_finite_dt(const DiffusionModel& model, const DensityField& density,
                         double x1, double t, double delta_t, double tol = 1e-9);

FluxEstimate estimate_flux(const DiffusionModel& model, const DensityField& density,
                           double x1, double t, double delta_t, double tol = 1e-9);

// J_net = -d/dx [sigma^2 p / 2] + b p at (x1, t). Derivatives fall back to
// 4th-order central differences when no analytic field is supplied.
double net_flux_closed_form(const DiffusionModel& model, const DensityField& density,
                            double x1, double t);

// (J_LR - J_RL)(dt) extrapolated to dt = 0 over the given decreasing dt
// sequence (polynomial in sqrt(dt)). `change_out`, when non-null, receives
// the difference between the last two extrapolation orders.
double net_flux_extrapolated(const DiffusionModel& model, const DensityField& density,
                             double x1, double t, std::span<const double> delta_ts,
                             double tol = 1e-9, double* change_out = nullptr);

// The three exchange-of-order identities: numerically evaluates
//   int_0^inf dxi int_xi^inf dzeta  w(xi, zeta) e^{-zeta^2/(2 sigma^2)} / (sqrt(2 pi) sigma)
// for w = zeta^2 (zeta - xi), zeta, (zeta - xi); exact values are
// (3 sigma^4/4, sigma^2/2, sigma^2/4).
std::array<double, 3> gaussian_moment_identities(double sigma, double tol = 1e-12);

struct SurvivalPoint {
  double t;
  double survival;       // empirical S(t)
  double std_error;      // binomial standard error
  double absorption_rate;  // absorbed fraction per unit time over the bin ending at t
};

struct SurvivalCurve {
  std::vector<SurvivalPoint> points;
  std::uint64_t n_paths = 0;
  double dt_step = 0.0;
};

struct MonteCarloSpec {
  double t_max = 1.0;
  double dt_step = 1e-4;
  std::uint64_t n_paths = 100000;
  std::uint64_t seed = 0;
  int n_output_times = 20;
  int threads = 1;
};

// Euler-Maruyama paths killed on first contact with the boundary (approached
// from the left; boundary = +inf disables absorption). Per-path generators
// are seeded from (seed, path index), so results do not depend on the thread
// count. First-exit detection is at step resolution; the O(sqrt(dt)) crossing
// bias this leaves is studied in the tests.
SurvivalCurve simulate_absorbing(const DiffusionModel& model,
                                 const std::function<double(std::mt19937_64&)>& initial_sampler,
                                 double boundary, const MonteCarloSpec& spec);

// Built-in models and densities.
DiffusionModel brownian_model(double sigma);
DiffusionModel ou_model(double rate, double sigma);                 // b = -rate * x
DiffusionModel polynomial_drift_model(std::vector<double> drift_coeffs, double sigma);
DensityField gaussian_density(double mean, double variance);
DensityField ou_stationary_density(double rate, double sigma);
// Heat-kernel image solution absorbed at 0 for a point source at x0 < 0.
DensityField brownian_image_density(double x0, double sigma);

}  // namespace unicurrent::diffusion
