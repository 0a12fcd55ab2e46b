#pragma once

// Log-log exponent extraction for dt/alpha/c sweeps, and the survival
// statistics of repeated short observations: per-step survival
// s = 1 - c dt^p with p = 3/2 (Zeno) or 1/2 (anti-Zeno), the exact product
// S_T(N) = s^N, its exponential approximation exp(-N c dt^p), and the
// expected number of decays <N> = N (1 - s).

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace unicurrent::scaling {

struct SweepPoint {
  double control;
  double value;
  double error = 0.0;
};

struct WindowPolicy {
  std::optional<double> min_control;
  std::optional<double> max_control;  // e.g. a validity bound on dt
};

struct SweepResult {
  std::vector<SweepPoint> points;   // the points actually fitted
  double fitted_exponent = 0.0;
  double exponent_stderr = 0.0;
  double fitted_prefactor = 0.0;
  double window_low = 0.0;
  double window_high = 0.0;
};

// Ordinary least squares on (log x, log y). Requires at least five positive
// points spanning two decades of the control variable after windowing.
SweepResult fit_exponent(std::span<const SweepPoint> points,
                         const WindowPolicy& policy = {});

enum class DecayLaw { Zeno3_2, AntiZeno1_2 };

struct SurvivalStatistics {
  std::uint64_t n_systems = 0;
  double total_time = 0.0;
  double delta_t = 0.0;            // T / N
  double per_step_survival = 0.0;  // 1 - c dt^p
  double product_survival = 0.0;   // exact s^N
  double exponential_approx = 0.0; // exp(-N c dt^p)
  double expected_decays = 0.0;    // N (1 - s)
};

SurvivalStatistics zeno_survival(DecayLaw law, double prefactor, double total_time,
                                 std::uint64_t n_systems);

// S(t) = exp(-gamma int_0^t |q0(t')|^2 dt'), gamma supplied by the caller.
double decay_law(const std::function<double(double)>& q0_squared, double gamma,
                 double t, double tol = 1e-10);

}  // namespace unicurrent::scaling
