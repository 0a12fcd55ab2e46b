#include "unicurrent/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "unicurrent/quadrature.hpp"

namespace unicurrent::scaling {

SweepResult fit_exponent(std::span<const SweepPoint> points, const WindowPolicy& policy) {
  std::vector<SweepPoint> used;
  for (const SweepPoint& p : points) {
    if (policy.min_control && p.control < *policy.min_control) continue;
    if (policy.max_control && p.control > *policy.max_control) continue;
    used.push_back(p);
  }
  if (used.size() < 5)
    throw std::invalid_argument("fit_exponent: need at least five points inside the window");
  std::sort(used.begin(), used.end(),
            [](const SweepPoint& a, const SweepPoint& b) { return a.control < b.control; });
  for (const SweepPoint& p : used)
    if (!(p.control > 0.0) || !(p.value > 0.0))
      throw std::invalid_argument("fit_exponent: control and value must be positive");
  if (used.back().control < 100.0 * (1.0 - 1e-9) * used.front().control)
    throw std::invalid_argument("fit_exponent: points must span at least two decades");

  const std::size_t n = used.size();
  double sx = 0.0, sy = 0.0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(used[i].control);
    ly[i] = std::log(used[i].value);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (intercept + slope * lx[i]);
    ss_res += r * r;
  }
  const double stderr_slope =
      (n > 2) ? std::sqrt(ss_res / static_cast<double>(n - 2) / sxx) : 0.0;

  SweepResult result;
  result.points = std::move(used);
  result.fitted_exponent = slope;
  result.exponent_stderr = stderr_slope;
  result.fitted_prefactor = std::exp(intercept);
  result.window_low = result.points.front().control;
  result.window_high = result.points.back().control;
  return result;
}

SurvivalStatistics zeno_survival(DecayLaw law, double prefactor, double total_time,
                                 std::uint64_t n_systems) {
  if (!(prefactor > 0.0) || !(total_time > 0.0) || n_systems == 0)
    throw std::invalid_argument("zeno_survival: prefactor, T and N must be positive");
  const double p = (law == DecayLaw::Zeno3_2) ? 1.5 : 0.5;
  const double dt = total_time / static_cast<double>(n_systems);
  const double step_leak = prefactor * std::pow(dt, p);
  const double s = 1.0 - step_leak;
  if (!(s > 0.0))
    throw std::invalid_argument("zeno_survival: per-step survival is not positive");
  SurvivalStatistics out;
  out.n_systems = n_systems;
  out.total_time = total_time;
  out.delta_t = dt;
  out.per_step_survival = s;
  out.product_survival = std::pow(s, static_cast<double>(n_systems));
  out.exponential_approx = std::exp(-static_cast<double>(n_systems) * step_leak);
  out.expected_decays = static_cast<double>(n_systems) * step_leak;
  return out;
}

double decay_law(const std::function<double(double)>& q0_squared, double gamma,
                 double t, double tol) {
  if (!(gamma > 0.0)) throw std::invalid_argument("decay_law: gamma must be positive");
  if (t < 0.0) throw std::invalid_argument("decay_law: time must be non-negative");
  if (t == 0.0) return 1.0;
  const double integral = quad::adaptive<double>(q0_squared, 0.0, t, tol);
  return std::exp(-gamma * integral);
}

}  // namespace unicurrent::scaling
