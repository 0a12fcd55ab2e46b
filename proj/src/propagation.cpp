#include "unicurrent/propagation.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "unicurrent/errors.hpp"
#include "unicurrent/fresnel.hpp"
#include "unicurrent/quadrature.hpp"

namespace unicurrent {

namespace {

struct KernelContext {
  const PiecewiseWavefunction& wf;
  double sqrt_alpha;
  double span;  // support length over sqrt(alpha); +inf for semi-infinite

  KernelContext(const PiecewiseWavefunction& w, double alpha)
      : wf(w),
        sqrt_alpha(std::sqrt(alpha)),
        span(w.kind() == SupportKind::SemiInfinite
                 ? std::numeric_limits<double>::infinity()
                 : w.support_left() / std::sqrt(alpha)) {}

  // I(eta) = sum_j q_j alpha^{j/2} m_j(eta); psi(y) = e^{-i pi/4} I / sqrt(2 pi).
  cd inner(double eta) const {
    std::array<cd, PiecewiseWavefunction::kMaxDegree + 1> m;
    const int deg = wf.degree();
    fresnel::shifted_moments(eta, span, std::span<cd>(m.data(), deg + 1));
    const auto& q = wf.coefficients();
    cd acc{};
    double pow_sqrt_alpha = 1.0;
    for (int j = 0; j <= deg; ++j) {
      acc += q[static_cast<std::size_t>(j)] * pow_sqrt_alpha * m[static_cast<std::size_t>(j)];
      pow_sqrt_alpha *= sqrt_alpha;
    }
    return acc;
  }

  double abs_inner_sq(double eta) const { return std::norm(inner(eta)); }
};

// Envelope of int_{eta_max}^inf |I|^2 d eta from the endpoint asymptotics of
// the kernel integral: a jump radiates |q0|/eta, a kink |q1| sqrt(alpha)/eta^2,
// the reflecting edge (distance `span` away) its own kink term.
double tail_envelope(const PiecewiseWavefunction& wf, double alpha, double span,
                     double eta_max) {
  const double q0 = std::abs(wf.coefficient(0));
  const double q1 = std::abs(wf.coefficient(1));
  const double q2 = std::abs(wf.coefficient(2));
  double t = q0 * q0 / eta_max;
  t += q0 * q1 * std::sqrt(alpha) / (eta_max * eta_max);
  t += alpha * q1 * q1 / (3.0 * std::pow(eta_max, 3.0));
  t += alpha * alpha * 4.0 * q2 * q2 / (5.0 * std::pow(eta_max, 5.0));
  if (std::isfinite(span)) {
    const double edge_slope = std::abs(wf.derivative_at(-wf.support_left()));
    t += alpha * edge_slope * edge_slope / (3.0 * std::pow(eta_max + span, 3.0));
  }
  return t;
}

double leaked_mass_impl(const PiecewiseWavefunction& wf, double c, double alpha,
                        double tol) {
  if (wf.is_zero()) return 0.0;
  const KernelContext ctx(wf, alpha);
  const double eta0 = c / ctx.sqrt_alpha;
  const bool finite = std::isfinite(ctx.span);
  const bool jump = classify_boundary(wf) == BoundaryClass::Discontinuous;

  double eta_max;
  if (jump) {
    eta_max = finite ? std::max({3.0 * ctx.span, 3.0 * eta0, 60.0})
                     : std::max(2000.0, 3.0 * eta0);
  } else {
    eta_max = std::max(eta0 + 60.0, 3.0 * eta0);
  }

  // Seed panels must resolve the interference fringe between the two support
  // edges (period 2 pi / span in eta) when the support is finite.
  double w = 0.5;
  if (finite) w = std::min(w, 2.0 * M_PI / (3.0 * ctx.span));
  const double range = eta_max - eta0;
  const std::size_t max_panels = 2'000'000;
  if (range / w > static_cast<double>(max_panels)) w = range / static_cast<double>(max_panels);
  const std::size_t n_panels = static_cast<std::size_t>(std::ceil(range / w));
  std::vector<double> pts(n_panels + 1);
  for (std::size_t i = 0; i <= n_panels; ++i)
    pts[i] = eta0 + range * static_cast<double>(i) / static_cast<double>(n_panels);
  pts.back() = eta_max;

  auto g = [&](double eta) { return ctx.abs_inner_sq(eta); };

  // Coarse magnitude estimate on a decimated seed set fixes the absolute
  // refinement budget for the full pass.
  double coarse = 0.0;
  {
    const std::size_t stride = std::max<std::size_t>(1, n_panels / 16384);
    for (std::size_t i = 0; i + stride <= n_panels; i += stride)
      coarse += quad::gl8_panel<double>(g, pts[i], pts[i + stride]);
    coarse = std::abs(coarse) + tail_envelope(wf, alpha, ctx.span, eta_max);
  }
  const double budget = std::max(tol * coarse, 1e-300);

  double integral = quad::adaptive_over_breakpoints<double>(g, pts, budget, 12);
  integral += tail_envelope(wf, alpha, ctx.span, eta_max);
  return ctx.sqrt_alpha / (2.0 * M_PI) * integral;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

PropagationResult propagate(const PiecewiseWavefunction& wf, double delta_t,
                            const NaturalUnits& units, const GridSpec& spec,
                            double tol) {
  units.validate();
  if (!(delta_t > 0.0)) throw std::invalid_argument("propagate: delta_t must be positive");
  const double alpha = units.alpha(delta_t);
  const double sqrt_alpha = std::sqrt(alpha);
  const bool finite = wf.kind() == SupportKind::FiniteReflecting;
  const double a = finite ? wf.support_left() : 0.0;

  const double y_min = spec.y_min.value_or(finite ? -2.0 * a : -60.0 * sqrt_alpha);
  const double y_max = spec.y_max.value_or(60.0 * sqrt_alpha);
  if (!(y_max > y_min)) throw std::invalid_argument("propagate: empty grid range");

  // The transition layer has width O(sqrt(alpha)); finite supports add an
  // interference fringe of period 2 pi alpha / a in |psi|^2.
  double h = sqrt_alpha / 20.0;
  if (finite) h = std::min(h, 0.5 * M_PI * alpha / a);
  if (spec.max_spacing) {
    if (*spec.max_spacing > sqrt_alpha / 20.0)
      throw std::invalid_argument(
          "propagate: grid spacing too coarse for the transition layer (needs <= sqrt(alpha)/20)");
    h = *spec.max_spacing;
  }

  const double n_est = (y_max - y_min) / h + 2.0;
  if (n_est > 5e6)
    throw std::invalid_argument("propagate: grid would exceed 5e6 points; widen spacing or narrow range");

  // Align the grid so y = 0 is a node when the range straddles it.
  std::size_t n;
  double y0 = y_min;
  if (y_min < 0.0 && y_max > 0.0) {
    const std::size_t k = static_cast<std::size_t>(std::ceil(-y_min / h));
    y0 = -h * static_cast<double>(k);
    n = k + static_cast<std::size_t>(std::ceil(y_max / h)) + 1;
  } else {
    n = static_cast<std::size_t>(std::ceil((y_max - y_min) / h)) + 1;
  }

  std::vector<cd> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = y0 + h * static_cast<double>(i);
    samples[i] = fresnel::propagator_kernel_integral(wf, y, alpha, tol);
  }
  const double y_end = y0 + h * static_cast<double>(n - 1);
  GridWavefunction grid(y0, y_end, std::move(samples));

  double p_out = 0.0;
  {
    std::vector<double> density;
    for (std::size_t i = 0; i < n; ++i) {
      const double y = y0 + h * static_cast<double>(i);
      if (y >= 0.0) density.push_back(std::norm(grid[i]));
    }
    p_out = quad::trapezoid<double>(density, h);
  }
  const double span = finite ? a / sqrt_alpha : std::numeric_limits<double>::infinity();
  // A grid that stops at or before y = 0 sees none of the leaked mass; the
  // only honest bound left is the total probability.
  const double tail =
      (y_end > 0.0)
          ? sqrt_alpha / (2.0 * M_PI) * tail_envelope(wf, alpha, span, y_end / sqrt_alpha)
          : wf.norm_squared();

  const bool validity =
      delta_t <= polynomial_validity_bound(wf, units) / 100.0;
  return PropagationResult{std::move(grid), p_out, tail, alpha, validity};
}

double mass_beyond(const PiecewiseWavefunction& wf, double c, double delta_t,
                   const NaturalUnits& units, double tol) {
  units.validate();
  if (!(delta_t > 0.0)) throw std::invalid_argument("mass_beyond: delta_t must be positive");
  if (c < 0.0) throw std::invalid_argument("mass_beyond: distance must be non-negative");
  return leaked_mass_impl(wf, c, units.alpha(delta_t), tol);
}

CurrentEstimate unidirectional_current_lr(const PiecewiseWavefunction& wf,
                                          double delta_t, const NaturalUnits& units,
                                          double tol) {
  const double mass = mass_beyond(wf, 0.0, delta_t, units, tol);
  return CurrentEstimate{mass / delta_t, delta_t, CurrentKind::UnidirectionalLR};
}

CurrentEstimate schrodinger_current(const GridWavefunction& psi, double x,
                                    const NaturalUnits& units) {
  units.validate();
  const double h = psi.spacing();
  const double pos = (x - psi.x_min()) / h;
  const long i = std::lround(pos);
  if (i < 2 || i + 2 >= static_cast<long>(psi.size()))
    throw std::invalid_argument("schrodinger_current: x too close to the grid edge");
  const auto& s = psi.samples();
  const std::size_t k = static_cast<std::size_t>(i);
  const cd dpsi =
      (-s[k + 2] + 8.0 * s[k + 1] - 8.0 * s[k - 1] + s[k - 2]) / (12.0 * h);
  const double j = units.hbar / units.mass * std::imag(std::conj(s[k]) * dpsi);
  return CurrentEstimate{j, 0.0, CurrentKind::SchrodingerNet};
}

GridWavefunction free_propagate(const GridWavefunction& psi, double delta_t,
                                const NaturalUnits& units) {
  units.validate();
  if (!(delta_t > 0.0)) throw std::invalid_argument("free_propagate: delta_t must be positive");
  const double alpha = units.alpha(delta_t);
  const double h = psi.spacing();
  const std::size_t n = psi.size();
  const std::size_t m = next_pow2(std::max<std::size_t>(2 * n, 256));
  const std::size_t off = (m - n) / 2;

  std::vector<cd> buf(m, cd{});
  std::copy(psi.samples().begin(), psi.samples().end(), buf.begin() + off);

  fftw_plan fwd = fftw_plan_dft_1d(static_cast<int>(m),
                                   reinterpret_cast<fftw_complex*>(buf.data()),
                                   reinterpret_cast<fftw_complex*>(buf.data()),
                                   FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(fwd);
  fftw_destroy_plan(fwd);

  const double dk = 2.0 * M_PI / (static_cast<double>(m) * h);
  for (std::size_t i = 0; i < m; ++i) {
    const double k = dk * ((i <= m / 2) ? static_cast<double>(i)
                                        : static_cast<double>(i) - static_cast<double>(m));
    const double arg = -0.5 * alpha * k * k;
    buf[i] *= cd{std::cos(arg), std::sin(arg)};
  }

  fftw_plan bwd = fftw_plan_dft_1d(static_cast<int>(m),
                                   reinterpret_cast<fftw_complex*>(buf.data()),
                                   reinterpret_cast<fftw_complex*>(buf.data()),
                                   FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(bwd);
  fftw_destroy_plan(bwd);

  std::vector<cd> out(n);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf[off + i] * scale;
  return GridWavefunction(psi.x_min(), psi.x_max(), std::move(out));
}

namespace {

double right_mass(const GridWavefunction& psi, std::size_t from) {
  std::vector<double> density;
  density.reserve(psi.size() - from);
  for (std::size_t i = from; i < psi.size(); ++i) density.push_back(std::norm(psi[i]));
  return quad::trapezoid<double>(density, psi.spacing());
}

}  // namespace

CurrentEstimate feynman_limit_current(const GridWavefunction& psi, double x,
                                      std::span<const double> delta_t_sequence,
                                      const NaturalUnits& units, double rel_tol) {
  units.validate();
  if (delta_t_sequence.size() < 2)
    throw std::invalid_argument("feynman_limit_current: need at least two dt values");
  for (std::size_t i = 0; i + 1 < delta_t_sequence.size(); ++i)
    if (!(delta_t_sequence[i] > delta_t_sequence[i + 1]) || !(delta_t_sequence[i + 1] > 0.0))
      throw std::invalid_argument(
          "feynman_limit_current: dt sequence must be positive and decreasing");

  const double h = psi.spacing();
  const long i0 = std::lround((x - psi.x_min()) / h);
  if (i0 < 1 || i0 + 1 >= static_cast<long>(psi.size()))
    throw std::invalid_argument("feynman_limit_current: x outside the grid interior");
  const std::size_t from = static_cast<std::size_t>(i0);

  const double base = right_mass(psi, from);
  std::vector<double> quotients(delta_t_sequence.size());
  double max_q = 0.0;
  for (std::size_t i = 0; i < delta_t_sequence.size(); ++i) {
    const GridWavefunction evolved = free_propagate(psi, delta_t_sequence[i], units);
    quotients[i] = (right_mass(evolved, from) - base) / delta_t_sequence[i];
    max_q = std::max(max_q, std::abs(quotients[i]));
  }

  double change = 0.0;
  const double value =
      quad::neville_to_zero<double>(delta_t_sequence, quotients, &change);
  const double scale = std::max({std::abs(value), 0.05 * max_q, 1e-300});
  if (!(change <= rel_tol * scale))
    throw ConvergenceFailure("feynman_limit_current: dt extrapolation did not settle",
                             cd{value, 0.0}, cd{quotients.back(), 0.0});
  return CurrentEstimate{value, delta_t_sequence.back(), CurrentKind::SchrodingerNet};
}

double validity_bound(const BoxEigenstate& state, const NaturalUnits& units) {
  units.validate();
  return units.hbar / state.energy(units);
}

double superposition_validity_bound(std::span<const BoxEigenstate> states,
                                    std::span<const cd> weights, double t,
                                    const NaturalUnits& units, int j_max) {
  units.validate();
  if (states.empty() || states.size() != weights.size())
    throw std::invalid_argument("superposition_validity_bound: bad state/weight lists");
  auto odd_derivative_sum = [&](int j) -> cd {
    cd acc{};
    for (std::size_t i = 0; i < states.size(); ++i) {
      const auto& st = states[i];
      const double e = st.energy(units);
      const double slope = std::sqrt(2.0 / st.a()) * (st.n() * M_PI / st.a()) *
                           ((st.n() % 2 == 0) ? 1.0 : -1.0);
      const double factor = std::pow(-2.0 * units.mass * e / (units.hbar * units.hbar),
                                     static_cast<double>(j));
      acc += weights[i] * factor * slope *
             std::polar(1.0, -e * t / units.hbar);
    }
    return acc;
  };
  double bound = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= j_max; ++j) {
    const double denom = std::abs(odd_derivative_sum(j + 1));
    if (denom == 0.0) continue;
    const double ratio = (2.0 * j + 1.0) * (2.0 * j + 3.0) *
                         std::abs(odd_derivative_sum(j)) / denom;
    bound = std::min(bound, units.mass / units.hbar * ratio);
  }
  return bound;
}

double polynomial_validity_bound(const PiecewiseWavefunction& wf,
                                 const NaturalUnits& units) {
  units.validate();
  double bound = std::numeric_limits<double>::infinity();
  for (int j = 1; j + 2 <= wf.degree(); j += 2) {
    const double num = std::abs(wf.coefficient(j));
    const double den = std::abs(wf.coefficient(j + 2));
    if (num == 0.0 || den == 0.0) continue;
    bound = std::min(bound, units.mass / units.hbar * num / den);
  }
  return bound;
}

}  // namespace unicurrent
