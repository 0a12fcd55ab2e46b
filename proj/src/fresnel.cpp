#include "unicurrent/fresnel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "unicurrent/errors.hpp"
#include "unicurrent/quadrature.hpp"

namespace unicurrent::fresnel {

namespace {

const cd kI{0.0, 1.0};

cd phase(double x) {  // exp(i x^2 / 2)
  const double arg = 0.5 * x * x;
  return {std::cos(arg), std::sin(arg)};
}

// Power series sum_{n>=0} (i/2)^n x^{2n+1} / (n! (2n+1)), accumulated in
// extended precision. Loses about x^2/2 * log10(e) digits to cancellation,
// which the long double mantissa absorbs up to the series/asymptotic switch.
cd fresnel_series(double x) {
  using cld = std::complex<long double>;
  const long double x2 = static_cast<long double>(x) * x;
  const cld rot = cld(0.0L, 0.5L) * x2;  // i x^2 / 2
  cld p{static_cast<long double>(x), 0.0L};
  cld sum = p;  // n = 0 term, divisor (2n+1) = 1
  for (int n = 1; n < 400; ++n) {
    p *= rot / static_cast<long double>(n);
    const cld term = p / static_cast<long double>(2 * n + 1);
    sum += term;
    if (std::abs(term) < 1e-24L * std::abs(sum) && n > static_cast<int>(x2)) break;
  }
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

// Asymptotic tail T(x) = int_x^infty exp(i t^2/2) dt for large x > 0,
// truncated at the smallest term.
cd fresnel_tail_asymptotic(double x) {
  const double inv_x2 = 1.0 / (x * x);
  cd term = kI / x;
  cd sum = term;
  for (int k = 0; k < 60; ++k) {
    const cd next = term * (2.0 * k + 1.0) * (-kI) * inv_x2;
    if (std::abs(next) >= std::abs(term)) break;
    sum += next;
    term = next;
    if (std::abs(term) < 1e-18) break;
  }
  return phase(x) * sum;
}

constexpr double kSeriesAsymptoticSwitch = 6.5;

double pow_int(double base, int n) {
  double acc = 1.0;
  for (int i = 0; i < n; ++i) acc *= base;
  return acc;
}

// Truncation point for the damped integrand z^j exp((-eps) z^2/2): smallest
// L with 2 L^{j-1} exp(-eps L^2/2) / eps below the budget.
double damped_cutoff(int j, double eps, double budget, double at_least) {
  double L = std::max({10.0, at_least, std::sqrt(2.0 * std::max(0, j - 1) / eps)});
  for (int it = 0; it < 400; ++it) {
    const double envelope =
        2.0 * std::pow(L, std::max(0, j - 1)) * std::exp(-0.5 * eps * L * L) / eps;
    if (envelope < budget) return L;
    L *= 1.25;
  }
  return L;
}

// Panel quadrature of f(z) exp((-eps + i) z^2/2) over [a, b], eps >= 0.
// Per-panel budgets carry a phase-noise floor: evaluating exp(i z^2/2)
// rounds the argument to eps_mach * z^2/2, so no panel can be resolved
// better than that times its width.
cd damped_oscillatory(const std::function<cd(double)>& f, double a, double b,
                      double eps, double abs_tol) {
  auto integrand = [&](double z) -> cd {
    const double arg = 0.5 * z * z;
    const double damp = (eps > 0.0) ? std::exp(-eps * arg) : 1.0;
    return f(z) * damp * cd{std::cos(arg), std::sin(arg)};
  };
  if (!(b > a)) return cd{};
  const double range = b - a;
  const double eps_mach = std::numeric_limits<double>::epsilon();
  cd total{};
  double t = a;
  while (t < b) {
    // Quarter-oscillation seed panels: width pi / (4 max(1, |z|)); the far
    // end of the panel bounds |z| (for t < 0 that is |t| itself).
    const double far = (t >= 0.0) ? (t + 1.0) : std::abs(t);
    const double w = std::min(b - t, M_PI / (4.0 * std::max(1.0, far)));
    const double hi = t + w;
    const double zmax = std::max(std::abs(t), std::abs(hi));
    const double f_scale = std::abs(integrand(0.5 * (t + hi)));
    const double noise =
        8.0 * eps_mach * (1.0 + 0.5 * zmax * zmax) * w * (f_scale + 1e-300);
    total += quad::adaptive<cd>(integrand, t, hi,
                                std::max(abs_tol * w / range, noise), 12);
    t = hi;
  }
  return total;
}

// Damped-limit evaluation over [-inf, upper]: integrate for each epsilon in
// the policy, then extrapolate the sequence to eps = 0.
cd damped_limit(const std::function<cd(double)>& f, int growth_degree,
                double upper, const RegularizationPolicy& policy, double tol) {
  policy.validate();
  const std::size_t n = policy.epsilons.size();
  std::vector<cd> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double eps = policy.epsilons[i];
    const double cutoff =
        damped_cutoff(growth_degree, eps, tol * 0.1, std::abs(upper) + 5.0);
    values[i] = damped_oscillatory(f, -cutoff, upper, eps, tol * 0.05);
  }
  if (n == 1) return values[0];
  cd extrapolated;
  double change = 0.0;
  if (policy.richardson_extrapolate) {
    extrapolated =
        quad::neville_to_zero<cd>(policy.epsilons, values, &change);
  } else {
    extrapolated = values[n - 1];
    change = std::abs(values[n - 1] - values[n - 2]);
  }
  const double scale = std::max(1.0, std::abs(extrapolated));
  if (!(change <= tol * scale)) {
    throw ConvergenceFailure(
        "fresnel: damped-limit sequence did not settle within tolerance",
        extrapolated, values[n - 1]);
  }
  return extrapolated;
}

}  // namespace

void RegularizationPolicy::validate() const {
  if (epsilons.empty())
    throw std::invalid_argument("RegularizationPolicy: empty epsilon sequence");
  double prev = std::numeric_limits<double>::infinity();
  for (double e : epsilons) {
    if (!(e > 0.0) || !(e < prev))
      throw std::invalid_argument(
          "RegularizationPolicy: epsilons must be positive and strictly decreasing");
    prev = e;
  }
}

cd fresnel_integral(double x) {
  const double ax = std::abs(x);
  cd value;
  if (ax <= kSeriesAsymptoticSwitch) {
    value = fresnel_series(ax);
  } else {
    value = fresnel_integral_limit() - fresnel_tail_asymptotic(ax);
  }
  return (x < 0.0) ? -value : value;
}

cd fresnel_integral_limit() {
  const double half_sqrt_pi = 0.5 * std::sqrt(M_PI);
  return {half_sqrt_pi, half_sqrt_pi};
}

cd oscillatory_integral(const std::function<cd(double)>& f, double a, double b,
                        double abs_tol) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("oscillatory_integral: finite limits required");
  return damped_oscillatory(f, a, b, 0.0, abs_tol);
}

cd fresnel_moment(int j, double lower, double upper,
                  const RegularizationPolicy& policy, double tol) {
  if (j < 0) throw std::invalid_argument("fresnel_moment: power must be >= 0");
  if (!std::isfinite(upper))
    throw std::invalid_argument("fresnel_moment: upper limit must be finite");
  if (lower > upper)
    throw std::invalid_argument("fresnel_moment: lower limit exceeds upper");
  if (lower == upper) return cd{};
  auto f = [j](double z) -> cd { return cd{pow_int(z, j), 0.0}; };
  if (std::isfinite(lower)) return damped_oscillatory(f, lower, upper, 0.0, tol);
  return damped_limit(f, j, upper, policy, tol);
}

cd fresnel_moment_closed(int j, double lower, double upper) {
  if (j < 0) throw std::invalid_argument("fresnel_moment_closed: power must be >= 0");
  if (lower > upper)
    throw std::invalid_argument("fresnel_moment_closed: lower limit exceeds upper");
  const bool infinite = !std::isfinite(lower);
  if (!infinite && lower == upper) return cd{};
  // G_0 and G_1 directly, then G_j = -i [z^{j-1} e^{i z^2/2}]_lower^upper
  //                                   + i (j-1) G_{j-2}.
  const cd e_up = phase(upper);
  const cd e_lo = infinite ? cd{} : phase(lower);
  const cd f_up = fresnel_integral(upper);
  const cd f_lo = infinite ? -fresnel_integral_limit() : fresnel_integral(lower);
  cd g_prev2 = f_up - f_lo;                // G_0
  if (j == 0) return g_prev2;
  cd g_prev1 = -kI * (e_up - e_lo);        // G_1
  if (j == 1) return g_prev1;
  for (int k = 2; k <= j; ++k) {
    const cd boundary = -kI * (pow_int(upper, k - 1) * e_up -
                               (infinite ? cd{} : pow_int(lower, k - 1) * e_lo));
    const cd g = boundary + kI * static_cast<double>(k - 1) * g_prev2;
    g_prev2 = g_prev1;
    g_prev1 = g;
  }
  return g_prev1;
}

cd tail_weighted_integral(TailWeight weight, double eta, double lower,
                          double tol, const RegularizationPolicy& policy) {
  if (!(eta > 0.0))
    throw std::invalid_argument("tail_weighted_integral: eta must be positive");
  const double upper = -eta;
  if (lower > upper)
    throw std::invalid_argument("tail_weighted_integral: lower limit exceeds -eta");
  std::function<cd(double)> f;
  switch (weight) {
    case TailWeight::One:
      f = [](double) -> cd { return {1.0, 0.0}; };
      break;
    case TailWeight::EtaOverZetaSq:
      f = [eta](double z) -> cd { return {eta / (z * z), 0.0}; };
      break;
    case TailWeight::EtaSqOverZetaSq:
      f = [eta](double z) -> cd { return {eta * eta / (z * z), 0.0}; };
      break;
  }
  if (std::isfinite(lower)) return damped_oscillatory(f, lower, upper, 0.0, tol);
  return damped_limit(f, 0, upper, policy, tol);
}

cd tail_weighted_integral_closed(TailWeight weight, double eta, double lower) {
  if (!(eta > 0.0))
    throw std::invalid_argument("tail_weighted_integral_closed: eta must be positive");
  const bool infinite = !std::isfinite(lower);
  const double upper = -eta;
  if (!infinite && lower > upper)
    throw std::invalid_argument("tail_weighted_integral_closed: lower limit exceeds -eta");
  if (weight == TailWeight::One) {
    const cd f_lo = infinite ? -fresnel_integral_limit() : fresnel_integral(lower);
    return fresnel_integral(upper) - f_lo;
  }
  // int 1/z^2 e^{i z^2/2} dz = [-e^{i z^2/2}/z] + i int e^{i z^2/2} dz
  const cd f_lo = infinite ? -fresnel_integral_limit() : fresnel_integral(lower);
  const cd boundary =
      -phase(upper) / upper + (infinite ? cd{} : phase(lower) / lower);
  const cd base = boundary + kI * (fresnel_integral(upper) - f_lo);
  const double s = (weight == TailWeight::EtaOverZetaSq) ? eta : eta * eta;
  return s * base;
}

void shifted_moments(double eta, double span, std::span<cd> out) {
  if (out.empty()) return;
  if (!(span > 0.0))
    throw std::invalid_argument("shifted_moments: span must be positive");
  const bool infinite = !std::isfinite(span);
  const double a_edge = eta;               // inner edge, zeta = -eta
  const double b_edge = eta + span;        // outer edge
  const cd e_a = phase(a_edge);
  const cd e_b = infinite ? cd{} : phase(b_edge);
  const cd f_a = fresnel_integral(a_edge);
  const cd f_b = infinite ? fresnel_integral_limit() : fresnel_integral(b_edge);

  out[0] = f_b - f_a;
  if (out.size() == 1) return;
  out[1] = -kI * (e_a - e_b) + eta * out[0];
  cd span_pow = infinite ? cd{} : cd{-span, 0.0};  // (-span)^{j-1} at j = 2
  for (std::size_t j = 2; j < out.size(); ++j) {
    const cd boundary = infinite ? cd{} : kI * span_pow * e_b;
    out[j] = boundary + kI * static_cast<double>(j - 1) * out[j - 2] +
             eta * out[j - 1];
    if (!infinite) span_pow *= -span;
  }
}

cd propagator_kernel_integral(const PiecewiseWavefunction& wf, double y,
                              double alpha, double tol, KernelMethod method,
                              const RegularizationPolicy& policy) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("propagator_kernel_integral: alpha must be positive");
  if (wf.degree() > PiecewiseWavefunction::kMaxDegree)
    throw std::invalid_argument("propagator_kernel_integral: polynomial degree exceeds cap");
  if (wf.is_zero()) return cd{};

  const double sqrt_alpha = std::sqrt(alpha);
  const double eta = y / sqrt_alpha;
  const double span = (wf.kind() == SupportKind::SemiInfinite)
                          ? std::numeric_limits<double>::infinity()
                          : wf.support_left() / sqrt_alpha;
  const auto& q = wf.coefficients();
  const int deg = wf.degree();

  // sqrt(1/(2 pi i alpha)) with sqrt(1/i) = exp(-i pi/4).
  const cd prefactor =
      std::polar(1.0 / std::sqrt(2.0 * M_PI * alpha), -M_PI / 4.0);

  cd inner{};
  if (method == KernelMethod::ClosedForm) {
    std::vector<cd> m(static_cast<std::size_t>(deg) + 1);
    shifted_moments(eta, span, m);
    double alpha_half_pow = 1.0;  // alpha^{j/2}
    for (int j = 0; j <= deg; ++j) {
      inner += q[static_cast<std::size_t>(j)] * alpha_half_pow * m[static_cast<std::size_t>(j)];
      alpha_half_pow *= sqrt_alpha;
    }
  } else {
    const double lower = std::isfinite(span)
                             ? -(span + eta)
                             : -std::numeric_limits<double>::infinity();
    const double upper = -eta;
    // Binomial weights w_k = sum_j |q_j| alpha^{j/2} C(j,k) |eta|^{j-k} set
    // the per-moment error budget.
    std::vector<double> weights(static_cast<std::size_t>(deg) + 1, 0.0);
    std::vector<std::vector<double>> binom(static_cast<std::size_t>(deg) + 1);
    for (int j = 0; j <= deg; ++j) {
      binom[j].assign(static_cast<std::size_t>(j) + 1, 1.0);
      for (int k = 1; k < j; ++k)
        binom[j][k] = binom[j - 1][k - 1] + binom[j - 1][k];
      double alpha_half_pow = std::pow(sqrt_alpha, j);
      for (int k = 0; k <= j; ++k) {
        weights[k] += std::abs(q[static_cast<std::size_t>(j)]) * alpha_half_pow *
                      binom[j][k] * std::pow(std::abs(eta), j - k);
      }
    }
    std::vector<cd> moments(static_cast<std::size_t>(deg) + 1);
    for (int k = 0; k <= deg; ++k) {
      const double budget =
          tol / (static_cast<double>(deg + 1) * std::max(weights[k], 1e-30));
      moments[k] = fresnel_moment(k, lower, upper, policy, budget);
    }
    double alpha_half_pow = 1.0;
    for (int j = 0; j <= deg; ++j) {
      cd sum{};
      for (int k = 0; k <= j; ++k)
        sum += binom[j][k] * std::pow(eta, j - k) * moments[static_cast<std::size_t>(k)];
      inner += q[static_cast<std::size_t>(j)] * alpha_half_pow * sum;
      alpha_half_pow *= sqrt_alpha;
    }
  }
  return prefactor * sqrt_alpha * inner;
}

}  // namespace unicurrent::fresnel
