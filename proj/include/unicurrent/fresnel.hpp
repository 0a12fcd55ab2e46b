#pragma once

// Oscillatory Fresnel-type integrals: moment integrals of exp(i zeta^2/2)
// over finite and semi-infinite intervals. Semi-infinite integrals follow
// the damped-limit convention
//
//     int_{-inf}^{y} f(z) e^{i z^2/2} dz
//         = lim_{eps -> 0} int_{-inf}^{y} f(z) e^{(-eps + i) z^2/2} dz,
//
// evaluated on a decreasing epsilon sequence and extrapolated to zero.
// Two independent evaluation routes are provided: adaptive panel quadrature
// (panels capped at a quarter oscillation of the phase) and exact
// antiderivatives built on the Fresnel integral F(x) = int_0^x e^{i t^2/2} dt.
// The closed route is what the propagation sweeps use; the panel route is
// the reference the tests pit it against.
//
// Branch convention: sqrt(1/i) = exp(-i pi/4) throughout.

#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "unicurrent/wavefunction.hpp"

namespace unicurrent::fresnel {

using cd = std::complex<double>;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct RegularizationPolicy {
  std::vector<double> epsilons{1e-2, 1e-3, 1e-4};
  bool richardson_extrapolate = true;

  void validate() const;
};

// A computed moment integral together with the range that produced it.
struct MomentIntegral {
  int power = 0;
  double lower = 0.0;  // may be -inf
  double upper = 0.0;
  cd value;
};

// F(x) = int_0^x exp(i t^2/2) dt on the real line (odd in x).
cd fresnel_integral(double x);

// F(+inf) = sqrt(pi/2) exp(i pi/4) = (sqrt(pi)/2)(1 + i).
cd fresnel_integral_limit();

// int_a^b f(z) exp(i z^2/2) dz by adaptive panel quadrature, panel width
// capped at pi / (4 max(1, |z|)) so no panel spans more than a quarter
// oscillation of the phase. Finite limits only.
cd oscillatory_integral(const std::function<cd(double)>& f, double a, double b,
                        double abs_tol);

// int_{lower}^{upper} z^j exp(i z^2/2) dz. `lower` may be -inf, in which
// case the damped-limit convention above applies with the policy's epsilon
// sequence; throws ConvergenceFailure if the extrapolated values do not
// settle to `tol`.
cd fresnel_moment(int j, double lower, double upper,
                  const RegularizationPolicy& policy = {}, double tol = 1e-9);

inline MomentIntegral evaluate_moment(int j, double lower, double upper,
                                      const RegularizationPolicy& policy = {},
                                      double tol = 1e-9) {
  return MomentIntegral{j, lower, upper, fresnel_moment(j, lower, upper, policy, tol)};
}

// Same moments through exact antiderivatives (integration by parts down to
// F). For lower = -inf this evaluates the damped limit in closed form.
cd fresnel_moment_closed(int j, double lower, double upper);

enum class TailWeight {
  EtaOverZetaSq,    // eta * int e^{i z^2/2} / z^2 dz
  One,              // int e^{i z^2/2} dz
  EtaSqOverZetaSq,  // eta^2 * int e^{i z^2/2} / z^2 dz
};

// Weighted tail integral over [lower, -eta], eta > 0. The EtaOverZetaSq
// variant is bounded by 1 in modulus for every eta and decays like 1/eta^3.
cd tail_weighted_integral(TailWeight weight, double eta, double lower,
                          double tol = 1e-9,
                          const RegularizationPolicy& policy = {});
cd tail_weighted_integral_closed(TailWeight weight, double eta, double lower);

// Shifted kernel moments m_j = int_{-B}^{-A} (z + eta)^j exp(i z^2/2) dz
// with A = eta and B = eta + span (span may be +inf), for j = 0..out.size()-1.
// Evaluated by the integration-by-parts recurrence; exact up to F.
void shifted_moments(double eta, double span, std::span<cd> out);

enum class KernelMethod {
  ClosedForm,       // shifted-moment recurrence (fast path)
  PanelQuadrature,  // binomial expansion into fresnel_moment calls
};

// One application of the free propagator to a polynomial wave function:
//
//   psi(y, dt) = sqrt(1/(2 pi i alpha)) int Q(x) exp(i (x-y)^2 / (2 alpha)) dx
//
// over the support, alpha = hbar dt / m. Both methods reduce the integral to
// Fresnel moments after x = sqrt(alpha) xi.
cd propagator_kernel_integral(const PiecewiseWavefunction& wf, double y,
                              double alpha, double tol = 1e-9,
                              KernelMethod method = KernelMethod::ClosedForm,
                              const RegularizationPolicy& policy = {});

}  // namespace unicurrent::fresnel
