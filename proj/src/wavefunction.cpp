#include "unicurrent/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace unicurrent {

namespace {

std::vector<cd> trimmed(std::vector<cd> coeffs) {
  while (coeffs.size() > 1 && coeffs.back() == cd{}) coeffs.pop_back();
  if (coeffs.empty()) coeffs.push_back(cd{});
  return coeffs;
}

cd horner(const std::vector<cd>& coeffs, double x) {
  cd acc{};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace

PiecewiseWavefunction::PiecewiseWavefunction(std::vector<cd> coefficients,
                                             double support_left,
                                             SupportKind kind)
    : coeffs_(trimmed(std::move(coefficients))), support_left_(support_left), kind_(kind) {
  if (degree() > kMaxDegree)
    throw std::invalid_argument("PiecewiseWavefunction: degree exceeds cap of 16");
  if (kind_ == SupportKind::SemiInfinite) {
    support_left_ = std::numeric_limits<double>::infinity();
    return;
  }
  if (!(support_left_ > 0.0) || !std::isfinite(support_left_))
    throw std::invalid_argument("PiecewiseWavefunction: support length must be positive and finite");
  // Reflecting wall at -a: Q(-a) must vanish relative to the coefficient scale.
  double scale = 0.0, an = 1.0;
  for (const cd& q : coeffs_) {
    scale += std::abs(q) * an;
    an *= support_left_;
  }
  if (scale == 0.0) return;  // identically zero wave function is admissible
  const double residual = std::abs(horner(coeffs_, -support_left_));
  if (residual > 1e-12 * scale)
    throw std::invalid_argument(
        "PiecewiseWavefunction: reflecting boundary condition Q(-a) = 0 violated");
}

PiecewiseWavefunction PiecewiseWavefunction::semi_infinite(std::vector<cd> coefficients) {
  return PiecewiseWavefunction(std::move(coefficients),
                               std::numeric_limits<double>::infinity(),
                               SupportKind::SemiInfinite);
}

PiecewiseWavefunction PiecewiseWavefunction::finite_closed(std::vector<cd> coefficients,
                                                           double support_left) {
  auto coeffs = trimmed(std::move(coefficients));
  if (coeffs.size() < 4)
    throw std::invalid_argument("finite_closed: need degree >= 3 to close the boundary");
  if (!(support_left > 0.0))
    throw std::invalid_argument("finite_closed: support length must be positive");
  const cd residual = horner(coeffs, -support_left);
  int top_odd = static_cast<int>(coeffs.size()) - 1;
  if (top_odd % 2 == 0) --top_odd;
  const double an = std::pow(-support_left, top_odd);
  coeffs[top_odd] -= residual / an;
  return PiecewiseWavefunction(std::move(coeffs), support_left,
                               SupportKind::FiniteReflecting);
}

cd PiecewiseWavefunction::evaluate(double x) const {
  if (x > 0.0) return cd{};
  if (kind_ == SupportKind::FiniteReflecting && x < -support_left_) return cd{};
  return horner(coeffs_, x);
}

cd PiecewiseWavefunction::derivative_at(double x) const {
  cd acc{};
  for (int j = degree(); j >= 1; --j)
    acc = acc * x + coeffs_[static_cast<std::size_t>(j)] * static_cast<double>(j);
  return acc;
}

double PiecewiseWavefunction::norm_squared() const {
  if (is_zero()) return 0.0;
  if (kind_ == SupportKind::SemiInfinite)
    return std::numeric_limits<double>::infinity();
  // integral over [-a,0] of x^{j+k} is (-1)^{j+k} a^{j+k+1} / (j+k+1)
  double total = 0.0;
  const int n = static_cast<int>(coeffs_.size());
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const double m = static_cast<double>(j + k);
      const double sign = ((j + k) % 2 == 0) ? 1.0 : -1.0;
      total += std::real(coeffs_[j] * std::conj(coeffs_[k])) * sign *
               std::pow(support_left_, m + 1.0) / (m + 1.0);
    }
  }
  return total;
}

bool PiecewiseWavefunction::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const cd& q) { return q == cd{}; });
}

BoundaryClass classify_boundary(const PiecewiseWavefunction& wf) {
  if (wf.coefficient(0) != cd{}) return BoundaryClass::Discontinuous;
  if (wf.coefficient(1) != cd{}) return BoundaryClass::ContinuousDerivativeJump;
  return BoundaryClass::SmoothZero;
}

BoxEigenstate::BoxEigenstate(int n, double a) : n_(n), a_(a) {
  if (n < 1) throw std::invalid_argument("BoxEigenstate: n must be >= 1");
  if (!(a > 0.0)) throw std::invalid_argument("BoxEigenstate: box width must be positive");
}

double BoxEigenstate::evaluate(double x) const {
  if (x >= 0.0 || x <= -a_) return 0.0;  // exact node at both walls
  // sin(n pi (x+a)/a) = (-1)^n sin(n pi x / a), better conditioned near 0
  const double sign = (n_ % 2 == 0) ? 1.0 : -1.0;
  return std::sqrt(2.0 / a_) * sign * std::sin(n_ * M_PI * x / a_);
}

double BoxEigenstate::energy(const NaturalUnits& units) const {
  const double n = static_cast<double>(n_);
  return n * n * M_PI * M_PI * units.hbar * units.hbar /
         (2.0 * units.mass * a_ * a_);
}

std::vector<cd> BoxEigenstate::taylor_coefficients(int order) const {
  if (order < 1) throw std::invalid_argument("taylor_coefficients: order must be >= 1");
  // psi_n(x) = sqrt(2/a) (-1)^n sin(n pi x / a); odd Taylor terms only.
  std::vector<cd> coeffs(static_cast<std::size_t>(order) + 1, cd{});
  const double k = n_ * M_PI / a_;
  const double front = std::sqrt(2.0 / a_) * ((n_ % 2 == 0) ? 1.0 : -1.0);
  double term = front * k;  // coefficient of x^1
  for (int m = 0; 2 * m + 1 <= order; ++m) {
    coeffs[static_cast<std::size_t>(2 * m + 1)] = term;
    term *= -k * k / ((2.0 * m + 2.0) * (2.0 * m + 3.0));
  }
  return coeffs;
}

PiecewiseWavefunction eigenstate_coefficients(const BoxEigenstate& state, int order) {
  return PiecewiseWavefunction::semi_infinite(state.taylor_coefficients(order));
}

PiecewiseWavefunction closed_eigenstate_polynomial(const BoxEigenstate& state,
                                                   int order) {
  if (order < 3 || order % 2 == 0)
    throw std::invalid_argument("closed_eigenstate_polynomial: order must be odd and >= 3");
  return PiecewiseWavefunction::finite_closed(state.taylor_coefficients(order),
                                              state.a());
}

GridWavefunction::GridWavefunction(double x_min, double x_max, std::vector<cd> samples)
    : x_min_(x_min), x_max_(x_max), samples_(std::move(samples)) {
  if (samples_.size() < 2)
    throw std::invalid_argument("GridWavefunction: need at least two samples");
  if (!(x_max_ > x_min_))
    throw std::invalid_argument("GridWavefunction: x_max must exceed x_min");
}

GridWavefunction GridWavefunction::sample(const std::function<cd(double)>& f,
                                          double x_min, double x_max, std::size_t n) {
  std::vector<cd> values(n);
  const double h = (x_max - x_min) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    values[i] = f(x_min + h * static_cast<double>(i));
  return GridWavefunction(x_min, x_max, std::move(values));
}

double GridWavefunction::spacing() const {
  return (x_max_ - x_min_) / static_cast<double>(samples_.size() - 1);
}

double GridWavefunction::total_probability() const {
  double acc = 0.5 * (std::norm(samples_.front()) + std::norm(samples_.back()));
  for (std::size_t i = 1; i + 1 < samples_.size(); ++i) acc += std::norm(samples_[i]);
  return acc * spacing();
}

}  // namespace unicurrent
