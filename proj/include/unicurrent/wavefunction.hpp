#pragma once

// Initial-data types: compactly supported polynomial wave functions,
// particle-in-a-box eigenstates, and sampled grid wave functions. All types
// are immutable after construction and safe to share between threads.

#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include "unicurrent/units.hpp"

namespace unicurrent {

using cd = std::complex<double>;

enum class SupportKind {
  FiniteReflecting,  // support [-a, 0], reflecting wall at -a, Q(-a) = 0
  SemiInfinite,      // support (-inf, 0], the a = infinity case
};

enum class BoundaryClass {
  ContinuousDerivativeJump,  // q0 = 0, q1 != 0: kink at the support edge
  Discontinuous,             // q0 != 0: jump at the support edge
  SmoothZero,                // q0 = q1 = 0: higher-order vanishing
};

// Polynomial wave function Q(x) = sum_j q_j x^j on its support, identically
// zero outside. For FiniteReflecting supports the boundary condition
// Q(-a) = 0 is enforced at construction (relative tolerance 1e-12).
class PiecewiseWavefunction {
 public:
  static constexpr int kMaxDegree = 16;

  PiecewiseWavefunction(std::vector<cd> coefficients, double support_left,
                        SupportKind kind);

  static PiecewiseWavefunction semi_infinite(std::vector<cd> coefficients);

  // Builds a FiniteReflecting wave function from arbitrary coefficients by
  // folding the boundary residual Q(-a) into the highest odd coefficient so
  // the reflecting condition holds exactly. Needs degree >= 3.
  static PiecewiseWavefunction finite_closed(std::vector<cd> coefficients,
                                             double support_left);

  cd evaluate(double x) const;

  const std::vector<cd>& coefficients() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  double support_left() const { return support_left_; }
  SupportKind kind() const { return kind_; }

  cd coefficient(int j) const {
    return (j >= 0 && j < static_cast<int>(coeffs_.size())) ? coeffs_[j] : cd{};
  }

  // Q'(x) evaluated inside the support (no support clipping).
  cd derivative_at(double x) const;

  // Integral of |Q|^2 over the support. Infinite for any nonzero polynomial
  // on a semi-infinite support.
  double norm_squared() const;

  bool is_zero() const;

 private:
  std::vector<cd> coeffs_;
  double support_left_;  // +inf for SemiInfinite
  SupportKind kind_;
};

BoundaryClass classify_boundary(const PiecewiseWavefunction& wf);

// Eigenstate of the box [-a, 0]: psi_n(x) = sqrt(2/a) sin(n pi (x+a)/a).
class BoxEigenstate {
 public:
  BoxEigenstate(int n, double a);

  double evaluate(double x) const;  // zero outside [-a, 0]
  double energy(const NaturalUnits& units) const;

  int n() const { return n_; }
  double a() const { return a_; }

  // Taylor coefficients of psi_n about x = 0 up to the given order
  // (inclusive). Even orders vanish because psi_n(0) = 0.
  std::vector<cd> taylor_coefficients(int order) const;

 private:
  int n_;
  double a_;
};

// Local polynomial model of an eigenstate near the support edge: the Taylor
// truncation at `order`, packaged as a SemiInfinite wave function (the
// truncation cannot satisfy the reflecting condition at -a, so no finite
// support is attached). Intended for coefficient inspection and expansion
// bookkeeping, not for propagation over [-a, 0].
PiecewiseWavefunction eigenstate_coefficients(const BoxEigenstate& state,
                                              int order);

// FiniteReflecting polynomial surrogate of an eigenstate: the Taylor
// truncation with its boundary residual folded into the highest odd
// coefficient. Suitable for propagation; requires order >= 3 and odd.
PiecewiseWavefunction closed_eigenstate_polynomial(const BoxEigenstate& state,
                                                   int order);

// Complex amplitudes sampled on a uniform grid.
class GridWavefunction {
 public:
  GridWavefunction(double x_min, double x_max, std::vector<cd> samples);

  static GridWavefunction sample(const std::function<cd(double)>& f,
                                 double x_min, double x_max, std::size_t n);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double spacing() const;
  std::size_t size() const { return samples_.size(); }
  double x(std::size_t i) const { return x_min_ + spacing() * static_cast<double>(i); }
  const std::vector<cd>& samples() const { return samples_; }
  cd operator[](std::size_t i) const { return samples_[i]; }

  // Trapezoid-rule integral of |psi|^2 over the grid.
  double total_probability() const;

 private:
  double x_min_, x_max_;
  std::vector<cd> samples_;
};

}  // namespace unicurrent
