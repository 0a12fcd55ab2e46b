#pragma once

// Short-time free propagation of compactly supported wave functions and the
// currents built from it: leaked probability mass P_out, distance-resolved
// mass P_c, the uni-directional current at the support edge, the grid
// Schrodinger current, and the finite-dt population-difference current
// extrapolated to dt -> 0.
//
// Sign convention: currents are positive for rightward flow, so a plane
// wave exp(i k x) carries hbar k / m. The population-difference quotient is
// taken over the right ray to match.

#include <optional>
#include <span>

#include "unicurrent/units.hpp"
#include "unicurrent/wavefunction.hpp"

namespace unicurrent {

struct GridSpec {
  std::optional<double> y_min;        // default -2a (finite) / transition layer (semi)
  std::optional<double> y_max;        // default covers the transition layer
  std::optional<double> max_spacing;  // must resolve sqrt(alpha)/20
};

struct PropagationResult {
  GridWavefunction grid;
  double p_out;             // trapezoid mass on y > 0 within the grid
  double p_out_tail_bound;  // analytic envelope of the mass beyond the grid
  double alpha;
  bool validity_ok;         // short-time expansion condition at this dt
};

enum class CurrentKind { SchrodingerNet, UnidirectionalLR };

struct CurrentEstimate {
  double value;
  double delta_t;
  CurrentKind kind;
};

// Samples psi(y, dt) on a uniform grid via the propagator kernel and
// integrates the leaked mass on y > 0 by the trapezoid rule. The grid must
// resolve the transition layer: spacing <= sqrt(alpha)/20 (finer by default
// for finite supports, where |psi|^2 carries a cross-interference fringe of
// period 2 pi alpha / a).
PropagationResult propagate(const PiecewiseWavefunction& wf, double delta_t,
                            const NaturalUnits& units, const GridSpec& spec = {},
                            double tol = 1e-8);

// P_c = int_c^infty |psi(y, dt)|^2 dy by adaptive quadrature in the scaled
// variable eta = y/sqrt(alpha), plus an analytic far-tail term. c = 0 gives
// the full leaked mass P_out.
double mass_beyond(const PiecewiseWavefunction& wf, double c, double delta_t,
                   const NaturalUnits& units, double tol = 1e-8);

// J_LR(0, dt) = P_out / dt: the uni-directional current from the support
// into the right ray at finite dt.
CurrentEstimate unidirectional_current_lr(const PiecewiseWavefunction& wf,
                                          double delta_t, const NaturalUnits& units,
                                          double tol = 1e-8);

// J(x) = (hbar/m) Im[conj(psi) psi'] with a 4th-order central difference
// derivative. x must sit at least two grid cells inside the grid.
CurrentEstimate schrodinger_current(const GridWavefunction& psi, double x,
                                    const NaturalUnits& units);

// Finite-dt population-difference quotient over the right ray,
//   q(dt) = [P_{>x}(t + dt) - P_{>x}(t)] / dt,
// evaluated on a decreasing dt sequence by FFT free propagation and
// polynomial-extrapolated to dt = 0. Converges to the Schrodinger current
// where psi is smooth.
CurrentEstimate feynman_limit_current(const GridWavefunction& psi, double x,
                                      std::span<const double> delta_t_sequence,
                                      const NaturalUnits& units,
                                      double rel_tol = 1e-2);

// Free propagation of a sampled wave function on a zero-padded periodic box.
GridWavefunction free_propagate(const GridWavefunction& psi, double delta_t,
                                const NaturalUnits& units);

// Max admissible dt scale for a single box eigenstate: hbar / E_n. Callers
// treat dt <= bound/100 as safely inside the expansion's validity region.
double validity_bound(const BoxEigenstate& state, const NaturalUnits& units);

// General validity scale for a finite superposition sum_i w_i psi_{n_i},
// from the coefficient-ratio condition on the odd derivative sums at the
// support edge (minimised over expansion orders j = 1..j_max).
double superposition_validity_bound(std::span<const BoxEigenstate> states,
                                    std::span<const cd> weights, double t,
                                    const NaturalUnits& units, int j_max = 8);

// Same ratio condition applied directly to a polynomial's odd coefficients:
// dt scale = (m/hbar) min_j |q_{2j+1} / q_{2j+3}|. Infinity if the
// polynomial has no consecutive odd-coefficient pair.
double polynomial_validity_bound(const PiecewiseWavefunction& wf,
                                 const NaturalUnits& units);

}  // namespace unicurrent
