#pragma once

// Shared 1-D quadrature and extrapolation helpers: an adaptive
// Gauss-Legendre bisection integrator for smooth real or complex
// integrands, and a Neville table for limit extrapolation.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace unicurrent::quad {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
// computed once by Newton iteration on the Legendre polynomial.
template <int N>
struct GaussLegendre {
  std::array<double, N> node{};
  std::array<double, N> weight{};

  GaussLegendre() {
    for (int i = 0; i < (N + 1) / 2; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (N + 0.5));
      for (int it = 0; it < 100; ++it) {
        const auto [pn, pm] = legendre_pair(x);
        const double dp = N * (x * pn - pm) / (x * x - 1.0);
        const double dx = pn / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      const auto [pn, pm] = legendre_pair(x);
      const double dp = N * (x * pn - pm) / (x * x - 1.0);
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      node[i] = -x;
      node[N - 1 - i] = x;
      weight[i] = w;
      weight[N - 1 - i] = w;
    }
  }

 private:
  // Returns (P_N(x), P_{N-1}(x)).
  static std::pair<double, double> legendre_pair(double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= N; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    return {p1, p0};
  }
};

inline const GaussLegendre<8>& gl8() {
  static const GaussLegendre<8> rule;
  return rule;
}

template <typename T, typename F>
T gl8_panel(F&& f, double a, double b) {
  const auto& r = gl8();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  T acc{};
  for (int i = 0; i < 8; ++i) acc += r.weight[i] * f(mid + half * r.node[i]);
  return acc * half;
}

template <typename T>
double magnitude(const T& v) {
  return std::abs(v);
}

// Adaptive bisection on top of the 8-point rule. `abs_tol` is an absolute
// budget for the whole interval; each split halves the local budget. A
// rounding floor proportional to the local panel magnitude stops refinement
// once the comparison is dominated by floating-point noise.
template <typename T, typename F>
T adaptive(F&& f, double a, double b, double abs_tol, int max_depth = 24) {
  struct Frame {
    double a, b, tol;
    T whole;
    int depth;
  };
  if (!(b > a)) return T{};
  std::vector<Frame> stack;
  stack.push_back({a, b, abs_tol, gl8_panel<T>(f, a, b), 0});
  T total{};
  while (!stack.empty()) {
    Frame fr = stack.back();
    stack.pop_back();
    const double m = 0.5 * (fr.a + fr.b);
    const T left = gl8_panel<T>(f, fr.a, m);
    const T right = gl8_panel<T>(f, m, fr.b);
    const T refined = left + right;
    const double err = magnitude<T>(refined - fr.whole);
    const double floor =
        64.0 * std::numeric_limits<double>::epsilon() *
        (magnitude<T>(left) + magnitude<T>(right) + magnitude<T>(fr.whole));
    if (err <= std::max(fr.tol, floor) || fr.depth >= max_depth || m <= fr.a ||
        m >= fr.b) {
      total += refined;
    } else {
      stack.push_back({fr.a, m, 0.5 * fr.tol, left, fr.depth + 1});
      stack.push_back({m, fr.b, 0.5 * fr.tol, right, fr.depth + 1});
    }
  }
  return total;
}

// Integrate across a list of breakpoints (seed panels), refining each panel
// adaptively with a budget proportional to its width.
template <typename T, typename F>
T adaptive_over_breakpoints(F&& f, std::span<const double> pts, double abs_tol,
                            int max_depth = 24) {
  if (pts.size() < 2) return T{};
  const double width = pts.back() - pts.front();
  T total{};
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double w = pts[i + 1] - pts[i];
    if (w <= 0.0) continue;
    total += adaptive<T>(f, pts[i], pts[i + 1], abs_tol * w / width, max_depth);
  }
  return total;
}

template <typename T>
T trapezoid(std::span<const T> values, double h) {
  if (values.size() < 2) return T{};
  T acc = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) acc += values[i];
  return acc * h;
}

// Neville polynomial extrapolation of (x_i, y_i) to x = 0. Returns the
// highest-order estimate; if `change` is non-null it receives the absolute
// difference between the last two extrapolation orders (a convergence
// indicator).
template <typename T>
T neville_to_zero(std::span<const double> xs, std::span<const T> ys,
                  double* change = nullptr) {
  const std::size_t n = xs.size();
  if (n == 0 || ys.size() != n)
    throw std::invalid_argument("neville_to_zero: need matching non-empty inputs");
  std::vector<T> tab(ys.begin(), ys.end());
  // Track the best (smallest-x) entry per level; the change between the two
  // highest orders is the convergence indicator.
  T best = tab[n - 1];
  double ch = std::numeric_limits<double>::infinity();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      const double x0 = xs[i], x1 = xs[i + level];
      tab[i] = (x0 * tab[i + 1] - x1 * tab[i]) / (x0 - x1);
    }
    const T level_best = tab[n - 1 - level];
    ch = magnitude<T>(level_best - best);
    best = level_best;
  }
  if (change) *change = ch;
  return best;
}

}  // namespace unicurrent::quad
