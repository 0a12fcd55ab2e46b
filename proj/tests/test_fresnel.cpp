#include "unicurrent/fresnel.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "unicurrent/errors.hpp"

using namespace unicurrent;
using namespace unicurrent::fresnel;

namespace {
cd one(double) { return cd{1.0, 0.0}; }
}  // namespace

TEST_CASE("fresnel special function against frozen high-precision values") {
  // References computed once with 30-digit arithmetic from the normalized
  // Fresnel integrals; the grid covers both evaluation regimes and the
  // series/asymptotic switch point.
  const std::vector<std::pair<double, cd>> table = {
      {0.05, cd{0.049999992187500568, 2.0833331008184643e-5}},
      {0.3, cd{0.29993925569504635, 0.0044993491490795841}},
      {1.0, cd{0.97528768820034454, 0.16371404737570059}},
      {2.4, cd{1.0428390544690311, 1.251515578633561}},
      {4.0, cd{1.1331319587833027, 0.90751341995332079}},
      {5.5, cd{0.99094163119911339, 1.0342769694558439}},
      {6.3, cd{1.0169971819221862, 0.79669346234044371}},
      {6.5, cd{1.0055792912208536, 0.98296723048207855}},
      {6.7, cd{0.82385206173528196, 1.0216217829489051}},
      {8.0, cd{0.95348173298545514, 0.78095162348088562}},
      {12.0, cd{0.9079351651197251, 0.96667271665828769}},
      {40.0, cd{0.90858314241889231, 0.89741613196072934}},
      {316.0, cd{0.8893017230614021, 0.8869752839408891}},
  };
  for (const auto& [x, reference] : table) {
    CHECK(std::abs(fresnel_integral(x) - reference) < 5e-10);
    CHECK(std::abs(fresnel_integral(-x) + fresnel_integral(x)) == 0.0);  // odd
  }
  // The panel route reproduces the same values at moderate range.
  for (double x : {0.3, 1.0, 2.4, 6.5, 12.0}) {
    const cd reference = oscillatory_integral(one, 0.0, x, 1e-12);
    CHECK(std::abs(fresnel_integral(x) - reference) < 2e-10);
  }
  const double half_sqrt_pi = 0.5 * std::sqrt(M_PI);
  CHECK(fresnel_integral_limit().real() == doctest::Approx(half_sqrt_pi).epsilon(1e-15));
  CHECK(fresnel_integral_limit().imag() == doctest::Approx(half_sqrt_pi).epsilon(1e-15));
}

TEST_CASE("half-line Fresnel moment: analytic value") {
  // int_{-inf}^0 e^{i z^2/2} dz = sqrt(pi/2) e^{i pi/4} = 0.8862 (1 + i)
  const cd value = fresnel_moment(0, kNegInf, 0.0, {}, 2e-7);
  CHECK(value.real() == doctest::Approx(0.88622692545275801).epsilon(1e-7));
  CHECK(value.imag() == doctest::Approx(0.88622692545275801).epsilon(1e-7));
  // Empty interval.
  CHECK(fresnel_moment(0, 0.0, 0.0) == cd{});
}

TEST_CASE("first moment has an elementary antiderivative") {
  // int z e^{i z^2/2} dz = -i e^{i z^2/2}; over [-T, 0]: -i (1 - e^{i T^2/2})
  const double T = 10.0;
  const cd expected = -cd{0, 1} * (cd{1, 0} - std::polar(1.0, T * T / 2.0));
  CHECK(std::abs(fresnel_moment(1, -T, 0.0, {}, 1e-10) - expected) < 1e-9);
  CHECK(std::abs(fresnel_moment_closed(1, -T, 0.0) - expected) < 1e-13);

  const MomentIntegral record = evaluate_moment(1, -T, 0.0, {}, 1e-10);
  CHECK(record.power == 1);
  CHECK(record.lower == -T);
  CHECK(std::abs(record.value - expected) < 1e-9);
}

TEST_CASE("panel route and closed route agree on finite intervals") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unit(0.2, 8.0);
  for (int j = 0; j <= 6; ++j) {
    for (int trial = 0; trial < 4; ++trial) {
      const double upper = -0.1 * unit(rng);
      const double lower = upper - unit(rng) * (1 + 3 * trial);
      const cd panel = fresnel_moment(j, lower, upper, {}, 1e-11);
      const cd closed = fresnel_moment_closed(j, lower, upper);
      CHECK(std::abs(panel - closed) <
            1e-9 * std::max(1.0, std::abs(closed)));
    }
  }
}

TEST_CASE("damped limit agrees with the closed-form limit values") {
  for (int j : {0, 1, 2, 3}) {
    for (double upper : {0.0, -1.5}) {
      const cd regularized = fresnel_moment(j, kNegInf, upper, {}, 1e-6);
      const cd closed = fresnel_moment_closed(j, kNegInf, upper);
      CHECK(std::abs(regularized - closed) <
            1e-6 * std::max(1.0, std::abs(closed)));
    }
  }
}

TEST_CASE("epsilon sequence converges monotonically and first order") {
  const cd exact = fresnel_moment_closed(0, kNegInf, 0.0);
  double prev_err = std::numeric_limits<double>::infinity();
  std::vector<double> errs;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    RegularizationPolicy single;
    single.epsilons = {eps};
    const cd v = fresnel_moment(0, kNegInf, 0.0, single, 1e-9);
    const double err = std::abs(v - exact);
    CHECK(err < prev_err);
    prev_err = err;
    errs.push_back(err);
  }
  // First-order convergence in epsilon: error ratio ~ 10 per decade.
  CHECK(errs[0] / errs[1] == doctest::Approx(10.0).epsilon(0.25));
  CHECK(errs[1] / errs[2] == doctest::Approx(10.0).epsilon(0.25));
}

TEST_CASE("convergence failure carries the last two estimates") {
  RegularizationPolicy coarse;
  coarse.epsilons = {0.5, 0.45};
  try {
    (void)fresnel_moment(2, kNegInf, 0.0, coarse, 1e-12);
    FAIL("expected ConvergenceFailure");
  } catch (const ConvergenceFailure& e) {
    CHECK(std::abs(e.last_estimate() - e.previous_estimate()) > 0.0);
  }
}

TEST_CASE("Fresnel moment approaches the half-line value as the range grows") {
  const cd limit = fresnel_integral_limit();
  double prev = std::numeric_limits<double>::infinity();
  for (double L : {10.0, 30.0, 100.0}) {
    const cd v = fresnel_moment(0, -L, 0.0, {}, 1e-11);
    const double err = std::abs(v - limit);
    CHECK(err < prev * 1.05);  // essentially decreasing 1/L envelope
    prev = err;
  }
  CHECK(prev < 0.01);
}

TEST_CASE("tail-weighted integrals: bounds and consistency") {
  // |eta int e^{i z^2/2}/z^2 dz| <= 1 for every eta and lower limit.
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const double eta = std::pow(10.0, -2.0 + 4.0 * unit(rng));
    const double span = std::pow(10.0, 2.0 * unit(rng));
    const cd v = tail_weighted_integral_closed(TailWeight::EtaOverZetaSq, eta,
                                               -(eta + span));
    CHECK(std::abs(v) <= 1.0 + 1e-12);
  }
  // Large-eta decay: |.|^2 <= 1/eta^4.
  const cd big = tail_weighted_integral(TailWeight::EtaOverZetaSq, 10.0, kNegInf, 1e-5);
  CHECK(std::norm(big) <= 1e-4);

  // ONE weight consistency with the plain moment.
  const cd w1 = tail_weighted_integral(TailWeight::One, 1.0, -3.0, 1e-11);
  const cd m0 = fresnel_moment(0, -3.0, -1.0, {}, 1e-11);
  CHECK(std::abs(w1 - m0) < 1e-10);

  // Panel vs closed on the weighted integrand.
  for (double eta : {0.3, 1.0, 4.0}) {
    const cd panel = tail_weighted_integral(TailWeight::EtaOverZetaSq, eta, -30.0, 1e-11);
    const cd closed = tail_weighted_integral_closed(TailWeight::EtaOverZetaSq, eta, -30.0);
    CHECK(std::abs(panel - closed) < 1e-9);
    const cd panel2 = tail_weighted_integral(TailWeight::EtaSqOverZetaSq, eta, -30.0, 1e-11);
    const cd closed2 = tail_weighted_integral_closed(TailWeight::EtaSqOverZetaSq, eta, -30.0);
    CHECK(std::abs(panel2 - closed2) < 1e-9);
  }
}

TEST_CASE("shifted moments match direct panel quadrature") {
  for (double span : {3.0, 31.6}) {
    for (double eta : {-5.0, -0.5, 0.0, 0.7, 3.0, 20.0}) {
      std::array<cd, 7> m;
      shifted_moments(eta, span, m);
      for (int j = 0; j <= 6; ++j) {
        auto f = [eta, j](double z) { return std::pow(cd{z + eta, 0.0}, j); };
        const cd direct = oscillatory_integral(f, -(span + eta), -eta, 1e-12);
        CHECK(std::abs(m[j] - direct) <
              1e-8 * std::max(1.0, std::abs(direct)));
      }
    }
  }
  // Semi-infinite case against the damped-limit moments (binomial expansion).
  std::array<cd, 4> m;
  const double eta = 1.3;
  shifted_moments(eta, std::numeric_limits<double>::infinity(), m);
  for (int j = 0; j <= 3; ++j) {
    cd expanded{};
    double binom = 1.0;
    for (int k = 0; k <= j; ++k) {
      // C(j, k) eta^{j-k} int z^k
      expanded += binom * std::pow(eta, j - k) * fresnel_moment_closed(k, kNegInf, -eta);
      binom = binom * (j - k) / (k + 1.0);
    }
    CHECK(std::abs(m[j] - expanded) < 1e-10 * std::max(1.0, std::abs(expanded)));
  }
}

TEST_CASE("integration by parts identity for boundary-closed polynomials") {
  // For Q with Q(-a) = 0 the boundary term drops and the kernel inner
  // integral equals its after-parts form.
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<cd> raw(7);
    raw[0] = cd{};
    for (std::size_t i = 1; i < raw.size(); ++i) raw[i] = cd{unit(rng), unit(rng)};
    const double a = 0.7 + 0.6 * std::abs(unit(rng));
    const auto wf = PiecewiseWavefunction::finite_closed(raw, a);
    const double alpha = (trial % 2 == 0) ? 1e-2 : 1e-3;
    const double sa = std::sqrt(alpha);
    const double eta = 0.3 + 3.0 * std::abs(unit(rng));
    const double lo = -a / sa - eta, hi = -eta;

    auto direct_f = [&](double z) { return wf.evaluate(sa * (z + eta)); };
    const cd direct = oscillatory_integral(direct_f, lo, hi, 1e-11);

    cd after_parts{};
    for (int j = 1; j <= wf.degree(); ++j) {
      const cd qj = wf.coefficient(j);
      if (qj == cd{}) continue;
      auto g = [&, j](double z) -> cd {
        const double shifted = z + eta;
        return cd{0, 1} * (static_cast<double>(j) * std::pow(shifted, j - 1) / z -
                           std::pow(shifted, j) / (z * z));
      };
      after_parts += qj * std::pow(sa, j) * oscillatory_integral(g, lo, hi, 1e-11);
    }
    CHECK(std::abs(direct - after_parts) < 1e-8 * std::max(1.0, std::abs(direct)));

    // And both agree with the closed-form shifted-moment route.
    std::array<cd, 7> m;
    shifted_moments(eta, a / sa, std::span<cd>(m.data(), wf.degree() + 1));
    cd closed{};
    for (int j = 0; j <= wf.degree(); ++j)
      closed += wf.coefficient(j) * std::pow(sa, j) * m[static_cast<std::size_t>(j)];
    CHECK(std::abs(direct - closed) < 1e-8 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("propagator kernel: oracle, linearity, dual route, branch") {
  PiecewiseWavefunction wf({cd{0}, cd{1}, cd{1}}, 1.0, SupportKind::FiniteReflecting);

  SUBCASE("brute-force oracle at alpha = 1e-4") {
    for (double y : {0.0, 0.01, 0.3}) {
      const cd oracle = oracles::brute_force_kernel(wf, y, 1e-4);
      const cd fast = propagator_kernel_integral(wf, y, 1e-4, 1e-10);
      CHECK(std::abs(fast - oracle) < 1e-6 * std::abs(oracle));
    }
    // Nonzero amplitude appears at the former node.
    const cd at_zero = propagator_kernel_integral(wf, 0.0, 1e-4, 1e-10);
    CHECK(std::norm(at_zero) > 0.0);
  }

  SUBCASE("closed form vs panel quadrature") {
    for (double y : {0.0, 0.05, -0.3}) {
      const cd closed = propagator_kernel_integral(wf, y, 1e-3, 1e-10,
                                                   KernelMethod::ClosedForm);
      const cd panel = propagator_kernel_integral(wf, y, 1e-3, 1e-10,
                                                  KernelMethod::PanelQuadrature);
      CHECK(std::abs(closed - panel) < 1e-8 * std::max(1e-3, std::abs(closed)));
    }
  }

  SUBCASE("zero wave function propagates to zero") {
    PiecewiseWavefunction zero({cd{}}, 1.0, SupportKind::FiniteReflecting);
    CHECK(propagator_kernel_integral(zero, 0.3, 1e-3) == cd{});
  }

  SUBCASE("linearity in the initial data") {
    const cd c{0.7, -1.2};
    PiecewiseWavefunction scaled({cd{0}, c, c}, 1.0, SupportKind::FiniteReflecting);
    const cd base = propagator_kernel_integral(wf, 0.1, 1e-3, 1e-11);
    const cd scaled_psi = propagator_kernel_integral(scaled, 0.1, 1e-3, 1e-11);
    CHECK(std::abs(scaled_psi - c * base) < 1e-10 * std::abs(c * base));
  }

  SUBCASE("identity limit pins the prefactor branch") {
    // As alpha -> 0 the propagated amplitude at an interior point returns to
    // Q(y); a wrong sqrt(1/i) branch would rotate it by i.
    const cd deep = propagator_kernel_integral(wf, -0.5, 1e-6, 1e-10);
    CHECK(std::abs(deep - cd{-0.25, 0.0}) < 1e-4);
  }

  SUBCASE("unitarity at moderate alpha") {
    const double alpha = 1e-3;
    const double h = 2e-4;
    double total = 0.0;
    for (double y = -6.0; y <= 6.0; y += h)
      total += std::norm(propagator_kernel_integral(wf, y, alpha, 1e-9)) * h;
    CHECK(total == doctest::Approx(wf.norm_squared()).epsilon(2e-4));
  }
}
