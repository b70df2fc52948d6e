#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "beltrami/conditions.hpp"
#include "beltrami/example_family.hpp"

using namespace beltrami;

namespace {
const std::vector<double> kEps = {1e-1, 1e-2, 1e-3, 1e-4};
}

TEST_CASE("dilatation_K") {
  CHECK(dilatation_K(0.0, 0.0) == 1.0);
  CHECK(dilatation_K(0.5, 0.0) == doctest::Approx(3.0));
  CHECK(dilatation_K(0.25, 0.25) == doctest::Approx(3.0));
  CHECK(std::isinf(dilatation_K(0.5, cplx(0.0, 0.5))));
  CHECK_THROWS_AS(dilatation_K(0.7, 0.4), std::domain_error);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  for (int i = 0; i < 50; ++i) {
    CHECK(dilatation_K(std::polar(0.3, u(rng)), std::polar(0.45, u(rng))) ==
          doctest::Approx(dilatation_K(0.3, 0.45)).epsilon(1e-15));
  }
}

TEST_CASE("Gauss-Legendre rule") {
  for (std::size_t n : {1u, 2u, 5u, 8u, 12u}) {
    const GaussRule rule = GaussRule::legendre(n);
    for (std::size_t deg = 0; deg < 2 * n; ++deg) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += rule.weights[j] * std::pow(rule.nodes[j], static_cast<double>(deg));
      const double exact = deg % 2 ? 0.0 : 2.0 / static_cast<double>(deg + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("FMO test") {
  const cplx z0(0.2, -0.1);
  const FmoResult constant = fmo_test([](cplx) { return 7.0; }, z0, kEps);
  for (double e : constant.estimates) CHECK(e == 0.0);
  CHECK(constant.verdict == Verdict::Pass);

  const auto logq = [z0](cplx z) { return std::log(1.0 / std::abs(z - z0)); };
  const FmoResult log_result = fmo_test(logq, z0, {1e-1, 1e-2, 1e-3});
  CHECK(log_result.verdict == Verdict::Pass);
  // Radial log: exact oscillation 1/e independent of eps.
  for (double e : log_result.estimates) CHECK(e == doctest::Approx(1.0 / std::exp(1.0)).epsilon(1e-6));

  const FmoResult inv = fmo_test([z0](cplx z) { return 1.0 / std::abs(z - z0); }, z0, kEps);
  CHECK(inv.verdict == Verdict::Fail);
  CHECK(inv.estimates.back() > 100.0 * inv.estimates.front());

  const auto shifted = fmo_test([&](cplx z) { return logq(z) + 5.0; }, z0, {1e-1, 1e-2, 1e-3});
  for (std::size_t i = 0; i < 3; ++i) CHECK(shifted.estimates[i] == doctest::Approx(log_result.estimates[i]).epsilon(1e-12));

  CHECK(fmo_test([](cplx) { return 1.0; }, z0, {1e-1, 1e-2}).verdict == Verdict::Inconclusive);
}

TEST_CASE("divergence integral") {
  const cplx z0(0.1, 0.1);
  const double delta = 0.5;
  const DivergenceResult one = divergence_integral([](cplx) { return 1.0; }, z0, delta, kEps);
  for (std::size_t i = 0; i < kEps.size(); ++i) CHECK(one.values[i] == doctest::Approx(std::log(delta / kEps[i])).epsilon(1e-12));
  for (double s : one.slopes) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(one.verdict == Verdict::Pass);

  const DivergenceResult four = divergence_integral([](cplx) { return 4.0; }, z0, delta, kEps);
  for (std::size_t i = 0; i < kEps.size(); ++i) CHECK(four.values[i] == doctest::Approx(one.values[i] / 4.0).epsilon(1e-12));
  CHECK(four.verdict == Verdict::Pass);

  const DivergenceResult inv = divergence_integral([z0](cplx z) { return 1.0 / std::abs(z - z0); }, z0, delta, kEps);
  for (std::size_t i = 0; i < kEps.size(); ++i) CHECK(inv.values[i] == doctest::Approx(delta - kEps[i]).epsilon(1e-10));
  CHECK(inv.verdict == Verdict::Fail);

  CHECK_THROWS_AS(divergence_integral([](cplx) { return 0.0; }, z0, delta, kEps), NumericalError);
}

TEST_CASE("ring integral test") {
  const cplx z0(0.0, 0.0);
  for (double eps : {1e-1, 1e-2, 1e-4}) {
    const RingResult r = ring_integral_test([](cplx) { return 1.0; }, psi_inverse_radius(), z0, eps, 0.5, 1.0,
                                            2.0 * std::numbers::pi);
    CHECK(r.lhs / r.rhs == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.pass);
    CHECK(r.I_diverging);
  }
  // p = 2: 2 pi L <= 2 pi L^2 once L = log(eps0/eps) >= 1.
  const RingResult p2 = ring_integral_test([](cplx) { return 1.0; }, psi_inverse_radius(), z0, 0.05, 0.5, 2.0,
                                           2.0 * std::numbers::pi);
  CHECK(p2.pass);
  CHECK_THROWS(ring_integral_test([](cplx) { return 1.0; }, psi_inverse_radius(), z0, 0.5, 0.1, 1.0, 1.0));

  // Canonical psi = 1/(t q_{z0}(t)) makes lhs = 2 pi I for any Q.
  const examples::ExampleParams params;
  const auto kmu = [params](cplx z) { return examples::ex1_dilatation(z, params, examples::Dilatation::Kmu); };
  const cplx z1(0.8, 0.0);
  const RadialWeight psi = psi_inverse_radius_mean(kmu, z1);
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const RingResult r = ring_integral_test(kmu, psi, z1, eps, 0.18, 1.0, 2.0 * std::numbers::pi);
    CHECK(r.pass);
    CHECK(r.lhs / r.rhs == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("integrability of Q") {
  CHECK(q_integrability([](cplx) { return 1.0; }, 1.0).norm == doctest::Approx(std::numbers::pi).epsilon(1e-12));
  for (double alpha : {0.5, 1.0, 1.5}) {
    examples::ExampleParams params;
    params.alpha = alpha;
    const auto Q = [params](cplx y) { return examples::ex1_dilatation(y, params, examples::Dilatation::Q); };
    // 2 pi / alpha * \int_0^1 (r^{1-alpha} + r) dr
    const double exact = 2.0 * std::numbers::pi / alpha * (1.0 / (2.0 - alpha) + 0.5);
    const IntegrabilityResult res = q_integrability(Q, 1.0);
    CHECK(res.finite);
    CHECK(res.norm == doctest::Approx(exact).epsilon(1e-6));
  }
  const IntegrabilityResult bad = q_integrability([](cplx z) { return 1.0 / std::norm(z); }, 1.0);
  CHECK_FALSE(bad.finite);
  CHECK_THROWS(q_integrability([](cplx) { return 1.0; }, 0.5));
}

TEST_CASE("RadialProfile invariants") {
  const auto Q = [](cplx) { return 2.0; };
  const RadialProfile p = RadialProfile::make(Q, 0.5, {0.1, 0.2, 0.3}, 0.4, 0.3, 0.2, 1.0, 1.0);
  CHECK(p.q_means == std::vector<double>{2.0, 2.0, 2.0});
  CHECK_THROWS(RadialProfile::make(Q, 0.5, {0.1}, 0.4, 0.6, 0.2, 1.0, 1.0));
  CHECK_THROWS(RadialProfile::make(Q, 0.5, {0.1}, 0.4, 0.3, 0.35, 1.0, 1.0));
  CHECK_THROWS(RadialProfile::make(Q, 0.5, {0.2, 0.1}, 0.4, 0.3, 0.2, 1.0, 1.0));
  CHECK_THROWS(RadialProfile::make(Q, 0.5, {0.1}, 0.4, 0.3, 0.2, 1.0, 2.5));
}

TEST_CASE("check_conditions on the Example 1 dilatation") {
  const examples::ExampleParams params;
  const RealPointFunction Q = examples::example1_truncation_q(params);
  ConditionSettings settings;
  settings.singular_radii = {0.5};
  const ConditionReport report = check_conditions(Q, 0.0, settings);
  CHECK(report.fmo_verdict == Verdict::Pass);
  CHECK(report.divergence_verdict == Verdict::Pass);
  CHECK(report.ring_verdict == Verdict::Pass);
  // 2 / (alpha (2r - 1)) is not integrable across |z| = 1/2.
  CHECK(report.integrability_verdict == Verdict::Fail);
  std::stringstream ss;
  report.to_manifest().write(ss);
  const Manifest back = Manifest::parse(ss);
  CHECK(back.get("divergence.verdict") == "pass");
  CHECK(back.get_list("ring.lhs").size() == 4);
}
