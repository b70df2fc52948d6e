#include <doctest.h>

#include <cmath>
#include <random>

#include "beltrami/diagnostics.hpp"
#include "beltrami/example_family.hpp"

using namespace beltrami;
using namespace beltrami::examples;

namespace {
ExampleParams with(double alpha, double k, double p = 1.0) {
  ExampleParams params;
  params.alpha = alpha;
  params.k = k;
  params.p = p;
  return params;
}
}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(with(3.0, INFINITY).validate(), std::invalid_argument);
  CHECK_THROWS_AS(with(1.0, INFINITY, 2.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(with(1.0, 0.5).validate(), std::invalid_argument);
  CHECK_NOTHROW(with(1.5, 1.0).validate());
  for (double k : {2.0, 4.0, 8.0, 32.0}) {
    const double rho = with(1.0, k).threshold_radius();
    CHECK(rho > 0.5);
    CHECK(rho <= 1.0);
  }
  // k = 2/alpha truncates the whole coefficient away.
  CHECK(with(1.0, 2.0).threshold_radius() == 1.0);
  CHECK(with(1.0, 4.0).threshold_radius() == doctest::Approx(0.75));
}

TEST_CASE("ex1_mu") {
  const ExampleParams params;
  CHECK(ex1_mu(0.3, 5.0, params) == cplx{});
  CHECK(ex1_mu(cplx(0.0, 0.5), 0.2, params) == cplx{});
  CHECK(std::abs(ex1_mu(0.75, 2.0, params)) == doctest::Approx(0.5));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double alpha : {0.5, 1.0}) {
    const ExampleParams pa = with(alpha, INFINITY);
    for (int i = 0; i < 2000; ++i) {
      const cplx z = std::polar(0.5 + 0.5 * u(rng), 6.3 * u(rng));
      const cplx w = std::polar(u(rng), 6.3 * u(rng));
      CHECK(std::abs(ex1_mu(z, w, pa)) <= ex1_q(z, pa) + 1e-15);
    }
  }
  // For alpha > 1 the |w| < 1 branch changes sign once alpha(2r-1) > 1 and
  // its modulus then exceeds q.
  const ExampleParams steep = with(1.9, INFINITY);
  CHECK(std::abs(ex1_mu(0.99, 0.0, steep)) > ex1_q(0.99, steep));
  // e^{2 i theta} phase.
  const cplx z = std::polar(0.8, 0.7);
  CHECK(std::arg(ex1_mu(z, 2.0, params)) == doctest::Approx(1.4));
}

TEST_CASE("ex1_f, ex1_fk, ex1_gk") {
  const ExampleParams params;
  CHECK(ex1_f(0.4, params) == cplx{});
  CHECK(ex1_f(0.75, params) == cplx(0.5, 0.0));
  CHECK(std::abs(ex1_f(1.0 - 1e-12, params) - 1.0) < 1e-11);
  CHECK(std::abs(ex1_f(0.5 + 1e-12, params)) < 1e-11);
  CHECK(ex1_gk(0.5, with(1.0, 4.0)) == cplx(0.75, 0.0));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double alpha : {0.5, 1.0, 1.5}) {
    for (double k : {2.0, 4.0, 8.0, 32.0}) {
      const ExampleParams pk = with(alpha, k);
      if (!(k > 1.0 / alpha)) continue;
      double worst = 0.0;
      for (int i = 0; i < 10000; ++i) {
        const cplx y = std::polar(std::sqrt(u(rng)), 6.283185307179586 * u(rng));
        worst = std::max(worst, std::abs(ex1_fk(ex1_gk(y, pk), pk) - y));
      }
      CHECK(worst < 1e-12);
      // Continuity across the threshold circle, uniform distance to f.
      const double rho = pk.threshold_radius();
      CHECK(std::abs(ex1_fk(rho * (1 + 1e-13), pk) - ex1_fk(rho, pk)) < 1e-11);
      double sup = 0.0;
      for (int i = 0; i <= 1000; ++i) sup = std::max(sup, std::abs(ex1_fk(i / 1000.0, pk) - ex1_f(i / 1000.0, pk)));
      CHECK(sup <= pk.inner_image_radius() + 1e-15);
    }
  }
  // g_k is linear on |y| <= (2/(k alpha))^{1/alpha}.
  const ExampleParams p4 = with(1.0, 4.0);
  CHECK(std::abs(ex1_gk(0.2, p4) / 0.2 - ex1_gk(0.4, p4) / 0.4) < 1e-14);
}

TEST_CASE("closed-form dilatations") {
  const ExampleParams params;
  CHECK(ex1_dilatation(0.75, params, Dilatation::Kmu) == doctest::Approx(4.0));
  CHECK(std::isinf(ex1_dilatation(0.5, with(1.0, INFINITY), Dilatation::Kmuk)));
  CHECK(ex1_dilatation(1.0 - 1e-15, with(1.0, 4.0), Dilatation::Kmugk) == doctest::Approx(2.0));
  CHECK(ex1_dilatation(cplx(0.0, 0.9), with(1.0, 4.0), Dilatation::Kmuk) == doctest::Approx(2.25));
  for (double k : {2.0, 4.0, 16.0}) {
    const ExampleParams pk = with(1.0, k);
    const double rho = pk.threshold_radius();
    for (int i = 0; i <= 100; ++i) {
      const double r = rho + (1.0 - rho) * i / 101.0;
      CHECK(ex1_dilatation(r, pk, Dilatation::Kmu) <= k * (1 + 1e-14));
    }
    CHECK(ex1_dilatation(rho * 0.99, pk, Dilatation::Kmu) > k);
  }
  // Truncation Q for the ladder equals K_mu.
  const RealPointFunction q0 = example1_truncation_q(params);
  for (double r : {0.55, 0.7, 0.95}) CHECK(q0(r) == doctest::Approx(ex1_dilatation(r, params, Dilatation::Kmu)));
}

TEST_CASE("the grid dilatation of f_k follows the 4|z|/(2 alpha (2|z|-1)) branch") {
  const GridSpec g(512, 1.25);
  const ExampleParams p4 = with(1.0, 4.0);
  const ComplexField f = sample_function([&](cplx z) { return ex1_fk(z, p4); }, g);
  const DilatationReport rep = dilatation_report(f, 2.0);
  const std::size_t row = g.origin_index();
  const std::size_t col = g.origin_index() + static_cast<std::size_t>(std::lround(0.9 / g.spacing()));
  const double r = std::abs(g.node(row, col));
  CHECK(rep.K_mu_f(row, col) == doctest::Approx(ex1_dilatation(r, p4, Dilatation::Kmuk)).epsilon(1e-4));
  CHECK(std::abs(rep.K_mu_f(row, col) - ex1_dilatation(r, p4, Dilatation::Kmu)) > 0.1);
}

TEST_CASE("Example 2 split and closed-form residuals") {
  const ExampleParams params;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const cplx z = std::polar(u(rng), 6.3 * u(rng));
    const cplx w = std::polar(1.5 * u(rng), 6.3 * u(rng));
    const CoefficientPair c = ex2_coefficients(z, w, params);
    CHECK(std::abs(c.mu) + std::abs(c.nu) == doctest::Approx(std::abs(ex1_mu(z, w, params))).epsilon(1e-14));
    if (std::abs(z) <= 0.5) CHECK((c.mu == cplx{} && c.nu == cplx{}));
    if (std::abs(z) > 0.5 && std::abs(z) < 1.0) {
      const WirtingerValue d = ex1_fk_derivatives(z, params);
      const cplx fw = ex1_f(z, params);
      const cplx m = ex1_mu(z, fw, params);
      const CoefficientPair c2 = ex2_coefficients(z, fw, params);
      CHECK(std::abs(d.fz.imag()) < 1e-15 * std::abs(d.fz));
      CHECK(std::abs(d.fzbar - m * d.fz) < 1e-13);
      CHECK(std::abs(d.fzbar - c2.mu * d.fz - c2.nu * std::conj(d.fz)) < 1e-13);
    }
  }
}

TEST_CASE("grid residual of the closed form is second order") {
  const ExampleParams params;
  double prev = 0.0;
  for (std::size_t n : {128u, 256u, 512u}) {
    const GridSpec g(n, 1.25);
    const ComplexField f = sample_function([&](cplx z) { return ex1_f(z, params); }, g);
    const auto d = wirtinger_derivatives(f);
    double worst = 0.0;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      const cplx z = g.node(idx);
      const double r = std::abs(z);
      if (r < 0.6 || r > 0.9) continue;
      worst = std::max(worst, std::abs(d.fzbar[idx] - ex1_mu(z, f[idx], params) * d.fz[idx]));
    }
    if (prev > 0.0) CHECK(std::log2(prev / worst) > 1.8);
    prev = worst;
  }
}

TEST_CASE("polar identity check") {
  const GridSpec g(256, 1.25);
  CHECK(polar_identity_check(sample_function([](cplx z) { return z; }, g)).max_discrepancy < 1e-12);
  CHECK(polar_identity_check(sample_function([](cplx z) { return z * z; }, g)).max_discrepancy < 1e-12);
  // Chain rule through the same difference quotients: agreement to roundoff.
  const ExampleParams params;
  const PolarIdentityResult res = polar_identity_check(sample_function([&](cplx z) { return ex1_f(z, params); }, g));
  CHECK(res.nodes_checked > 0);
  CHECK(res.max_discrepancy < 1e-12);
  const PolarIdentityResult flat = polar_identity_check(ComplexField(g, 1.0));
  CHECK(flat.nodes_checked == 0);
  CHECK(flat.nodes_excluded > 0);
}
