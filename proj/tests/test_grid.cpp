#include <doctest.h>

#include <cmath>
#include <numbers>

#include "beltrami/example_family.hpp"
#include "beltrami/grid.hpp"

using namespace beltrami;

TEST_CASE("GridSpec invariants") {
  CHECK_THROWS_AS(GridSpec(3, 1.25), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(0, 1.25), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(64, 1.0), std::invalid_argument);
  const GridSpec g(64, 1.25);
  CHECK(g.spacing() == 2.0 * 1.25 / 64.0);
  CHECK(g.node(g.origin_index(), g.origin_index()) == cplx(0.0, 0.0));
  CHECK(g.size() == 64u * 64u);
}

TEST_CASE("PolarPoint round trip") {
  for (cplx z : {cplx(0.3, -0.4), cplx(-0.7, 0.1), cplx(0.0, 0.9), cplx(-0.2, -0.2)}) {
    const PolarPoint p = PolarPoint::from(z);
    CHECK(p.theta >= 0.0);
    CHECK(p.theta < 2.0 * std::numbers::pi);
    CHECK(std::abs(p.to_cartesian() - z) < 1e-15);
  }
}

TEST_CASE("sample_function") {
  const GridSpec g4(4, 2.0);
  const ComplexField zero = sample_function([](cplx) { return cplx{}; }, g4);
  for (cplx v : zero.samples()) CHECK(v == cplx{});
  const ComplexField id = sample_function([](cplx z) { return z; }, g4);
  CHECK(id(0, 0) == cplx(-2.0, -2.0));

  const GridSpec g(128, 1.25);
  const examples::ExampleParams params;
  const ComplexField f = sample_function([&](cplx z) { return examples::ex1_f(z, params); }, g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (std::abs(g.node(idx)) <= 0.5) CHECK(f[idx] == cplx{});
  }

  CHECK_THROWS_AS(sample_function([](cplx) { return cplx(NAN, 0.0); }, g), NumericalError);
  SampleReport report;
  const ComplexField outside =
      sample_function([](cplx z) { return std::abs(z) > 1.1 ? cplx(INFINITY, 0.0) : z; }, g, &report);
  CHECK(report.clamped_outside > 0);
  CHECK(all_finite(outside));
}

TEST_CASE("wirtinger derivatives") {
  const GridSpec g(64, 1.25);
  CHECK_THROWS(wirtinger_derivatives(ComplexField(GridSpec(2, 1.25))));
  const auto check = [&](auto fn, cplx fz, cplx fzbar) {
    const auto d = wirtinger_derivatives(sample_function(fn, g));
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      CHECK(std::abs(d.fz[idx] - fz) < 1e-12);
      CHECK(std::abs(d.fzbar[idx] - fzbar) < 1e-12);
    }
  };
  check([](cplx z) { return z; }, 1.0, 0.0);
  check([](cplx z) { return std::conj(z); }, 0.0, 1.0);
  check([](cplx z) { return z + 0.3 * std::conj(z); }, 1.0, 0.3);

  // Quadratics are differentiated exactly by both stencils.
  const auto d = wirtinger_derivatives(sample_function([](cplx z) { return z * z; }, g));
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    CHECK(std::abs(d.fz[idx] - 2.0 * g.node(idx)) < 1e-11);
    CHECK(std::abs(d.fzbar[idx]) < 1e-11);
  }

  // Linearity.
  const ComplexField a = sample_function([](cplx z) { return std::exp(z) * std::conj(z); }, g);
  const ComplexField b = sample_function([](cplx z) { return std::sin(z.real()) + z * z * z; }, g);
  const auto da = wirtinger_derivatives(a);
  const auto db = wirtinger_derivatives(b);
  const auto dc = wirtinger_derivatives(combine(2.0, a, cplx(0.0, -3.0), b));
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    CHECK(std::abs(dc.fz[idx] - (2.0 * da.fz[idx] + cplx(0.0, -3.0) * db.fz[idx])) < 1e-10);
  }
}

TEST_CASE("integrate_disk") {
  double prev_err = 0.0;
  for (std::size_t n : {128u, 256u, 512u}) {
    const GridSpec g(n, 1.25);
    const ComplexField one(g, 1.0);
    const double err = std::abs(integrate_disk(one, 1.0) - std::numbers::pi);
    CHECK(err < 4.0 * g.spacing());
    if (prev_err > 0.0) CHECK(err < prev_err);
    prev_err = err;
    const ComplexField r2 = sample_function([](cplx z) { return cplx(std::norm(z), 0.0); }, g);
    CHECK(std::abs(integrate_disk(r2, 1.0) - std::numbers::pi / 2) < 4.0 * g.spacing());
    CHECK(integrate_disk(ComplexField(g), 1.0) == cplx{});
  }
  CHECK_THROWS(integrate_disk(ComplexField(GridSpec(64, 1.25), 1.0), 2.0));
}

TEST_CASE("circle_mean") {
  CHECK(circle_mean([](cplx) { return 7.0; }, 0.3, 0.2) == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(circle_mean([](cplx z) { return std::norm(z); }, 0.0, 0.5) == doctest::Approx(0.25).epsilon(1e-14));
  const examples::ExampleParams params;
  const auto kmu = [&](cplx z) { return examples::ex1_dilatation(z, params, examples::Dilatation::Kmu); };
  CHECK(circle_mean(kmu, 0.0, 0.75) == doctest::Approx(4.0).epsilon(1e-13));
  // x^2 on |z| = r about 0 has mean r^2/2; trapezoid is exact for trigonometric polynomials.
  for (std::size_t n : {16u, 64u, 256u}) {
    CHECK(circle_mean([](cplx z) { return z.real() * z.real(); }, 0.0, 0.6, n) == doctest::Approx(0.18).epsilon(1e-13));
  }
  // Isolated non-finite samples are dropped, many are an error.
  CHECK(circle_mean([](cplx z) { return z.real() > 0.6 - 1e-12 ? INFINITY : 2.0; }, 0.0, 0.6) == doctest::Approx(2.0));
  CHECK_THROWS(circle_mean([](cplx z) { return z.real() > 0.0 ? NAN : 1.0; }, 0.0, 0.6));
}

TEST_CASE("interpolate and sup_difference") {
  const GridSpec g(32, 1.25);
  const ComplexField f = sample_function([](cplx z) { return cplx(z.real() * z.imag() + 2.0 * z.real(), z.imag()); }, g);
  const auto v = interpolate(f, cplx(0.1234, -0.377));
  REQUIRE(v.has_value());
  CHECK(std::abs(*v - cplx(0.1234 * -0.377 + 0.2468, -0.377)) < 1e-13);
  CHECK_FALSE(interpolate(f, cplx(2.0, 0.0)).has_value());
  ComplexField h = f;
  h(g.origin_index(), g.origin_index()) += 0.5;
  CHECK(sup_difference(f, h, 0.9) == doctest::Approx(0.5));
}
