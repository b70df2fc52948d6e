#include <doctest.h>

#include <cmath>

#include "beltrami/example_family.hpp"
#include "beltrami/solver.hpp"

using namespace beltrami;

TEST_CASE("q0_of") {
  CHECK(q0_of([](cplx) { return 0.0; })(0.3) == 1.0);
  CHECK(q0_of([](cplx) { return 0.5; })(0.3) == doctest::Approx(3.0));
  for (double n : {2.0, 5.0, 32.0}) {
    CHECK(q0_of([n](cplx) { return (n - 1) / (n + 1); })(0.0) == doctest::Approx(n));
  }
  CHECK_THROWS_AS(q0_of([](cplx) { return 1.0; })(0.0), std::domain_error);
}

TEST_CASE("oracle bound is enforced") {
  const CoefficientOracle bad([](cplx, cplx) { return cplx(0.6, 0.0); }, [](cplx, cplx) { return cplx{}; },
                              [](cplx) { return 0.5; });
  CHECK_THROWS_AS(bad.evaluate(0.1, 0.0), NumericalError);
  CHECK(bad.evaluate(2.0, 0.0).mu == cplx{});
  CHECK_THROWS(constant_oracle(0.6, 0.5));
}

TEST_CASE("truncation") {
  const examples::ExampleParams params;
  const CoefficientOracle oracle = examples::example1_oracle(params);
  const RealPointFunction Q = examples::example1_truncation_q(params);
  CHECK_THROWS(truncate(oracle, Q, 0.5));
  const CoefficientOracle same = truncate(oracle, Q, INFINITY);
  const CoefficientOracle t4 = truncate(oracle, Q, 4.0);
  const CoefficientOracle t8 = truncate(oracle, Q, 8.0);
  for (int i = 1; i < 200; ++i) {
    const double r = i / 200.0;
    const cplx z = std::polar(r, 0.37 * i);
    const cplx w = std::polar(0.3 + 0.01 * i, 1.1 * i);
    CHECK(same.evaluate(z, w).mu == oracle.evaluate(z, w).mu);
    const cplx m4 = t4.evaluate(z, w).mu;
    if (r < 0.75) CHECK(m4 == cplx{});
    if (r > 0.75) CHECK(m4 == oracle.evaluate(z, w).mu);
    CHECK(std::abs(m4) <= 3.0 / 5.0 + 1e-12);
    // Support grows with the level.
    if (m4 != cplx{}) CHECK(t8.evaluate(z, w).mu != cplx{});
  }
}

TEST_CASE("linear solve: zero coefficients give the identity") {
  const GridSpec g(64, 1.25);
  const MappingSolution sol = solve_linear(freeze(constant_oracle(0.0, 0.0), g), g, 1e-10, 100);
  CHECK(sol.converged());
  CHECK(sol.residual_linf == 0.0);
  for (std::size_t idx = 0; idx < g.size(); ++idx) CHECK(std::abs(sol.f[idx] - g.node(idx)) < 1e-14);
}

TEST_CASE("linear solve: constant coefficients match the affine oracle") {
  const GridSpec g(256, 1.25);
  BeltramiSolver solver(g);
  SolverOptions opts;
  opts.tol = 1e-10;
  for (const auto& [mu, nu] : {std::pair<cplx, cplx>{0.5, 0.0}, {0.0, 0.5}, {cplx(0.2, 0.2), cplx(0.0, -0.3)}}) {
    const FrozenCoefficients c = freeze(constant_oracle(mu, nu), g);
    const MappingSolution sol = solver.solve_linear(c, opts);
    REQUIRE(sol.converged());
    CHECK(sol.residual_linf < 1e-8);
    CHECK(sol.residual_linf == residual_linf(sol.fz, sol.fzbar, sol.coefficients));
    const std::size_t o = g.origin_index();
    CHECK(std::abs(sol.f(o, o)) < 1e-15);
    // Affine oracle: on the disk f = a z + b conj(z) + const with b = mu a + nu conj(a);
    // derivatives are taken from f by finite differences, independently of the solver.
    const auto d = wirtinger_derivatives(sol.f);
    double err = 0.0;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      if (std::abs(g.node(idx)) > 0.5) continue;
      err = std::max(err, std::abs(d.fzbar[idx] - (mu * d.fz[idx] + nu * std::conj(d.fz[idx]))) / std::abs(d.fz[idx]));
    }
    CHECK(err < 1e-3);
    // Contraction certificate.
    for (std::size_t k = 4; k < sol.increment_norms.size(); ++k) {
      CHECK(sol.increment_norms[k] <= (c.q_max + 0.05) * sol.increment_norms[k - 1] + 1e-14);
    }
  }
}

TEST_CASE("linear solve reports max iterations and rejects q >= 1") {
  const GridSpec g(64, 1.25);
  const MappingSolution sol = solve_linear(freeze(constant_oracle(0.9, 0.0), g), g, 1e-14, 3);
  CHECK(sol.status == SolveStatus::MaxIterations);
  CHECK(sol.iterations == 3);
  ComplexField mu(g);
  mu(g.origin_index(), g.origin_index()) = 1.0;
  CHECK_THROWS_AS(solve_linear(FrozenCoefficients::from_fields(mu, ComplexField(g)), g, 1e-8, 10), NumericalError);
  ComplexField outside(g);
  outside(0, 0) = 0.1;
  CHECK_THROWS(FrozenCoefficients::from_fields(outside, ComplexField(g)));
}

TEST_CASE("quasilinear solve of a w-independent oracle takes one outer step") {
  const GridSpec g(64, 1.25);
  const CoefficientOracle oracle = constant_oracle(cplx(0.3, 0.1), 0.2);
  const MappingSolution a = solve_quasilinear(oracle, g, 1e-10, 10);
  const MappingSolution b = solve_linear(freeze(oracle, g), g, 1e-10, 5000);
  CHECK(a.outer_iterations == 1);
  CHECK(a.f == b.f);
}

TEST_CASE("Example 1 truncated at k = 4 and Example 2 agree with the closed form") {
  const GridSpec g(256, 1.25);
  examples::ExampleParams params;
  params.k = 4.0;
  const RealPointFunction Q = examples::example1_truncation_q(params);
  BeltramiSolver solver(g);
  SolverOptions opts;
  const MappingSolution s1 = solver.solve_quasilinear(truncate(examples::example1_oracle(params), Q, 4.0), opts);
  const MappingSolution s2 = solver.solve_quasilinear(truncate(examples::example2_oracle(params), Q, 4.0), opts);
  REQUIRE(s1.converged());
  REQUIRE(s2.converged());
  CHECK(s1.outer_iterations > 1);
  const auto r1 = real_positive_rescaled(s1);
  const auto r2 = real_positive_rescaled(s2);
  REQUIRE(r1.has_value());
  REQUIRE(r2.has_value());
  double err = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const cplx z = g.node(idx);
    if (std::abs(z) > 0.9) continue;
    err = std::max(err, std::abs((*r1)[idx] - examples::ex1_fk(z, params)));
  }
  CHECK(err < 1e-2);
  CHECK(sup_difference(*r1, *r2, 0.9) < 2e-2);
}

TEST_CASE("ladder with inactive truncation is stationary") {
  const GridSpec g(64, 1.25);
  const CoefficientOracle oracle = constant_oracle(0.5, 0.0);
  const RealPointFunction Q = [](cplx) { return 3.0; };
  const LadderRun run = run_ladder(oracle, Q, {4.0, 8.0, 16.0}, g);
  REQUIRE(run.sup_diffs.size() == 2);
  for (double d : run.sup_diffs) CHECK(d < 1e-7);
  CHECK(run.converged);
  CHECK_THROWS(run_ladder(oracle, Q, {4.0, 2.0}, g));
  CHECK_THROWS(run_ladder(oracle, Q, {0.5}, g));
}

TEST_CASE("ladder aborts when a level fails") {
  const GridSpec g(64, 1.25);
  LadderOptions opts;
  opts.solver.max_iter = 2;
  opts.solver.tol = 1e-14;
  const LadderRun run = run_ladder(constant_oracle(0.5, 0.0), [](cplx) { return 3.0; }, {4.0, 8.0}, g, opts);
  CHECK(run.aborted);
  CHECK(run.solutions.empty());
  CHECK_FALSE(run.converged);
}
