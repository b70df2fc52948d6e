#include "beltrami/solver.hpp"

#include <algorithm>
#include <cmath>

#include "beltrami/manifest.hpp"
#include "beltrami/parallel.hpp"

namespace beltrami {

namespace {

constexpr double kBoundSlack = 1e-12;
constexpr double kWClamp = 10.0;

cplx clamp_modulus(cplx w, double limit) {
  const double r = std::abs(w);
  if (!(r > limit)) return w;
  return w * (limit / r);
}

double grid_l2(std::span<const cplx> a, std::span<const cplx> b, double h) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::norm(a[i] - b[i]);
  return std::sqrt(sum) * h;
}

}  // namespace

// ---------------------------------------------------------------- oracle

CoefficientOracle::CoefficientOracle(CoefficientFunction mu, CoefficientFunction nu, RealPointFunction q)
    : mu_(std::move(mu)), nu_(std::move(nu)), q_(std::move(q)) {
  if (!mu_ || !nu_ || !q_) throw std::invalid_argument("coefficient oracle needs mu, nu and q");
}

double CoefficientOracle::bound(cplx z) const { return in_unit_disk(z) ? q_(z) : 0.0; }

CoefficientOracle::Value CoefficientOracle::evaluate(cplx z, cplx w) const {
  if (!in_unit_disk(z)) return {};
  const cplx mu = mu_(z, w);
  const cplx nu = nu_(z, w);
  const double q = q_(z);
  if (!(q < 1.0) || !(q >= 0.0)) {
    throw NumericalError("coefficient bound q(z) = " + std::to_string(q) + " is outside [0, 1) at z = (" +
                         std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")");
  }
  const double sum = std::abs(mu) + std::abs(nu);
  if (!std::isfinite(sum) || sum > q + kBoundSlack) {
    throw NumericalError("|mu| + |nu| = " + std::to_string(sum) + " exceeds q(z) = " + std::to_string(q) +
                         " at z = (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")");
  }
  return {mu, nu};
}

CoefficientOracle constant_oracle(cplx mu, cplx nu) {
  const double q = std::abs(mu) + std::abs(nu);
  if (!(q < 1.0)) throw std::invalid_argument("constant coefficients need |mu| + |nu| < 1");
  CoefficientOracle oracle([mu](cplx, cplx) { return mu; }, [nu](cplx, cplx) { return nu; },
                           [q](cplx) { return q; });
  oracle.mark_linear();
  return oracle;
}

CoefficientOracle truncate(const CoefficientOracle& oracle, const RealPointFunction& Q, double n) {
  if (!(n >= 1.0)) throw std::invalid_argument("truncation level must be >= 1");
  if (std::isinf(n)) return oracle;
  const double cap = (n - 1.0) / (n + 1.0);
  auto keep = [Q, n](cplx z) { return Q(z) <= n; };
  CoefficientFunction mu = [keep, f = oracle.mu()](cplx z, cplx w) { return keep(z) ? f(z, w) : cplx{}; };
  CoefficientFunction nu = [keep, f = oracle.nu()](cplx z, cplx w) { return keep(z) ? f(z, w) : cplx{}; };
  RealPointFunction q = [keep, f = oracle.q(), cap](cplx z) { return keep(z) ? std::min(f(z), cap) : 0.0; };
  CoefficientOracle out(std::move(mu), std::move(nu), std::move(q));
  out.mark_linear(oracle.linear());
  return out;
}

RealPointFunction q0_of(const RealPointFunction& q) {
  return [q](cplx z) {
    const double v = q(z);
    if (!(v >= 0.0 && v < 1.0)) throw std::domain_error("q0_of: q(z) = " + std::to_string(v) + " is outside [0, 1)");
    return (1.0 + v) / (1.0 - v);
  };
}

// ---------------------------------------------------------------- frozen coefficients

FrozenCoefficients FrozenCoefficients::from_fields(ComplexField mu, ComplexField nu) {
  if (!(mu.grid() == nu.grid())) throw std::invalid_argument("mu and nu fields live on different grids");
  if (!all_finite(mu) || !all_finite(nu)) throw std::invalid_argument("coefficient fields must be finite");
  const GridSpec& grid = mu.grid();
  double q_max = 0.0;
  for (std::size_t idx = 0; idx < mu.size(); ++idx) {
    if (!in_unit_disk(grid.node(idx))) {
      if (mu[idx] != cplx{} || nu[idx] != cplx{}) {
        throw std::invalid_argument("coefficient fields must vanish outside the unit disk");
      }
      continue;
    }
    q_max = std::max(q_max, std::abs(mu[idx]) + std::abs(nu[idx]));
  }
  return {std::move(mu), std::move(nu), q_max};
}

FrozenCoefficients freeze(const CoefficientOracle& oracle, const GridSpec& grid, const ComplexField* current) {
  if (current != nullptr && !(current->grid() == grid)) throw std::invalid_argument("freeze: grid mismatch");
  ComplexField mu(grid);
  ComplexField nu(grid);
  const std::size_t n = grid.n_side();
  for_each_row(n, [&](std::size_t row) {
    for (std::size_t col = 0; col < n; ++col) {
      const cplx z = grid.node(row, col);
      if (!in_unit_disk(z)) continue;
      const cplx w = current ? clamp_modulus((*current)(row, col), kWClamp) : z;
      const auto v = oracle.evaluate(z, w);
      mu(row, col) = v.mu;
      nu(row, col) = v.nu;
    }
  });
  return FrozenCoefficients::from_fields(std::move(mu), std::move(nu));
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged:
      return "converged";
    case SolveStatus::MaxIterations:
      return "max_iterations";
    case SolveStatus::Divergent:
      return "divergent";
  }
  return "unknown";
}

double residual_linf(const ComplexField& fz, const ComplexField& fzbar, const FrozenCoefficients& coeffs) {
  const GridSpec& grid = fz.grid();
  double worst = 0.0;
  for (std::size_t idx = 0; idx < fz.size(); ++idx) {
    if (!in_unit_disk(grid.node(idx))) continue;
    const cplx r = fzbar[idx] - coeffs.mu_field[idx] * fz[idx] - coeffs.nu_field[idx] * std::conj(fz[idx]);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

double fd_residual(const ComplexField& f, const CoefficientOracle& oracle, double r_min, double r_max) {
  const auto d = wirtinger_derivatives(f);
  const GridSpec& grid = f.grid();
  double worst = 0.0;
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const cplx z = grid.node(idx);
    const double r = std::abs(z);
    if (r < r_min || r > r_max || !in_unit_disk(z)) continue;
    const auto v = oracle.evaluate(z, clamp_modulus(f[idx], kWClamp));
    const cplx res = d.fzbar[idx] - v.mu * d.fz[idx] - v.nu * std::conj(d.fz[idx]);
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

std::optional<ComplexField> real_positive_rescaled(const MappingSolution& sol) {
  const cplx f1 = sol.normalization.f_at_one;
  if (!(f1.real() > 0.0) || std::abs(f1.imag()) > 1e-6 * std::abs(f1)) return std::nullopt;
  ComplexField out = sol.f;
  const double scale = 1.0 / f1.real();
  for (cplx& v : out.samples()) v *= scale;
  return out;
}

// ---------------------------------------------------------------- solver

BeltramiSolver::BeltramiSolver(GridSpec grid) : operators_(grid), scratch_(grid.size()) {}

MappingSolution BeltramiSolver::assemble(const ComplexField& omega, FrozenCoefficients coeffs) {
  const GridSpec& g = grid();
  MappingSolution sol;
  sol.omega = omega;
  sol.fzbar = omega;
  sol.fz = ComplexField(g);
  operators_.beurling_into(omega.samples(), sol.fz.samples());
  for (cplx& v : sol.fz.samples()) v += 1.0;
  sol.f = ComplexField(g);
  operators_.cauchy_into(omega.samples(), sol.f.samples());
  for (std::size_t idx = 0; idx < sol.f.size(); ++idx) sol.f[idx] += g.node(idx);
  const std::size_t o = g.origin_index();
  const cplx shift = sol.f(o, o);
  for (cplx& v : sol.f.samples()) v -= shift;
  sol.normalization.shift = shift;
  sol.normalization.f_at_one = interpolate(sol.f, cplx(1.0, 0.0)).value_or(cplx(NAN, NAN));
  sol.residual_linf = residual_linf(sol.fz, sol.fzbar, coeffs);
  sol.coefficients = std::move(coeffs);
  return sol;
}

MappingSolution BeltramiSolver::solve_linear(const FrozenCoefficients& coeffs, const SolverOptions& options,
                                             const ComplexField* initial_omega) {
  const GridSpec& g = grid();
  if (!(coeffs.mu_field.grid() == g)) throw std::invalid_argument("coefficients live on a different grid");
  if (!(coeffs.q_max < 1.0)) {
    throw NumericalError("contraction violated: max |mu| + |nu| = " + std::to_string(coeffs.q_max) + " >= 1");
  }
  ComplexField omega = initial_omega ? *initial_omega : ComplexField(g);
  if (!(omega.grid() == g)) throw std::invalid_argument("initial density lives on a different grid");
  ComplexField next(g);
  std::vector<double> increments;
  SolveStatus status = SolveStatus::MaxIterations;
  std::size_t it = 0;
  const auto& mu = coeffs.mu_field;
  const auto& nu = coeffs.nu_field;
  while (it < options.max_iter) {
    operators_.beurling_into(omega.samples(), scratch_);
    for (std::size_t idx = 0; idx < next.size(); ++idx) {
      const cplx fz = 1.0 + scratch_[idx];
      next[idx] = mu[idx] * fz + nu[idx] * std::conj(fz);
    }
    const double inc = grid_l2(next.samples(), omega.samples(), g.spacing());
    increments.push_back(inc);
    std::swap(omega, next);
    ++it;
    if (inc <= options.tol) {
      status = SolveStatus::Converged;
      break;
    }
  }
  MappingSolution sol = assemble(omega, coeffs);
  sol.iterations = it;
  sol.status = status;
  sol.increment_norms = std::move(increments);
  return sol;
}

MappingSolution BeltramiSolver::solve_quasilinear(const CoefficientOracle& oracle, const SolverOptions& options,
                                                  const ComplexField* initial_omega) {
  const GridSpec& g = grid();
  if (oracle.linear()) {
    MappingSolution sol = solve_linear(freeze(oracle, g), options, initial_omega);
    sol.outer_iterations = 1;
    return sol;
  }

  SolverOptions inner = options;
  inner.tol = 0.1 * options.tol;

  ComplexField omega = initial_omega ? *initial_omega : ComplexField(g);
  ComplexField current = assemble(omega, freeze(oracle, g)).f;
  if (!initial_omega) current = sample_function([](cplx z) { return z; }, g);

  std::vector<double> diffs;
  std::size_t total_inner = 0;
  bool damping = false;
  int increases = 0;
  SolveStatus status = SolveStatus::MaxIterations;
  MappingSolution latest;
  for (std::size_t outer = 0; outer < options.outer_max; ++outer) {
    MappingSolution step = solve_linear(freeze(oracle, g, &current), inner, &omega);
    total_inner += step.iterations;
    if (!step.converged()) {
      step.iterations = total_inner;
      step.outer_iterations = outer + 1;
      step.outer_diffs = diffs;
      return step;
    }
    if (damping) {
      ComplexField mixed = combine(0.5, step.omega, 0.5, omega);
      step = assemble(mixed, std::move(step.coefficients));
    }
    const double diff = sup_difference(step.f, current, 1.0 - 1e-15);
    if (!diffs.empty() && diff > diffs.back()) {
      damping = true;
      if (++increases >= 3) status = SolveStatus::Divergent;
    } else {
      increases = 0;
    }
    diffs.push_back(diff);
    omega = step.omega;
    current = step.f;
    latest = std::move(step);
    latest.outer_iterations = outer + 1;
    if (status == SolveStatus::Divergent) break;
    if (diff <= options.tol) {
      status = SolveStatus::Converged;
      break;
    }
  }

  // Residual of the quasilinear equation: coefficients re-frozen at the final map.
  MappingSolution sol = assemble(omega, freeze(oracle, g, &latest.f));
  sol.iterations = total_inner;
  sol.outer_iterations = latest.outer_iterations;
  sol.status = status;
  sol.increment_norms = std::move(latest.increment_norms);
  sol.outer_diffs = std::move(diffs);
  return sol;
}

MappingSolution solve_linear(const FrozenCoefficients& coeffs, const GridSpec& grid, double tol, std::size_t max_iter) {
  BeltramiSolver solver(grid);
  SolverOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  return solver.solve_linear(coeffs, options);
}

MappingSolution solve_quasilinear(const CoefficientOracle& oracle, const GridSpec& grid, double tol,
                                  std::size_t outer_max) {
  BeltramiSolver solver(grid);
  SolverOptions options;
  options.tol = tol;
  options.outer_max = outer_max;
  return solver.solve_quasilinear(oracle, options);
}

// ---------------------------------------------------------------- ladder

LadderRun run_ladder(const CoefficientOracle& oracle, const RealPointFunction& Q, const std::vector<double>& levels,
                     const GridSpec& grid, const LadderOptions& options) {
  if (levels.empty()) throw std::invalid_argument("ladder needs at least one level");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] >= 1.0)) throw std::invalid_argument("ladder levels must be >= 1");
    if (i > 0 && !(levels[i] > levels[i - 1])) throw std::invalid_argument("ladder levels must be strictly increasing");
  }
  BeltramiSolver solver(grid);
  LadderRun run;
  std::optional<ComplexField> warm;
  for (double n : levels) {
    MappingSolution sol =
        solver.solve_quasilinear(truncate(oracle, Q, n), options.solver, warm ? &*warm : nullptr);
    if (!sol.converged()) {
      run.aborted = true;
      run.abort_reason = "level " + Manifest::format_double(n) + " did not converge (" + to_string(sol.status) + ")";
      break;
    }
    run.levels.push_back(n);
    warm = sol.omega;
    run.solutions.push_back(std::move(sol));
    if (run.solutions.size() >= 2) {
      const auto& a = run.solutions[run.solutions.size() - 2].f;
      const auto& b = run.solutions.back().f;
      run.sup_diffs.push_back(sup_difference(a, b, options.compact_radius));
    }
  }
  run.converged = !run.aborted && !run.sup_diffs.empty() && run.sup_diffs.back() < options.convergence_tol;
  return run;
}

}  // namespace beltrami
