#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "beltrami/field.hpp"
#include "beltrami/grid.hpp"
#include "beltrami/spectral.hpp"

namespace beltrami {

struct WirtingerValue {
  cplx fz;
  cplx fzbar;
};

using CoefficientFunction = std::function<cplx(cplx z, cplx w)>;

/// Coefficient pair (mu(z, w), nu(z, w)) of
///   f_zbar = mu(z, f) f_z + nu(z, f) conj(f_z)
/// with a pointwise bound |mu| + |nu| <= q(z) < 1 on the unit disk.
///
/// Only finitely many (z, w) pairs are ever evaluated; measurability in z and
/// continuity in w are the caller's obligation.
class CoefficientOracle {
 public:
  struct Value {
    cplx mu;
    cplx nu;
  };

  CoefficientOracle() = default;
  CoefficientOracle(CoefficientFunction mu, CoefficientFunction nu, RealPointFunction q);

  /// Coefficients at (z, w). Outside the unit disk both are 0. Throws
  /// NumericalError when |mu| + |nu| exceeds q(z) or q(z) >= 1 inside the disk.
  Value evaluate(cplx z, cplx w) const;
  double bound(cplx z) const;

  const CoefficientFunction& mu() const { return mu_; }
  const CoefficientFunction& nu() const { return nu_; }
  const RealPointFunction& q() const { return q_; }

  /// True when mu and nu ignore w (declared by the constructor of the oracle).
  bool linear() const { return linear_; }
  CoefficientOracle& mark_linear(bool value = true) {
    linear_ = value;
    return *this;
  }

 private:
  CoefficientFunction mu_;
  CoefficientFunction nu_;
  RealPointFunction q_;
  bool linear_ = false;
};

/// Oracle with constant coefficients on the unit disk.
CoefficientOracle constant_oracle(cplx mu, cplx nu);

/// Keeps (mu, nu) where Q(z) <= n and sets them to 0 where Q(z) > n; the
/// bound becomes min(q, (n-1)/(n+1)) on the kept set. n = +inf returns the
/// oracle unchanged. Requires n >= 1.
CoefficientOracle truncate(const CoefficientOracle& oracle, const RealPointFunction& Q, double n);

/// Q_0(z) = (1 + q(z)) / (1 - q(z)); the returned function throws
/// std::domain_error when q(z) is outside [0, 1).
RealPointFunction q0_of(const RealPointFunction& q);

/// Coefficients sampled on a grid with w frozen. Zero outside the unit disk.
struct FrozenCoefficients {
  ComplexField mu_field;
  ComplexField nu_field;
  double q_max = 0.0;

  /// Builds from sampled fields and validates the invariants.
  static FrozenCoefficients from_fields(ComplexField mu, ComplexField nu);
};

/// Samples the oracle at every disk node with w = current(z), clamped to
/// |w| <= 10 with its phase kept. Without `current` uses w = z.
FrozenCoefficients freeze(const CoefficientOracle& oracle, const GridSpec& grid, const ComplexField* current = nullptr);

enum class SolveStatus { Converged, MaxIterations, Divergent };

std::string to_string(SolveStatus status);

struct Normalization {
  /// f(0) before the shift f -> f - f(0).
  cplx shift;
  /// f(1) after the shift, bilinear interpolation.
  cplx f_at_one;
};

/// Computed map f = z + C(omega) - f(0).
///
/// fzbar = omega and fz = 1 + T(omega) are the derivatives the discrete
/// equation is solved for; residual_linf is the max of
/// |fzbar - mu fz - nu conj(fz)| over disk nodes for `coefficients`.
struct MappingSolution {
  ComplexField f;
  ComplexField fz;
  ComplexField fzbar;
  ComplexField omega;
  FrozenCoefficients coefficients;
  double residual_linf = 0.0;
  std::size_t iterations = 0;
  std::size_t outer_iterations = 0;
  SolveStatus status = SolveStatus::Converged;
  Normalization normalization;
  /// Grid L2 norms of successive inner increments, last linear solve.
  std::vector<double> increment_norms;
  /// sup-differences between outer iterates (quasilinear solves only).
  std::vector<double> outer_diffs;

  bool converged() const { return status == SolveStatus::Converged; }
};

/// max over disk nodes of |fzbar - mu fz - nu conj(fz)|.
double residual_linf(const ComplexField& fz, const ComplexField& fzbar, const FrozenCoefficients& coeffs);

/// Same residual with central-difference derivatives of f, restricted to
/// r_min <= |z| <= r_max, coefficients re-evaluated at (z, f(z)).
double fd_residual(const ComplexField& f, const CoefficientOracle& oracle, double r_min, double r_max);

/// f / Re f(1) when Im f(1) is negligible (|Im| <= 1e-6 |f(1)|), else nullopt.
std::optional<ComplexField> real_positive_rescaled(const MappingSolution& sol);

struct SolverOptions {
  double tol = 1e-8;
  std::size_t max_iter = 5000;
  std::size_t outer_max = 60;
};

/// Holds the whole-plane operators for one grid so repeated solves reuse them.
class BeltramiSolver {
 public:
  explicit BeltramiSolver(GridSpec grid);

  const GridSpec& grid() const { return operators_.grid(); }

  /// Fixed-point iteration omega <- mu + nu + mu T(omega) + nu conj(T(omega))
  /// from omega = initial (or 0) until the grid L2 increment is <= tol.
  /// Throws NumericalError when q_max >= 1.
  MappingSolution solve_linear(const FrozenCoefficients& coeffs, const SolverOptions& options,
                               const ComplexField* initial_omega = nullptr);

  /// Outer freezing loop around solve_linear; stops when the sup-difference
  /// of successive maps over disk nodes is <= tol. Damping 0.5 switches on at
  /// the first increase, three consecutive increases mean divergence.
  MappingSolution solve_quasilinear(const CoefficientOracle& oracle, const SolverOptions& options,
                                    const ComplexField* initial_omega = nullptr);

  PlanarOperators& operators() { return operators_; }

 private:
  MappingSolution assemble(const ComplexField& omega, FrozenCoefficients coeffs);

  PlanarOperators operators_;
  std::vector<cplx> scratch_;
};

MappingSolution solve_linear(const FrozenCoefficients& coeffs, const GridSpec& grid, double tol, std::size_t max_iter);
MappingSolution solve_quasilinear(const CoefficientOracle& oracle, const GridSpec& grid, double tol,
                                  std::size_t outer_max);

struct LadderOptions {
  SolverOptions solver;
  /// Radius of the compact on which sup-differences are measured.
  double compact_radius = 0.9;
  /// The ladder counts as converged when the last sup-difference is below this.
  double convergence_tol = 1e-2;
};

struct LadderRun {
  std::vector<double> levels;
  std::vector<MappingSolution> solutions;
  std::vector<double> sup_diffs;
  bool converged = false;
  bool aborted = false;
  std::string abort_reason;
};

/// Solves the truncated equation at each level (warm-starting from the
/// previous level) and records sup-differences on |z| <= compact_radius.
/// A level that fails to converge aborts the ladder with partial results.
LadderRun run_ladder(const CoefficientOracle& oracle, const RealPointFunction& Q, const std::vector<double>& levels,
                     const GridSpec& grid, const LadderOptions& options = {});

}  // namespace beltrami
