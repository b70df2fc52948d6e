#pragma once

#include <limits>

#include "beltrami/field.hpp"
#include "beltrami/solver.hpp"

/// Closed-form degenerate example: a radial coefficient on the unit disk that
/// degenerates on |z| = 1/2, its continuous non-homeomorphic solution
/// f(z) = (z/|z|)(2|z|-1)^{1/alpha} (constant 0 on |z| <= 1/2), the truncated
/// homeomorphic solutions f_k with inverses g_k, and their dilatations.
namespace beltrami::examples {

struct ExampleParams {
  double alpha = 1.0;
  double p = 1.0;
  /// Truncation level; +inf means "untruncated".
  double k = std::numeric_limits<double>::infinity();

  /// Throws std::invalid_argument unless 0 < alpha < 2/p, p >= 1 and, for
  /// finite k, k > 1/alpha.
  void validate() const;

  /// rho_k = (2 + k alpha) / (2 k alpha): K_mu <= k exactly on |z| >= rho_k.
  double threshold_radius() const;
  /// (2/(k alpha))^{1/alpha} = |f_k| on |z| = rho_k.
  double inner_image_radius() const;
};

enum class Dilatation {
  Kmu,    // K of the |w|-independent bound mu(z): 2/(alpha(2|z|-1)), 1 on |z| <= 1/2
  Kmuk,   // K of f_k as printed: 4|z|/(2 alpha(2|z|-1)) outside rho_k, 1 inside
  Kmugk,  // K_{mu_k} o g_k: (|y|^a+1)/(a|y|^a) outside (2/(k a))^{1/a}, 1 inside
  Q,      // envelope (|y|^a+1)/(a|y|^a) on the whole disk
};

/// Three-branch coefficient mu(z, w); zero for |z| <= 1/2 and outside the disk.
cplx ex1_mu(cplx z, cplx w, const ExampleParams& params);

/// |w|-independent upper bound q(z) = (2 - alpha(2r-1))/(2 + alpha(2r-1)) for
/// 1/2 < r < 1, zero elsewhere.
double ex1_q(cplx z, const ExampleParams& params);

cplx ex1_f(cplx z, const ExampleParams& params);
cplx ex1_fk(cplx z, const ExampleParams& params);
cplx ex1_gk(cplx y, const ExampleParams& params);

/// Closed-form Wirtinger derivatives of f_k off the branch circles; used as an
/// independent oracle for grid derivatives.
WirtingerValue ex1_fk_derivatives(cplx z, const ExampleParams& params);

/// +inf on the degeneracy circle |z| = 1/2 for Kmuk.
double ex1_dilatation(cplx z_or_y, const ExampleParams& params, Dilatation which);

struct CoefficientPair {
  cplx mu;
  cplx nu;
};

/// Two-characteristic split mu = nu = ex1_mu / 2.
CoefficientPair ex2_coefficients(cplx z, cplx w, const ExampleParams& params);

/// Oracles for the solver. Example 1 has nu = 0; Example 2 splits mu evenly.
CoefficientOracle example1_oracle(const ExampleParams& params);
CoefficientOracle example2_oracle(const ExampleParams& params);

/// Truncation function for the ladder: Q_0 of ex1_q, which equals Kmu.
RealPointFunction example1_truncation_q(const ExampleParams& params);

struct PolarIdentityResult {
  double max_discrepancy = 0.0;
  std::size_t nodes_checked = 0;
  std::size_t nodes_excluded = 0;
};

/// Compares fzbar/fz with e^{2i theta}(r f_r + i f_theta)/(r f_r - i f_theta)
/// on 0.6 <= |z| <= 0.9, polar derivatives by chain rule from central
/// differences. Nodes with f_z = 0 count as excluded.
PolarIdentityResult polar_identity_check(const ComplexField& f);

}  // namespace beltrami::examples
