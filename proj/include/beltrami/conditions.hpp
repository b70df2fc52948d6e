#pragma once

#include <functional>
#include <string>
#include <vector>

#include "beltrami/field.hpp"
#include "beltrami/grid.hpp"
#include "beltrami/manifest.hpp"

namespace beltrami {

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

/// (1 + |mu| + |nu|) / (1 - |mu| - |nu|); +inf when |mu| + |nu| = 1.
/// Throws std::domain_error when |mu| + |nu| > 1.
double dilatation_K(cplx mu, cplx nu);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  static GaussRule legendre(std::size_t n);
};

struct FmoResult {
  std::vector<double> eps;
  /// (1/(pi eps^2)) \int_{B(z0,eps)} |Q - mean| dm per eps.
  std::vector<double> estimates;
  Verdict verdict = Verdict::Inconclusive;
};

/// Mean oscillation of Q on shrinking disks about z0. Pass when the
/// estimates at the three smallest eps stay within twice their median.
FmoResult fmo_test(const RealPointFunction& Q, cplx z0, const std::vector<double>& eps_schedule);

struct DivergenceResult {
  std::vector<double> eps;     // decreasing
  std::vector<double> values;  // I(eps) = \int_eps^delta dr / (r q_{z0}(r))
  /// dI / dlog(1/eps) between consecutive eps.
  std::vector<double> slopes;
  /// Pass = divergent: the last slope is positive and at least half the first.
  Verdict verdict = Verdict::Inconclusive;
};

/// Throws NumericalError when a circle mean vanishes.
DivergenceResult divergence_integral(const RealPointFunction& Q, cplx z0, double delta, std::vector<double> eps_list);

using RadialWeight = std::function<double(double)>;

/// psi(t) = 1/t.
RadialWeight psi_inverse_radius();
/// psi(t) = 1 / (t q_{z0}(t)).
RadialWeight psi_inverse_radius_mean(const RealPointFunction& Q, cplx z0);

struct RingResult {
  double lhs = 0.0;  // \int_{eps<|z-z0|<eps0} Q psi^2(|z-z0|) dm
  double rhs = 0.0;  // c I^p
  double I = 0.0;    // \int_eps^eps0 psi
  bool pass = false;
  /// I keeps growing (relative slope rule) over eps, eps/10, eps/100.
  bool I_diverging = false;
};

RingResult ring_integral_test(const RealPointFunction& Q, const RadialWeight& psi, cplx z0, double eps, double eps0,
                              double p, double c);

struct IntegrabilityResult {
  double norm = 0.0;
  /// False when refining the quadrature keeps changing the value.
  bool finite = true;
};

/// (\int_D Q^power dm)^{1/power} by polar quadrature about the origin, graded
/// towards r = 0, r = 1 and each radius in singular_radii.
IntegrabilityResult q_integrability(const RealPointFunction& Q, double power,
                                    const std::vector<double>& singular_radii = {});

/// Radial data at one point, with the scales used by the ring condition.
struct RadialProfile {
  cplx z0;
  std::vector<double> radii;
  std::vector<double> q_means;
  double delta = 0.0;
  double eps0 = 0.0;
  double eps0_prime = 0.0;
  double c = 0.0;
  double p = 1.0;

  /// Throws std::invalid_argument unless 0 < eps0' <= eps0 < dist(z0, boundary),
  /// delta < dist(z0, boundary), radii increasing in (0, delta], p in (0, 2].
  static RadialProfile make(const RealPointFunction& Q, cplx z0, std::vector<double> radii, double delta, double eps0,
                            double eps0_prime, double c, double p);
};

struct RingMargin {
  double eps;
  double lhs;
  double rhs;
};

struct ConditionReport {
  cplx z0;
  double fmo_limsup_estimate = 0.0;
  bool fmo_unbounded = false;
  FmoResult fmo;
  DivergenceResult divergence;
  std::vector<RingMargin> ring_margins;
  double q_l1_norm = 0.0;
  bool q_l1_finite = true;
  Verdict fmo_verdict = Verdict::Inconclusive;
  Verdict divergence_verdict = Verdict::Inconclusive;
  Verdict ring_verdict = Verdict::Inconclusive;
  Verdict integrability_verdict = Verdict::Inconclusive;

  Manifest to_manifest() const;
};

struct ConditionSettings {
  std::vector<double> eps_schedule = {1e-1, 1e-2, 1e-3, 1e-4};
  double delta = 0.0;  // 0 -> 0.9 dist(z0, boundary)
  double ring_c = 6.283185307179586;
  double ring_p = 1.0;
  std::vector<double> singular_radii;
};

/// Runs every checker on Q at z0; the ring test uses psi = 1/(t q_{z0}(t)).
ConditionReport check_conditions(const RealPointFunction& Q, cplx z0, const ConditionSettings& settings = {});

}  // namespace beltrami
