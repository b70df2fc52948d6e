#include "beltrami/example_family.hpp"

#include <cmath>
#include <string>

namespace beltrami::examples {

namespace {

// e^{i theta} for z != 0.
cplx unit(cplx z) { return z / std::abs(z); }

}  // namespace

void ExampleParams::validate() const {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must be a finite number >= 1");
  if (!(alpha > 0.0 && alpha < 2.0 / p)) {
    throw std::invalid_argument("alpha must satisfy 0 < alpha < 2/p (alpha=" + std::to_string(alpha) +
                                ", p=" + std::to_string(p) + ")");
  }
  if (!std::isinf(k) && !(k > 1.0 / alpha)) {
    throw std::invalid_argument("k must satisfy k > 1/alpha (k=" + std::to_string(k) +
                                ", alpha=" + std::to_string(alpha) + ")");
  }
}

double ExampleParams::threshold_radius() const {
  if (std::isinf(k)) return 0.5;
  return (2.0 + k * alpha) / (2.0 * k * alpha);
}

double ExampleParams::inner_image_radius() const {
  if (std::isinf(k)) return 0.0;
  return std::pow(2.0 / (k * alpha), 1.0 / alpha);
}

cplx ex1_mu(cplx z, cplx w, const ExampleParams& params) {
  const double r = std::abs(z);
  if (r <= 0.5 || r >= 1.0) return {};
  const cplx phase = unit(z) * unit(z);
  const double c = params.alpha * (2.0 * r - 1.0);
  const double aw = std::abs(w);
  if (aw >= 1.0) return phase * ((2.0 * r - c) / (2.0 * r + c));
  const double wa = std::pow(aw, params.alpha);
  return phase * ((wa + 1.0 - c) / (wa + 1.0 + c));
}

double ex1_q(cplx z, const ExampleParams& params) {
  const double r = std::abs(z);
  if (r <= 0.5 || r >= 1.0) return 0.0;
  const double c = params.alpha * (2.0 * r - 1.0);
  return (2.0 - c) / (2.0 + c);
}

// Outside the unit disk the maps continue as the identity, which is the
// whole-plane normalization the solver produces (coefficients vanish there).

cplx ex1_f(cplx z, const ExampleParams& params) {
  const double r = std::abs(z);
  if (r >= 1.0) return z;
  if (r <= 0.5) return {};
  return unit(z) * std::pow(2.0 * r - 1.0, 1.0 / params.alpha);
}

cplx ex1_fk(cplx z, const ExampleParams& params) {
  if (std::isinf(params.k)) return ex1_f(z, params);
  const double r = std::abs(z);
  const double rho = params.threshold_radius();
  if (r > rho) return ex1_f(z, params);
  // Inner branch exactly as printed: z / rho_k * (2/(k alpha))^{1/alpha}.
  return z / rho * params.inner_image_radius();
}

cplx ex1_gk(cplx y, const ExampleParams& params) {
  const double s = std::abs(y);
  if (s >= 1.0) return y;
  const double inner = params.inner_image_radius();
  if (s > inner) return unit(y) * (0.5 * (std::pow(s, params.alpha) + 1.0));
  if (s == 0.0) return {};
  return y * params.threshold_radius() / inner;
}

WirtingerValue ex1_fk_derivatives(cplx z, const ExampleParams& params) {
  const double r = std::abs(z);
  if (r >= 1.0) return {1.0, 0.0};
  const double rho = params.threshold_radius();
  if (r <= rho) {
    if (std::isinf(params.k)) return {0.0, 0.0};
    return {params.inner_image_radius() / rho, 0.0};
  }
  const double a = params.alpha;
  const double radial = std::pow(2.0 * r - 1.0, 1.0 / a);
  const double radial_prime = (2.0 / a) * std::pow(2.0 * r - 1.0, 1.0 / a - 1.0);
  const cplx phase = unit(z) * unit(z);
  return {0.5 * (radial_prime + radial / r), phase * (0.5 * (radial_prime - radial / r))};
}

double ex1_dilatation(cplx zy, const ExampleParams& params, Dilatation which) {
  const double r = std::abs(zy);
  const double a = params.alpha;
  switch (which) {
    case Dilatation::Kmu:
      if (r <= 0.5 || r >= 1.0) return 1.0;
      return 2.0 / (a * (2.0 * r - 1.0));
    case Dilatation::Kmuk: {
      if (r >= 1.0) return 1.0;
      const double rho = params.threshold_radius();
      if (std::isinf(params.k) && r < 0.5) return 1.0;
      if (r <= rho && !std::isinf(params.k)) return 1.0;
      const double denom = 2.0 * a * (2.0 * r - 1.0);
      return denom > 0.0 ? 4.0 * r / denom : INFINITY;
    }
    case Dilatation::Kmugk:
      if (r >= 1.0) return 1.0;
      if (r <= params.inner_image_radius()) return 1.0;
      return (std::pow(r, a) + 1.0) / (a * std::pow(r, a));
    case Dilatation::Q:
      if (r == 0.0) return INFINITY;
      return (std::pow(r, a) + 1.0) / (a * std::pow(r, a));
  }
  return NAN;
}

CoefficientPair ex2_coefficients(cplx z, cplx w, const ExampleParams& params) {
  const cplx half = 0.5 * ex1_mu(z, w, params);
  return {half, half};
}

CoefficientOracle example1_oracle(const ExampleParams& params) {
  params.validate();
  return CoefficientOracle([params](cplx z, cplx w) { return ex1_mu(z, w, params); },
                           [](cplx, cplx) { return cplx{}; },
                           [params](cplx z) { return ex1_q(z, params); });
}

CoefficientOracle example2_oracle(const ExampleParams& params) {
  params.validate();
  return CoefficientOracle([params](cplx z, cplx w) { return ex2_coefficients(z, w, params).mu; },
                           [params](cplx z, cplx w) { return ex2_coefficients(z, w, params).nu; },
                           [params](cplx z) { return ex1_q(z, params); });
}

RealPointFunction example1_truncation_q(const ExampleParams& params) {
  return q0_of([params](cplx z) { return ex1_q(z, params); });
}

PolarIdentityResult polar_identity_check(const ComplexField& f) {
  const auto d = wirtinger_derivatives(f);
  const GridSpec& grid = f.grid();
  const cplx i(0.0, 1.0);
  PolarIdentityResult out;
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const cplx z = grid.node(idx);
    const double r = std::abs(z);
    if (r < 0.6 || r > 0.9) continue;
    const cplx fz = d.fz[idx];
    const cplx fzbar = d.fzbar[idx];
    const cplx fx = fz + fzbar;
    const cplx fy = i * (fz - fzbar);
    const double c = z.real() / r;
    const double s = z.imag() / r;
    const cplx f_r = c * fx + s * fy;
    const cplx f_theta = r * (-s * fx + c * fy);
    const cplx denom = r * f_r - i * f_theta;
    if (std::abs(fz) == 0.0 || std::abs(denom) == 0.0) {
      ++out.nodes_excluded;
      continue;
    }
    const cplx phase = unit(z) * unit(z);
    const cplx polar = phase * (r * f_r + i * f_theta) / denom;
    out.max_discrepancy = std::max(out.max_discrepancy, std::abs(fzbar / fz - polar));
    ++out.nodes_checked;
  }
  return out;
}

}  // namespace beltrami::examples
