#include "beltrami/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace beltrami {

namespace {

constexpr std::size_t kAngles = 256;
constexpr double kLogPanel = 0.25;

const GaussRule& gauss8() {
  static const GaussRule rule = GaussRule::legendre(8);
  return rule;
}

const GaussRule& gauss12() {
  static const GaussRule rule = GaussRule::legendre(12);
  return rule;
}

/// \int_a^b g(t) dt for 0 < a < b, integrated in s = log t.
template <typename G>
double log_quad(G&& g, double a, double b) {
  const double la = std::log(a);
  const double lb = std::log(b);
  const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil((lb - la) / kLogPanel)));
  const double width = (lb - la) / static_cast<double>(panels);
  const GaussRule& rule = gauss8();
  double sum = 0.0;
  for (std::size_t k = 0; k < panels; ++k) {
    const double mid = la + (static_cast<double>(k) + 0.5) * width;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double t = std::exp(mid + 0.5 * width * rule.nodes[j]);
      sum += rule.weights[j] * 0.5 * width * g(t) * t;
    }
  }
  return sum;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Quadrature points (weight, value) of Q over the disk B(z0, eps): geometric
/// radial panels towards the centre, trapezoid in angle.
std::vector<std::pair<double, double>> disk_samples(const RealPointFunction& Q, cplx z0, double eps) {
  constexpr int kLevels = 32;
  constexpr int kSub = 6;
  const GaussRule& rule = gauss12();
  std::vector<std::pair<double, double>> out;
  out.reserve(kLevels * kSub * rule.nodes.size() * kAngles);
  auto panel = [&](double a, double b) {
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double r = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[j];
      const double wr = 0.5 * (b - a) * rule.weights[j] * r * (2.0 * std::numbers::pi / kAngles);
      for (std::size_t k = 0; k < kAngles; ++k) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / kAngles;
        out.emplace_back(wr, Q(z0 + std::polar(r, theta)));
      }
    }
  };
  double outer = eps;
  // The last octave ends at eps 2^-32; what lies inside is below roundoff.
  const double ratio = std::pow(0.5, 1.0 / kSub);
  for (int level = 0; level < kLevels * kSub; ++level) {
    panel(ratio * outer, outer);
    outer *= ratio;
  }
  return out;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

double dilatation_K(cplx mu, cplx nu) {
  const double s = std::abs(mu) + std::abs(nu);
  if (s > 1.0) throw std::domain_error("dilatation_K: |mu| + |nu| = " + std::to_string(s) + " > 1");
  if (s == 1.0) return INFINITY;
  return (1.0 + s) / (1.0 - s);
}

GaussRule GaussRule::legendre(std::size_t n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

FmoResult fmo_test(const RealPointFunction& Q, cplx z0, const std::vector<double>& eps_schedule) {
  FmoResult out;
  out.eps = eps_schedule;
  std::sort(out.eps.begin(), out.eps.end(), std::greater<>());
  for (double eps : out.eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("fmo_test: eps must be positive");
    const auto samples = disk_samples(Q, z0, eps);
    double area = 0.0;
    double total = 0.0;
    const double ref = samples.front().second;
    for (const auto& [w, v] : samples) {
      area += w;
      total += w * (v - ref);
    }
    const double mean = ref + total / area;
    if (!std::isfinite(mean)) {
      out.estimates.push_back(INFINITY);
      continue;
    }
    double osc = 0.0;
    for (const auto& [w, v] : samples) osc += w * std::abs(v - mean);
    // Normalized by the exact disk area pi eps^2 (Omega_2 = pi).
    out.estimates.push_back(osc / (std::numbers::pi * eps * eps));
  }
  if (out.estimates.size() < 3 ||
      std::any_of(out.estimates.begin(), out.estimates.end(), [](double e) { return !std::isfinite(e); })) {
    out.verdict = Verdict::Inconclusive;
    return out;
  }
  const std::vector<double> tail(out.estimates.end() - 3, out.estimates.end());
  const double med = median(tail);
  const double worst = *std::max_element(tail.begin(), tail.end());
  out.verdict = worst <= 2.0 * med ? Verdict::Pass : Verdict::Fail;
  return out;
}

DivergenceResult divergence_integral(const RealPointFunction& Q, cplx z0, double delta, std::vector<double> eps_list) {
  if (!(delta > 0.0)) throw std::invalid_argument("divergence_integral: delta must be positive");
  std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
  DivergenceResult out;
  out.eps = eps_list;
  auto integrand = [&](double r) {
    const double q = circle_mean(Q, z0, r);
    if (q == 0.0) {
      throw NumericalError("divergence_integral: circle mean vanishes at r = " + std::to_string(r));
    }
    return 1.0 / (r * q);
  };
  double upper = delta;
  double acc = 0.0;
  for (double eps : eps_list) {
    if (!(eps > 0.0 && eps < delta)) throw std::invalid_argument("divergence_integral: need 0 < eps < delta");
    if (eps < upper) acc += log_quad(integrand, eps, upper);
    out.values.push_back(acc);
    upper = eps;
  }
  for (std::size_t i = 1; i < out.eps.size(); ++i) {
    out.slopes.push_back((out.values[i] - out.values[i - 1]) / std::log(out.eps[i - 1] / out.eps[i]));
  }
  if (out.slopes.empty()) {
    out.verdict = Verdict::Inconclusive;
  } else {
    const double first = out.slopes.front();
    const double last = out.slopes.back();
    out.verdict = (last > 0.0 && last >= 0.5 * first) ? Verdict::Pass : Verdict::Fail;
  }
  return out;
}

RadialWeight psi_inverse_radius() {
  return [](double t) { return 1.0 / t; };
}

RadialWeight psi_inverse_radius_mean(const RealPointFunction& Q, cplx z0) {
  return [Q, z0](double t) { return 1.0 / (t * circle_mean(Q, z0, t)); };
}

RingResult ring_integral_test(const RealPointFunction& Q, const RadialWeight& psi, cplx z0, double eps, double eps0,
                              double p, double c) {
  if (!(eps > 0.0 && eps < eps0)) throw std::invalid_argument("ring_integral_test: need 0 < eps < eps0");
  RingResult out;
  out.lhs = log_quad(
      [&](double t) {
        const double w = psi(t);
        return w * w * t * 2.0 * std::numbers::pi * circle_mean(Q, z0, t);
      },
      eps, eps0);
  out.I = log_quad(psi, eps, eps0);
  if (!(out.I > 0.0) || !std::isfinite(out.I)) {
    throw NumericalError("ring_integral_test: I(eps, eps0) is zero or not finite");
  }
  out.rhs = c * std::pow(out.I, p);
  // Equality cases (lhs = rhs analytically) pass to quadrature accuracy.
  out.pass = out.lhs <= out.rhs * (1.0 + 1e-9);
  const double i1 = out.I + log_quad(psi, eps / 10.0, eps);
  const double i2 = i1 + log_quad(psi, eps / 100.0, eps / 10.0);
  const double first = i1 - out.I;
  const double second = i2 - i1;
  out.I_diverging = second > 0.0 && second >= 0.5 * first;
  return out;
}

IntegrabilityResult q_integrability(const RealPointFunction& Q, double power, const std::vector<double>& singular_radii) {
  if (!(power >= 1.0)) throw std::invalid_argument("q_integrability: power must be >= 1");
  constexpr int kDepth = 40;
  const GaussRule& rule = gauss12();
  auto panel = [&](double a, double b) {
    double sum = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double r = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[j];
      double ring = 0.0;
      for (std::size_t k = 0; k < kAngles; ++k) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / kAngles;
        ring += std::pow(Q(std::polar(r, theta)), power);
      }
      sum += 0.5 * (b - a) * rule.weights[j] * r * ring * (2.0 * std::numbers::pi / kAngles);
    }
    return sum;
  };

  std::vector<double> special = {0.0, 1.0};
  special.insert(special.end(), singular_radii.begin(), singular_radii.end());
  std::vector<double> edges;
  for (int i = 0; i <= 16; ++i) edges.push_back(i / 16.0);
  for (double rho : special) {
    double d = 1.0 / 32.0;
    for (int j = 0; j < kDepth; ++j) {
      if (rho - d > 0.0) edges.push_back(rho - d);
      if (rho + d < 1.0) edges.push_back(rho + d);
      d *= 0.5;
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  double total = 0.0;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) total += panel(edges[e], edges[e + 1]);

  // Dyadic shells approaching each special radius: an integrable singularity
  // makes them decay geometrically, a non-integrable one keeps them level.
  IntegrabilityResult out;
  double tail = 0.0;
  for (double rho : special) {
    for (double side : {-1.0, 1.0}) {
      std::vector<double> shells;
      double d = 1.0 / 32.0;
      for (int j = 0; j < kDepth; ++j) {
        const double a = rho + side * d;
        const double b = rho + side * 0.5 * d;
        if (std::min(a, b) < 0.0 || std::max(a, b) > 1.0) break;
        shells.push_back(panel(std::min(a, b), std::max(a, b)));
        d *= 0.5;
      }
      if (shells.size() < 10) continue;
      const double recent = std::accumulate(shells.end() - 5, shells.end(), 0.0);
      const double earlier = std::accumulate(shells.end() - 10, shells.end() - 5, 0.0);
      if (!std::isfinite(recent) || !std::isfinite(earlier)) {
        out.finite = false;
        continue;
      }
      if (recent <= 1e-14 * std::max(1.0, total)) continue;
      const double ratio = recent / earlier;
      if (!(ratio <= 0.9)) {
        out.finite = false;
        continue;
      }
      const double step = std::pow(ratio, 0.2);
      tail += shells.back() * step / (1.0 - step);
    }
  }
  total += tail;
  out.finite = out.finite && std::isfinite(total);
  out.norm = std::pow(total, 1.0 / power);
  return out;
}

RadialProfile RadialProfile::make(const RealPointFunction& Q, cplx z0, std::vector<double> radii, double delta,
                                  double eps0, double eps0_prime, double c, double p) {
  const double dist = 1.0 - std::abs(z0);
  if (!(dist > 0.0)) throw std::invalid_argument("z0 must lie inside the unit disk");
  if (!(eps0_prime > 0.0 && eps0_prime <= eps0 && eps0 < dist)) {
    throw std::invalid_argument("need 0 < eps0' <= eps0 < dist(z0, boundary)");
  }
  if (!(delta > 0.0 && delta < dist)) throw std::invalid_argument("need 0 < delta < dist(z0, boundary)");
  if (!(p > 0.0 && p <= 2.0)) throw std::invalid_argument("p must lie in (0, 2]");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0 && radii[i] <= delta) || (i > 0 && !(radii[i] > radii[i - 1]))) {
      throw std::invalid_argument("radii must be increasing within (0, delta]");
    }
  }
  RadialProfile out{z0, std::move(radii), {}, delta, eps0, eps0_prime, c, p};
  for (double r : out.radii) out.q_means.push_back(circle_mean(Q, z0, r));
  return out;
}

ConditionReport check_conditions(const RealPointFunction& Q, cplx z0, const ConditionSettings& settings) {
  const double dist = 1.0 - std::abs(z0);
  if (!(dist > 0.0)) throw std::invalid_argument("z0 must lie inside the unit disk");
  const double delta = settings.delta > 0.0 ? settings.delta : 0.9 * dist;
  std::vector<double> eps;
  for (double e : settings.eps_schedule) {
    if (e < delta) eps.push_back(e);
  }
  ConditionReport report;
  report.z0 = z0;
  report.fmo = fmo_test(Q, z0, eps);
  report.fmo_verdict = report.fmo.verdict;
  report.fmo_unbounded = report.fmo.verdict == Verdict::Fail;
  if (report.fmo.estimates.size() >= 3) {
    report.fmo_limsup_estimate =
        *std::max_element(report.fmo.estimates.end() - 3, report.fmo.estimates.end());
  }
  try {
    report.divergence = divergence_integral(Q, z0, delta, eps);
    report.divergence_verdict = report.divergence.verdict;
  } catch (const NumericalError&) {
    report.divergence_verdict = Verdict::Inconclusive;
  }
  const RadialWeight psi = psi_inverse_radius_mean(Q, z0);
  bool all_pass = !eps.empty();
  for (double e : eps) {
    const RingResult ring = ring_integral_test(Q, psi, z0, e, delta, settings.ring_p, settings.ring_c);
    report.ring_margins.push_back({e, ring.lhs, ring.rhs});
    all_pass = all_pass && ring.pass;
  }
  report.ring_verdict = eps.empty() ? Verdict::Inconclusive : (all_pass ? Verdict::Pass : Verdict::Fail);
  const IntegrabilityResult l1 = q_integrability(Q, 1.0, settings.singular_radii);
  report.q_l1_norm = l1.norm;
  report.q_l1_finite = l1.finite;
  report.integrability_verdict = l1.finite ? Verdict::Pass : Verdict::Fail;
  return report;
}

Manifest ConditionReport::to_manifest() const {
  Manifest m;
  m.comment("condition report");
  m.set("z0.re", z0.real());
  m.set("z0.im", z0.imag());
  m.set("fmo.eps", fmo.eps);
  m.set("fmo.estimates", fmo.estimates);
  m.set("fmo.limsup_estimate", fmo_limsup_estimate);
  m.set("fmo.unbounded", fmo_unbounded);
  m.set("fmo.verdict", to_string(fmo_verdict));
  m.set("divergence.eps", divergence.eps);
  m.set("divergence.values", divergence.values);
  m.set("divergence.slopes", divergence.slopes);
  m.set("divergence.verdict", to_string(divergence_verdict));
  std::vector<double> ring_eps;
  std::vector<double> ring_lhs;
  std::vector<double> ring_rhs;
  for (const auto& r : ring_margins) {
    ring_eps.push_back(r.eps);
    ring_lhs.push_back(r.lhs);
    ring_rhs.push_back(r.rhs);
  }
  m.set("ring.eps", ring_eps);
  m.set("ring.lhs", ring_lhs);
  m.set("ring.rhs", ring_rhs);
  m.set("ring.verdict", to_string(ring_verdict));
  m.set("q_l1_norm", q_l1_norm);
  m.set("q_l1_finite", q_l1_finite);
  m.set("integrability.verdict", to_string(integrability_verdict));
  return m;
}

}  // namespace beltrami
