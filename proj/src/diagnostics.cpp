#include "beltrami/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace beltrami {

namespace {

struct PatchHit {
  bool found = false;
  double s = 0.0;
  double t = 0.0;
};

// Solves F(s, t) = w on the bilinear patch through f00, f10 (col+1), f01 (row+1), f11.
PatchHit bilinear_preimage(cplx f00, cplx f10, cplx f01, cplx f11, cplx w) {
  constexpr double kSlack = 1e-10;
  double s = 0.5;
  double t = 0.5;
  const double scale = std::max({std::abs(f10 - f00), std::abs(f01 - f00), std::abs(f11 - f00), 1e-300});
  for (int iter = 0; iter < 30; ++iter) {
    const cplx F = f00 * (1 - s) * (1 - t) + f10 * s * (1 - t) + f01 * (1 - s) * t + f11 * s * t - w;
    const cplx Fs = (f10 - f00) * (1 - t) + (f11 - f01) * t;
    const cplx Ft = (f01 - f00) * (1 - s) + (f11 - f10) * s;
    const double det = Fs.real() * Ft.imag() - Ft.real() * Fs.imag();
    if (det == 0.0) return {};
    const double ds = (F.real() * Ft.imag() - Ft.real() * F.imag()) / det;
    const double dt = (Fs.real() * F.imag() - F.real() * Fs.imag()) / det;
    s -= ds;
    t -= dt;
    if (std::abs(ds) + std::abs(dt) < 1e-14) break;
    if (std::abs(s) > 4.0 || std::abs(t) > 4.0) return {};
  }
  const cplx F = f00 * (1 - s) * (1 - t) + f10 * s * (1 - t) + f01 * (1 - s) * t + f11 * s * t - w;
  if (std::abs(F) > 1e-9 * scale) return {};
  if (s < -kSlack || s > 1 + kSlack || t < -kSlack || t > 1 + kSlack) return {};
  return {true, std::clamp(s, 0.0, 1.0), std::clamp(t, 0.0, 1.0)};
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

DilatationReport dilatation_report(const ComplexField& f, double p) {
  if (!(p >= 1.0 && p <= 2.0)) throw std::invalid_argument("dilatation_report: p must lie in [1, 2]");
  const auto d = wirtinger_derivatives(f);
  const GridSpec& grid = f.grid();
  DilatationReport out{RealField(grid), RealField(grid), RealField(grid), 0.0, p};
  std::size_t disk = 0;
  std::size_t degenerate = 0;
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const double a = std::abs(d.fz[idx]);
    const double b = std::abs(d.fzbar[idx]);
    const double J = a * a - b * b;
    out.jacobian[idx] = J;
    if (a == 0.0 && b == 0.0) {
      out.K_mu_f[idx] = 1.0;
      out.K_I_p[idx] = 1.0;
    } else if (J <= 0.0) {
      out.K_mu_f[idx] = INFINITY;
      out.K_I_p[idx] = INFINITY;
    } else {
      out.K_mu_f[idx] = (a + b) / (a - b);
      out.K_I_p[idx] = (a + b) * std::pow(a - b, 1.0 - p);
    }
    if (in_unit_disk(grid.node(idx))) {
      ++disk;
      if (J <= 0.0) ++degenerate;
    }
  }
  out.degenerate_fraction = disk ? static_cast<double>(degenerate) / static_cast<double>(disk) : 0.0;
  return out;
}

DilatationReport dilatation_report(const MappingSolution& sol, double p) { return dilatation_report(sol.f, p); }

double InverseMap::mapped_fraction() const {
  if (disk_nodes == 0) return 1.0;
  return 1.0 - static_cast<double>(unmapped_disk_nodes) / static_cast<double>(disk_nodes);
}

InverseMap invert_mapping(const ComplexField& f, const GridSpec& target_grid) {
  const double degenerate = dilatation_report(f, 2.0).degenerate_fraction;
  if (degenerate >= 0.005) {
    throw NumericalError("invert_mapping: degenerate fraction " + std::to_string(degenerate) +
                         " >= 0.5%, map is not a homeomorphism candidate");
  }
  const GridSpec& src = f.grid();
  const std::size_t n = src.n_side();
  const std::size_t m = target_grid.n_side();
  const double ht = target_grid.spacing();
  const double Lt = target_grid.half_width();
  // Targets: the unit disk plus a two-cell collar so derivatives of g exist on it.
  const double reach = 1.0 + 2.0 * ht;

  InverseMap out{ComplexField(target_grid), std::vector<std::uint8_t>(target_grid.size(), 0), 0.0, 0, 0};
  std::vector<cplx> pre(target_grid.size());

  for (std::size_t r = 0; r + 1 < n; ++r) {
    for (std::size_t c = 0; c + 1 < n; ++c) {
      const cplx f00 = f(r, c);
      const cplx f10 = f(r, c + 1);
      const cplx f01 = f(r + 1, c);
      const cplx f11 = f(r + 1, c + 1);
      const double xmin = std::min({f00.real(), f10.real(), f01.real(), f11.real()});
      const double xmax = std::max({f00.real(), f10.real(), f01.real(), f11.real()});
      const double ymin = std::min({f00.imag(), f10.imag(), f01.imag(), f11.imag()});
      const double ymax = std::max({f00.imag(), f10.imag(), f01.imag(), f11.imag()});
      if (xmax < -reach || xmin > reach || ymax < -reach || ymin > reach) continue;
      const auto lo = [&](double v) {
        return static_cast<long>(std::max(0.0, std::ceil((v + Lt) / ht - 1e-9)));
      };
      const auto hi = [&](double v) {
        return static_cast<long>(std::min(static_cast<double>(m - 1), std::floor((v + Lt) / ht + 1e-9)));
      };
      for (long tr = lo(ymin); tr <= hi(ymax); ++tr) {
        for (long tc = lo(xmin); tc <= hi(xmax); ++tc) {
          const std::size_t tidx = target_grid.index(static_cast<std::size_t>(tr), static_cast<std::size_t>(tc));
          const cplx w = target_grid.node(tidx);
          if (std::abs(w) > reach) continue;
          const PatchHit hit = bilinear_preimage(f00, f10, f01, f11, w);
          if (!hit.found) continue;
          const cplx z = src.node(r, c) + src.spacing() * cplx(hit.s, hit.t);
          if (out.mapped[tidx]) {
            if (std::abs(pre[tidx] - z) > 0.5 * src.spacing()) {
              throw NumericalError("invert_mapping: fold detected, w = (" + std::to_string(w.real()) + ", " +
                                   std::to_string(w.imag()) + ") has two preimages");
            }
            continue;
          }
          out.mapped[tidx] = 1;
          pre[tidx] = z;
        }
      }
    }
  }

  for (std::size_t idx = 0; idx < target_grid.size(); ++idx) {
    const cplx w = target_grid.node(idx);
    const bool disk = in_unit_disk(w);
    if (disk) ++out.disk_nodes;
    if (out.mapped[idx]) {
      out.g[idx] = pre[idx];
      if (const auto back = interpolate(f, pre[idx])) {
        out.roundtrip_max = std::max(out.roundtrip_max, std::abs(*back - w));
      }
    } else {
      out.g[idx] = w;
      if (disk) ++out.unmapped_disk_nodes;
    }
  }
  return out;
}

InverseMap invert_mapping(const MappingSolution& sol, const GridSpec& target_grid) {
  return invert_mapping(sol.f, target_grid);
}

std::vector<std::uint8_t> stencil_valid(const InverseMap& g) {
  const GridSpec& grid = g.g.grid();
  const std::size_t n = grid.n_side();
  std::vector<std::uint8_t> valid(grid.size(), 0);
  for (std::size_t r = 1; r + 1 < n; ++r) {
    for (std::size_t c = 1; c + 1 < n; ++c) {
      valid[grid.index(r, c)] = g.mapped[grid.index(r, c)] && g.mapped[grid.index(r - 1, c)] &&
                                g.mapped[grid.index(r + 1, c)] && g.mapped[grid.index(r, c - 1)] &&
                                g.mapped[grid.index(r, c + 1)];
    }
  }
  return valid;
}

namespace {

InverseDilatationIntegral integrate_inverse(const ComplexField& g, double p, const std::vector<std::uint8_t>* valid,
                                            double mapped_fraction) {
  const DilatationReport rep = dilatation_report(g, p);
  const GridSpec& grid = g.grid();
  const double cell = grid.spacing() * grid.spacing();
  InverseDilatationIntegral out;
  out.mapped_fraction = mapped_fraction;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (!in_unit_disk(grid.node(idx))) continue;
    const double K = rep.K_I_p[idx];
    if ((valid && !(*valid)[idx]) || !std::isfinite(K)) {
      out.excluded_mass += cell;
      continue;
    }
    out.integral += K * cell;
  }
  return out;
}

}  // namespace

InverseDilatationIntegral inverse_dilatation_integral(const InverseMap& g, double p) {
  if (g.mapped_fraction() < 0.99) {
    throw NumericalError("inverse_dilatation_integral: only " + std::to_string(100.0 * g.mapped_fraction()) +
                         "% of unit-disk nodes are mapped (need 99%)");
  }
  const auto valid = stencil_valid(g);
  return integrate_inverse(g.g, p, &valid, g.mapped_fraction());
}

InverseDilatationIntegral inverse_dilatation_integral(const ComplexField& g, double p) {
  return integrate_inverse(g, p, nullptr, 1.0);
}

EnvelopeCheck envelope_check(const RealField& K, const RealPointFunction& Q, const std::vector<double>& band_radii,
                             double band_cells, double rel_tol, const std::vector<std::uint8_t>* valid) {
  const GridSpec& grid = K.grid();
  const double band = band_cells * grid.spacing();
  EnvelopeCheck out;
  for (std::size_t idx = 0; idx < K.size(); ++idx) {
    const cplx y = grid.node(idx);
    if (!in_unit_disk(y)) continue;
    const double r = std::abs(y);
    const bool in_band = std::any_of(band_radii.begin(), band_radii.end(),
                                     [&](double rho) { return std::abs(r - rho) <= band; });
    if (in_band || (valid && !(*valid)[idx])) {
      ++out.excluded;
      continue;
    }
    ++out.checked;
    const double q = Q(y);
    const double excess = K[idx] / q - 1.0;
    out.worst_excess = std::max(out.worst_excess, excess);
    if (!(K[idx] <= q * (1.0 + rel_tol))) ++out.violations;
  }
  return out;
}

HolderReport log_holder_check(const ComplexField& f, double q_l1, double compact_radius, std::size_t n_pairs,
                              std::uint64_t seed) {
  if (!(compact_radius > 0.0 && compact_radius < 1.0)) {
    throw std::invalid_argument("log_holder_check: compact_radius must lie in (0, 1)");
  }
  if (n_pairs < 1000) throw std::invalid_argument("log_holder_check: need at least 1000 pairs");
  if (!(q_l1 > 0.0) || !std::isfinite(q_l1)) throw std::invalid_argument("log_holder_check: q_l1 must be positive");
  const double h = f.grid().spacing();
  const double d_min = 2.0 * h;
  const double d_max = std::min(0.5, 2.0 * compact_radius);
  if (!(d_min < d_max)) throw std::invalid_argument("log_holder_check: grid too coarse for the compact");

  HolderReport out;
  out.compact_radius = compact_radius;
  out.r0 = 1.0 - compact_radius;
  out.q_l1 = q_l1;
  out.pairs = n_pairs;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double two_pi = 2.0 * std::acos(-1.0);
  const double sqrt_q = std::sqrt(q_l1);
  // Quarter-decade separation bins; the per-bin max is the fitted C at that scale.
  const double span = std::log10(d_max / d_min);
  const auto bins = static_cast<std::size_t>(std::ceil(span / 0.25));
  std::vector<double> bin_max(bins, -1.0);
  for (std::size_t k = 0; k < n_pairs; ++k) {
    const double u = unit(rng);
    const double d = d_min * std::pow(10.0, u * span);
    cplx x;
    cplx y;
    do {
      x = std::polar(compact_radius * std::sqrt(unit(rng)), two_pi * unit(rng));
      y = x + std::polar(d, two_pi * unit(rng));
    } while (std::abs(y) > compact_radius);
    const auto fx = interpolate(f, x);
    const auto fy = interpolate(f, y);
    if (!fx || !fy) throw NumericalError("log_holder_check: sample outside grid");
    const double C = std::abs(*fx - *fy) * std::sqrt(std::log(1.0 + out.r0 / (2.0 * d))) / sqrt_q;
    const std::size_t bin = std::min(bins - 1, static_cast<std::size_t>(u * span / 0.25));
    bin_max[bin] = std::max(bin_max[bin], C);
    if (C > out.fitted_C || k == 0) {
      out.fitted_C = C;
      out.worst_pair = {x, y, C};
    }
  }
  std::vector<double> filled;
  double decade_max = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    if (bin_max[b] < 0.0) continue;
    filled.push_back(bin_max[b]);
    if ((static_cast<double>(b) + 1.0) * 0.25 <= 1.0 + 1e-12) decade_max = std::max(decade_max, bin_max[b]);
  }
  out.scale_max = filled;
  const double med = median(filled);
  out.decade_ratio = med > 0.0 ? decade_max / med : INFINITY;
  out.bounded = std::isfinite(out.fitted_C) && out.decade_ratio < 2.0;
  return out;
}

HolderReport log_holder_check(const MappingSolution& sol, double q_l1, double compact_radius, std::size_t n_pairs,
                              std::uint64_t seed) {
  return log_holder_check(sol.f, q_l1, compact_radius, n_pairs, seed);
}

Manifest HolderReport::to_manifest() const {
  Manifest m;
  m.comment("log-holder report");
  m.set("holder.compact_radius", compact_radius);
  m.set("holder.r0", r0);
  m.set("holder.q_l1", q_l1);
  m.set("holder.pairs", pairs);
  m.set("holder.fitted_C", fitted_C);
  m.set("holder.worst_pair", std::vector<double>{worst_pair.x.real(), worst_pair.x.imag(), worst_pair.y.real(),
                                                 worst_pair.y.imag(), worst_pair.C});
  m.set("holder.scale_max", scale_max);
  m.set("holder.decade_ratio", decade_ratio);
  m.set("holder.bounded", bounded);
  return m;
}

DerivativeL1 derivative_l1_convergence(const LadderRun& run, double radius) {
  if (run.solutions.size() < 2) throw std::invalid_argument("derivative_l1_convergence: need at least two levels");
  DerivativeL1 out;
  std::vector<WirtingerPair> derivs;
  derivs.reserve(run.solutions.size());
  for (const auto& sol : run.solutions) derivs.push_back(wirtinger_derivatives(sol.f));
  const GridSpec& grid = run.solutions.front().f.grid();
  for (std::size_t j = 0; j + 1 < derivs.size(); ++j) {
    RealField dz(grid);
    RealField dzbar(grid);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      dz[idx] = std::abs(derivs[j + 1].fz[idx] - derivs[j].fz[idx]);
      dzbar[idx] = std::abs(derivs[j + 1].fzbar[idx] - derivs[j].fzbar[idx]);
    }
    out.dz.push_back(integrate_disk(dz, radius));
    out.dzbar.push_back(integrate_disk(dzbar, radius));
  }
  return out;
}

}  // namespace beltrami
