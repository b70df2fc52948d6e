#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "beltrami/field.hpp"
#include "beltrami/grid.hpp"
#include "beltrami/manifest.hpp"
#include "beltrami/solver.hpp"

namespace beltrami {

/// Nodewise Jacobian and dilatations from central-difference derivatives.
/// K = 1 where f_z = f_zbar = 0; K = +inf where J <= 0 otherwise.
struct DilatationReport {
  RealField K_mu_f;
  RealField K_I_p;
  RealField jacobian;
  /// Fraction of unit-disk nodes with J <= 0.
  double degenerate_fraction = 0.0;
  double p = 2.0;
};

/// Requires 1 <= p <= 2 (std::invalid_argument otherwise).
DilatationReport dilatation_report(const ComplexField& f, double p);
DilatationReport dilatation_report(const MappingSolution& sol, double p);

struct InverseMap {
  ComplexField g;
  /// 1 where a preimage was found, 0 otherwise (g = w there).
  std::vector<std::uint8_t> mapped;
  /// max |f(g(w)) - w| over mapped nodes, f bilinear.
  double roundtrip_max = 0.0;
  std::size_t disk_nodes = 0;
  std::size_t unmapped_disk_nodes = 0;

  double mapped_fraction() const;
};

/// Geometric inverse: every forward cell is treated as a bilinear patch and
/// each target node in its image box is located by Newton iteration.
/// Throws NumericalError when degenerate_fraction >= 0.5% or when a target
/// node has two distinct preimages (fold).
InverseMap invert_mapping(const ComplexField& f, const GridSpec& target_grid);
InverseMap invert_mapping(const MappingSolution& sol, const GridSpec& target_grid);

struct InverseDilatationIntegral {
  double integral = 0.0;
  /// Area of unit-disk nodes left out (K = inf or stencil touching unmapped nodes).
  double excluded_mass = 0.0;
  double mapped_fraction = 1.0;
};

/// \int_D K_{I,p}(w, g) dm over unit-disk nodes. Throws NumericalError when
/// fewer than 99% of unit-disk nodes are mapped.
InverseDilatationIntegral inverse_dilatation_integral(const InverseMap& g, double p);
InverseDilatationIntegral inverse_dilatation_integral(const ComplexField& g, double p);

struct EnvelopeCheck {
  std::size_t checked = 0;
  std::size_t violations = 0;
  /// Nodes skipped: within the band around a listed radius, or unmapped stencil.
  std::size_t excluded = 0;
  double worst_excess = 0.0;  // max K/Q - 1 over checked nodes
};

/// Counts unit-disk nodes with K(y) > Q(y) (1 + rel_tol), skipping nodes
/// within band_cells * h of any radius in band_radii.
EnvelopeCheck envelope_check(const RealField& K, const RealPointFunction& Q, const std::vector<double>& band_radii,
                             double band_cells, double rel_tol, const std::vector<std::uint8_t>* valid = nullptr);

/// Nodes whose five-point stencil is entirely mapped.
std::vector<std::uint8_t> stencil_valid(const InverseMap& g);

struct HolderPair {
  cplx x;
  cplx y;
  double C = 0.0;
};

struct HolderReport {
  double compact_radius = 0.0;
  double r0 = 0.0;
  double q_l1 = 0.0;
  double fitted_C = 0.0;
  HolderPair worst_pair;
  /// Max C per quarter-decade separation bin, smallest separations first.
  std::vector<double> scale_max;
  /// Largest bin max within the smallest separation decade divided by the
  /// median of all bin maxima; < 2 means no growth trend towards small scales.
  double decade_ratio = 0.0;
  bool bounded = false;
  std::size_t pairs = 0;

  Manifest to_manifest() const;
};

/// Samples n_pairs pairs in |z| <= compact_radius with separations
/// log-uniform in [2h, 0.5] (seeded, deterministic) and fits
/// C = |f(x) - f(y)| log^{1/2}(1 + r0/(2|x-y|)) / ||Q||_1^{1/2}.
/// Requires compact_radius < 1, n_pairs >= 1000, q_l1 > 0.
HolderReport log_holder_check(const ComplexField& f, double q_l1, double compact_radius, std::size_t n_pairs,
                              std::uint64_t seed = 0x5eed);
HolderReport log_holder_check(const MappingSolution& sol, double q_l1, double compact_radius, std::size_t n_pairs,
                              std::uint64_t seed = 0x5eed);

struct DerivativeL1 {
  std::vector<double> dz;
  std::vector<double> dzbar;
};

/// \int_{|z|<=radius} |d f_{j+1} - d f_j| dm for consecutive ladder levels,
/// central-difference derivatives. Requires >= 2 solutions.
DerivativeL1 derivative_l1_convergence(const LadderRun& run, double radius = 0.9);

}  // namespace beltrami
