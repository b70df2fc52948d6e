#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "beltrami/field.hpp"

namespace beltrami {

using PointFunction = std::function<cplx(cplx)>;
using RealPointFunction = std::function<double(cplx)>;

struct SampleReport {
  /// Nodes outside the unit disk whose value was non-finite and replaced by 0.
  std::size_t clamped_outside = 0;
};

/// Evaluates fn at every node. A non-finite value inside the unit disk is a
/// NumericalError; outside it is replaced by 0 and counted in `report`.
ComplexField sample_function(const PointFunction& fn, const GridSpec& grid,
                             SampleReport* report = nullptr);

RealField sample_real(const RealPointFunction& fn, const GridSpec& grid);

struct WirtingerPair {
  ComplexField fz;
  ComplexField fzbar;
};

/// Central differences in the interior, one-sided second-order stencils on the
/// boundary frame. Requires n_side >= 4.
WirtingerPair wirtinger_derivatives(const ComplexField& f);

/// Midpoint sum of samples * h^2 over nodes with |z| < radius, row-major order.
cplx integrate_disk(const ComplexField& field, double radius);
double integrate_disk(const RealField& field, double radius);

/// Trapezoid mean of Q over n_samples equispaced points of the circle |z - z0| = r.
/// Isolated non-finite samples are dropped; more than 1% of them is an error.
double circle_mean(const RealPointFunction& q, cplx z0, double r, std::size_t n_samples = 256);

/// Bilinear interpolation; nullopt when z falls outside the node lattice.
std::optional<cplx> interpolate(const ComplexField& f, cplx z);

/// max |a - b| over nodes with |z| <= radius.
double sup_difference(const ComplexField& a, const ComplexField& b, double radius);

/// Linear combination a*f + b*g on the same grid.
ComplexField combine(cplx a, const ComplexField& f, cplx b, const ComplexField& g);

}  // namespace beltrami
