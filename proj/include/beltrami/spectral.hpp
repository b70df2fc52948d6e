#pragma once

#include <memory>
#include <span>

#include "beltrami/field.hpp"

namespace beltrami {

namespace detail {
class FftPlan2d;
}

/// Periodic (torus) Beurling and Cauchy transforms on a GridSpec.
///
/// The Beurling multiplier is conj(xi)/xi with 0 at xi = 0, so T is an exact
/// isometry on mean-zero grid functions. The Cauchy transform inverts d/dzbar
/// on the mean-free part and carries the mean as the affine term mean*conj(z),
/// which gives d/dzbar C = id and d/dz C = T for any compactly supported input.
///
/// Mutable scratch: one transform at a time per workspace.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(GridSpec grid);
  ~SpectralWorkspace();
  SpectralWorkspace(SpectralWorkspace&&) noexcept;
  SpectralWorkspace& operator=(SpectralWorkspace&&) noexcept;

  const GridSpec& grid() const { return grid_; }

  /// Angular frequency xi = kx + i ky at FFT index (row, col), standard ordering.
  cplx frequency(std::size_t row, std::size_t col) const;
  std::size_t dc_index() const { return 0; }

  ComplexField beurling(const ComplexField& omega);
  ComplexField cauchy(const ComplexField& omega);

 private:
  void check_support(const ComplexField& omega) const;

  GridSpec grid_;
  std::unique_ptr<detail::FftPlan2d> fft_;
};

ComplexField beurling_transform(const ComplexField& omega, SpectralWorkspace& ws);
ComplexField cauchy_transform(const ComplexField& omega, SpectralWorkspace& ws);

/// Whole-plane Cauchy and Beurling operators for densities that are constant
/// on grid cells.
///
/// The kernels are the exact cell integrals
///   C: (1/pi)  \int_cell 1/u   dA(u)
///   T: -(1/pi) p.v.\int_cell 1/u^2 dA(u)
/// evaluated in closed form through the boundary of each cell, and applied by
/// zero-padded FFT convolution on a (2n)^2 lattice, so there is no
/// periodization error. This is what the solver iterates with.
class PlanarOperators {
 public:
  explicit PlanarOperators(GridSpec grid);
  ~PlanarOperators();
  PlanarOperators(PlanarOperators&&) noexcept;
  PlanarOperators& operator=(PlanarOperators&&) noexcept;

  const GridSpec& grid() const { return grid_; }

  ComplexField cauchy(const ComplexField& omega);
  ComplexField beurling(const ComplexField& omega);

  /// out = T(in); both spans have grid.size() entries.
  void beurling_into(std::span<const cplx> in, std::span<cplx> out);
  void cauchy_into(std::span<const cplx> in, std::span<cplx> out);

 private:
  void convolve(std::span<const cplx> in, const std::vector<cplx>& kernel_hat, std::span<cplx> out);

  GridSpec grid_;
  std::unique_ptr<detail::FftPlan2d> fft_;
  std::vector<cplx> cauchy_hat_;
  std::vector<cplx> beurling_hat_;
};

}  // namespace beltrami
