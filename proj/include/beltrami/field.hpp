#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace beltrami {

using cplx = std::complex<double>;

/// Raised when a computation produces or meets values it cannot work with
/// (non-finite samples, broken contraction, folded maps).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform square grid over [-L, L]^2 with n_side nodes per axis.
///
/// Node (row, col) sits at z = (-L + col*h) + i(-L + row*h) with h = 2L/n_side,
/// so the origin is always a node and the closed unit disk is interior.
class GridSpec {
 public:
  GridSpec() = default;

  /// Throws std::invalid_argument unless n_side is a power of two >= 2 and
  /// half_width > 1.
  GridSpec(std::size_t n_side, double half_width);

  std::size_t n_side() const { return n_side_; }
  double half_width() const { return half_width_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return n_side_ * n_side_; }

  double coord(std::size_t k) const { return -half_width_ + static_cast<double>(k) * spacing_; }
  cplx node(std::size_t row, std::size_t col) const { return {coord(col), coord(row)}; }
  cplx node(std::size_t index) const { return node(index / n_side_, index % n_side_); }
  std::size_t index(std::size_t row, std::size_t col) const { return row * n_side_ + col; }

  /// Row/column of the node at the origin.
  std::size_t origin_index() const { return n_side_ / 2; }

  bool operator==(const GridSpec& other) const = default;

 private:
  std::size_t n_side_ = 0;
  double half_width_ = 0.0;
  double spacing_ = 0.0;
};

/// Samples of a quantity on a GridSpec, row-major.
template <typename T>
class Field {
 public:
  Field() = default;
  explicit Field(GridSpec grid, T fill = T{}) : grid_(grid), data_(grid.size(), fill) {}
  Field(GridSpec grid, std::vector<T> samples) : grid_(grid), data_(std::move(samples)) {
    if (data_.size() != grid_.size()) {
      throw std::invalid_argument("field sample count " + std::to_string(data_.size()) +
                                  " does not match grid size " + std::to_string(grid_.size()));
    }
  }

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return data_.size(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  T& operator()(std::size_t row, std::size_t col) { return data_[grid_.index(row, col)]; }
  const T& operator()(std::size_t row, std::size_t col) const { return data_[grid_.index(row, col)]; }

  std::span<T> samples() { return data_; }
  std::span<const T> samples() const { return data_; }
  const std::vector<T>& values() const { return data_; }

  bool operator==(const Field& other) const = default;

 private:
  GridSpec grid_;
  std::vector<T> data_;
};

using ComplexField = Field<cplx>;

/// Real-valued field. Dilatation fields may hold +inf at degenerate nodes.
using RealField = Field<double>;

/// z = r e^{i theta} with theta normalized to [0, 2pi).
struct PolarPoint {
  double r = 0.0;
  double theta = 0.0;

  static PolarPoint from(cplx z);
  cplx to_cartesian() const { return std::polar(r, theta); }
};

bool all_finite(const ComplexField& f);

inline bool in_unit_disk(cplx z) { return std::norm(z) < 1.0; }

}  // namespace beltrami
