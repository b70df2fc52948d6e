#include "beltrami/grid.hpp"

#include <cmath>
#include <numbers>

#include "beltrami/parallel.hpp"

namespace beltrami {

GridSpec::GridSpec(std::size_t n_side, double half_width)
    : n_side_(n_side), half_width_(half_width), spacing_(2.0 * half_width / static_cast<double>(n_side)) {
  if (n_side < 2 || (n_side & (n_side - 1)) != 0) {
    throw std::invalid_argument("n_side must be a power of two >= 2, got " + std::to_string(n_side));
  }
  if (!(half_width > 1.0) || !std::isfinite(half_width)) {
    throw std::invalid_argument("half_width must be a finite number > 1");
  }
}

PolarPoint PolarPoint::from(cplx z) {
  double theta = std::arg(z);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  if (theta >= 2.0 * std::numbers::pi) theta = 0.0;
  return {std::abs(z), theta};
}

bool all_finite(const ComplexField& f) {
  for (const cplx& v : f.samples()) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

namespace {

bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

}  // namespace

ComplexField sample_function(const PointFunction& fn, const GridSpec& grid, SampleReport* report) {
  ComplexField out(grid);
  const std::size_t n = grid.n_side();
  std::vector<std::size_t> clamped(n, 0);
  for_each_row(n, [&](std::size_t row) {
    for (std::size_t col = 0; col < n; ++col) {
      const cplx z = grid.node(row, col);
      cplx v = fn(z);
      if (!finite(v)) {
        if (in_unit_disk(z)) {
          throw NumericalError("function is not finite at node z = (" + std::to_string(z.real()) + ", " +
                               std::to_string(z.imag()) + ") inside the unit disk");
        }
        v = 0.0;
        ++clamped[row];
      }
      out(row, col) = v;
    }
  });
  if (report != nullptr) {
    report->clamped_outside = 0;
    for (std::size_t c : clamped) report->clamped_outside += c;
  }
  return out;
}

RealField sample_real(const RealPointFunction& fn, const GridSpec& grid) {
  RealField out(grid);
  const std::size_t n = grid.n_side();
  for_each_row(n, [&](std::size_t row) {
    for (std::size_t col = 0; col < n; ++col) out(row, col) = fn(grid.node(row, col));
  });
  return out;
}

WirtingerPair wirtinger_derivatives(const ComplexField& f) {
  const GridSpec& grid = f.grid();
  const std::size_t n = grid.n_side();
  if (n < 4) throw std::invalid_argument("wirtinger_derivatives needs n_side >= 4");
  const double inv2h = 1.0 / (2.0 * grid.spacing());

  auto diff = [&](auto at, std::size_t k) -> cplx {
    if (k == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2h;
    if (k == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) * inv2h;
    return (at(k + 1) - at(k - 1)) * inv2h;
  };

  WirtingerPair out{ComplexField(grid), ComplexField(grid)};
  const cplx i(0.0, 1.0);
  for_each_row(n, [&](std::size_t row) {
    for (std::size_t col = 0; col < n; ++col) {
      const cplx fx = diff([&](std::size_t c) { return f(row, c); }, col);
      const cplx fy = diff([&](std::size_t r) { return f(r, col); }, row);
      out.fz(row, col) = 0.5 * (fx - i * fy);
      out.fzbar(row, col) = 0.5 * (fx + i * fy);
    }
  });
  return out;
}

namespace {

template <typename T>
T disk_sum(const Field<T>& field, double radius) {
  const GridSpec& grid = field.grid();
  if (radius > grid.half_width()) {
    throw std::invalid_argument("integration radius exceeds the grid half width");
  }
  const double r2 = radius * radius;
  T sum{};
  for (std::size_t idx = 0; idx < field.size(); ++idx) {
    if (std::norm(grid.node(idx)) < r2) sum += field[idx];
  }
  const double h = grid.spacing();
  return sum * (h * h);
}

}  // namespace

cplx integrate_disk(const ComplexField& field, double radius) { return disk_sum(field, radius); }
double integrate_disk(const RealField& field, double radius) { return disk_sum(field, radius); }

double circle_mean(const RealPointFunction& q, cplx z0, double r, std::size_t n_samples) {
  if (!(r > 0.0)) throw std::invalid_argument("circle_mean needs r > 0");
  if (n_samples < 16) throw std::invalid_argument("circle_mean needs at least 16 samples");
  double sum = 0.0;
  std::size_t bad = 0;
  for (std::size_t j = 0; j < n_samples; ++j) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_samples);
    const double v = q(z0 + std::polar(r, theta));
    if (!std::isfinite(v)) {
      ++bad;
      continue;
    }
    sum += v;
  }
  if (static_cast<double>(bad) > 0.01 * static_cast<double>(n_samples)) {
    throw NumericalError("circle_mean: " + std::to_string(bad) + " of " + std::to_string(n_samples) +
                         " samples are not finite");
  }
  return sum / static_cast<double>(n_samples - bad);
}

std::optional<cplx> interpolate(const ComplexField& f, cplx z) {
  const GridSpec& grid = f.grid();
  const double h = grid.spacing();
  const double x = (z.real() + grid.half_width()) / h;
  const double y = (z.imag() + grid.half_width()) / h;
  const double last = static_cast<double>(grid.n_side() - 1);
  if (!(x >= 0.0 && y >= 0.0 && x <= last && y <= last)) return std::nullopt;
  auto col = static_cast<std::size_t>(std::floor(x));
  auto row = static_cast<std::size_t>(std::floor(y));
  if (col == grid.n_side() - 1) --col;
  if (row == grid.n_side() - 1) --row;
  const double tx = x - static_cast<double>(col);
  const double ty = y - static_cast<double>(row);
  return (1.0 - tx) * (1.0 - ty) * f(row, col) + tx * (1.0 - ty) * f(row, col + 1) +
         (1.0 - tx) * ty * f(row + 1, col) + tx * ty * f(row + 1, col + 1);
}

double sup_difference(const ComplexField& a, const ComplexField& b, double radius) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("sup_difference: grids differ");
  const double r2 = radius * radius;
  double worst = 0.0;
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    if (std::norm(a.grid().node(idx)) <= r2) worst = std::max(worst, std::abs(a[idx] - b[idx]));
  }
  return worst;
}

ComplexField combine(cplx a, const ComplexField& f, cplx b, const ComplexField& g) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("combine: grids differ");
  ComplexField out(f.grid());
  for (std::size_t idx = 0; idx < f.size(); ++idx) out[idx] = a * f[idx] + b * g[idx];
  return out;
}

}  // namespace beltrami
