#include "beltrami/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

namespace beltrami {

namespace detail {

namespace {
// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

/// In-place square complex FFT on an fftw-aligned buffer. Plans use
/// FFTW_ESTIMATE so the chosen algorithm, and therefore every rounding, is
/// the same on every run.
class FftPlan2d {
 public:
  explicit FftPlan2d(std::size_t side) : side_(side) {
    buffer_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * side * side));
    if (buffer_ == nullptr) throw std::bad_alloc();
    std::lock_guard lock(planner_mutex());
    const int n = static_cast<int>(side);
    forward_ = fftw_plan_dft_2d(n, n, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_2d(n, n, buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~FftPlan2d() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(buffer_);
  }
  FftPlan2d(const FftPlan2d&) = delete;
  FftPlan2d& operator=(const FftPlan2d&) = delete;

  std::size_t side() const { return side_; }
  std::span<cplx> data() { return {reinterpret_cast<cplx*>(buffer_), side_ * side_}; }
  void forward() { fftw_execute(forward_); }
  void backward() { fftw_execute(backward_); }

 private:
  std::size_t side_;
  fftw_complex* buffer_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace detail

namespace {

double signed_index(std::size_t k, std::size_t n) {
  return k < n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
}

}  // namespace

// ---------------------------------------------------------------- periodic

SpectralWorkspace::SpectralWorkspace(GridSpec grid)
    : grid_(grid), fft_(std::make_unique<detail::FftPlan2d>(grid.n_side())) {}
SpectralWorkspace::~SpectralWorkspace() = default;
SpectralWorkspace::SpectralWorkspace(SpectralWorkspace&&) noexcept = default;
SpectralWorkspace& SpectralWorkspace::operator=(SpectralWorkspace&&) noexcept = default;

cplx SpectralWorkspace::frequency(std::size_t row, std::size_t col) const {
  const std::size_t n = grid_.n_side();
  const double scale = 2.0 * std::numbers::pi / (static_cast<double>(n) * grid_.spacing());
  return {scale * signed_index(col, n), scale * signed_index(row, n)};
}

void SpectralWorkspace::check_support(const ComplexField& omega) const {
  if (!(omega.grid() == grid_)) throw std::invalid_argument("field grid does not match the workspace grid");
  const std::size_t n = grid_.n_side();
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t col = 0; col < n; ++col) {
      const bool frame = row < 2 || col < 2 || row >= n - 2 || col >= n - 2;
      if (frame && omega(row, col) != cplx{}) {
        throw std::invalid_argument("density support touches the grid boundary (periodization aliasing)");
      }
    }
  }
}

ComplexField SpectralWorkspace::beurling(const ComplexField& omega) {
  check_support(omega);
  const std::size_t n = grid_.n_side();
  auto buf = fft_->data();
  std::copy(omega.samples().begin(), omega.samples().end(), buf.begin());
  fft_->forward();
  const double norm = 1.0 / static_cast<double>(n * n);
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t col = 0; col < n; ++col) {
      const cplx xi = frequency(row, col);
      cplx& v = buf[row * n + col];
      v = (row == 0 && col == 0) ? cplx{} : v * (std::conj(xi) / xi) * norm;
    }
  }
  fft_->backward();
  return ComplexField(grid_, std::vector<cplx>(buf.begin(), buf.end()));
}

ComplexField SpectralWorkspace::cauchy(const ComplexField& omega) {
  check_support(omega);
  const std::size_t n = grid_.n_side();
  auto buf = fft_->data();
  std::copy(omega.samples().begin(), omega.samples().end(), buf.begin());
  fft_->forward();
  const double norm = 1.0 / static_cast<double>(n * n);
  const cplx mean = buf[0] * norm;
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t col = 0; col < n; ++col) {
      const cplx xi = frequency(row, col);
      cplx& v = buf[row * n + col];
      v = (row == 0 && col == 0) ? cplx{} : v * (cplx(0.0, -2.0) / xi) * norm;
    }
  }
  fft_->backward();
  ComplexField out(grid_);
  for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] = buf[idx] + mean * std::conj(grid_.node(idx));
  return out;
}

ComplexField beurling_transform(const ComplexField& omega, SpectralWorkspace& ws) { return ws.beurling(omega); }
ComplexField cauchy_transform(const ComplexField& omega, SpectralWorkspace& ws) { return ws.cauchy(omega); }

// ---------------------------------------------------------------- whole plane

namespace {

struct CellKernels {
  cplx cauchy;
  cplx beurling;
};

// Cell integrals over the square of side h centred at d, via
//   \int_R dF/dubar dA = (1/2i) \oint_{dR} F du
// with F = conj(u)/u for 1/u and F = conj(u)/u^2 for 1/u^2. On a horizontal
// edge conj(u) = u - 2i y0, on a vertical edge conj(u) = 2 x0 - u, so each
// edge integral is elementary. log(b/a) is the increment of log u along the
// segment because no cell edge passes through the origin.
CellKernels cell_kernels(cplx d, double h) {
  const double s = 0.5 * h;
  const cplx corners[4] = {d + cplx(-s, -s), d + cplx(s, -s), d + cplx(s, s), d + cplx(-s, s)};
  cplx fc{};
  cplx ft{};
  const cplx two_i(0.0, 2.0);
  for (int e = 0; e < 4; ++e) {
    const cplx a = corners[e];
    const cplx b = corners[(e + 1) % 4];
    const cplx log_ratio = std::log(b / a);
    const cplx inv_diff = 1.0 / b - 1.0 / a;
    if (e % 2 == 0) {
      const double y0 = a.imag();
      fc += (b - a) - two_i * y0 * log_ratio;
      ft += log_ratio + two_i * y0 * inv_diff;
    } else {
      const double x0 = a.real();
      fc += 2.0 * x0 * log_ratio - (b - a);
      ft += -2.0 * x0 * inv_diff - log_ratio;
    }
  }
  const double inv_pi = 1.0 / std::numbers::pi;
  return {fc / two_i * inv_pi, -ft / two_i * inv_pi};
}

}  // namespace

PlanarOperators::PlanarOperators(GridSpec grid)
    : grid_(grid), fft_(std::make_unique<detail::FftPlan2d>(2 * grid.n_side())) {
  const std::size_t m = 2 * grid.n_side();
  const double h = grid.spacing();
  std::vector<cplx> cauchy(m * m);
  std::vector<cplx> beurling(m * m);
  for (std::size_t row = 0; row < m; ++row) {
    for (std::size_t col = 0; col < m; ++col) {
      const cplx d(signed_index(col, m) * h, signed_index(row, m) * h);
      const CellKernels k = cell_kernels(d, h);
      cauchy[row * m + col] = k.cauchy;
      beurling[row * m + col] = k.beurling;
    }
  }
  const double norm = 1.0 / static_cast<double>(m * m);
  auto transform = [&](std::vector<cplx>& kernel) {
    auto buf = fft_->data();
    std::copy(kernel.begin(), kernel.end(), buf.begin());
    fft_->forward();
    for (std::size_t i = 0; i < kernel.size(); ++i) kernel[i] = buf[i] * norm;
  };
  transform(cauchy);
  transform(beurling);
  cauchy_hat_ = std::move(cauchy);
  beurling_hat_ = std::move(beurling);
}

PlanarOperators::~PlanarOperators() = default;
PlanarOperators::PlanarOperators(PlanarOperators&&) noexcept = default;
PlanarOperators& PlanarOperators::operator=(PlanarOperators&&) noexcept = default;

void PlanarOperators::convolve(std::span<const cplx> in, const std::vector<cplx>& kernel_hat, std::span<cplx> out) {
  const std::size_t n = grid_.n_side();
  const std::size_t m = 2 * n;
  if (in.size() != n * n || out.size() != n * n) throw std::invalid_argument("span size does not match the grid");
  auto buf = fft_->data();
  std::fill(buf.begin(), buf.end(), cplx{});
  for (std::size_t row = 0; row < n; ++row) {
    std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(row * n), n, buf.begin() + static_cast<std::ptrdiff_t>(row * m));
  }
  fft_->forward();
  for (std::size_t i = 0; i < m * m; ++i) buf[i] *= kernel_hat[i];
  fft_->backward();
  for (std::size_t row = 0; row < n; ++row) {
    std::copy_n(buf.begin() + static_cast<std::ptrdiff_t>(row * m), n, out.begin() + static_cast<std::ptrdiff_t>(row * n));
  }
}

void PlanarOperators::beurling_into(std::span<const cplx> in, std::span<cplx> out) { convolve(in, beurling_hat_, out); }
void PlanarOperators::cauchy_into(std::span<const cplx> in, std::span<cplx> out) { convolve(in, cauchy_hat_, out); }

ComplexField PlanarOperators::cauchy(const ComplexField& omega) {
  if (!(omega.grid() == grid_)) throw std::invalid_argument("field grid does not match the operator grid");
  ComplexField out(grid_);
  cauchy_into(omega.samples(), out.samples());
  return out;
}

ComplexField PlanarOperators::beurling(const ComplexField& omega) {
  if (!(omega.grid() == grid_)) throw std::invalid_argument("field grid does not match the operator grid");
  ComplexField out(grid_);
  beurling_into(omega.samples(), out.samples());
  return out;
}

}  // namespace beltrami
