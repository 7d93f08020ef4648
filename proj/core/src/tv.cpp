#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "cassi/parallel.hpp"
#include "cassi/recon.hpp"

namespace cassi {
namespace {

// Dual variables live on full rows x cols planes; the last column of px and
// the last row of py are never written and stay zero.
struct DualField {
  std::vector<double> px;
  std::vector<double> py;
};

// out = f - lambda * D^T p
void primal_from_dual(std::span<const double> f, const DualField& p, double lambda,
                      std::size_t rows, std::size_t cols, std::span<double> out) {
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t k = i * cols + j;
      double dt = 0.0;
      if (j > 0) dt += p.px[k - 1];
      if (j + 1 < cols) dt -= p.px[k];
      if (i > 0) dt += p.py[k - cols];
      if (i + 1 < rows) dt -= p.py[k];
      out[k] = f[k] - lambda * dt;
    }
  }
}

void denoise_plane(std::span<const double> f, std::span<double> out, std::size_t rows,
                   std::size_t cols, double lambda, std::size_t iterations) {
  const std::size_t n = rows * cols;
  DualField p{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  DualField r = p;
  std::vector<double> z(n);
  // 1/L with L = lambda^2 * ||D D^T||, ||D D^T|| <= 8 in 2D.
  const double step = 1.0 / (8.0 * lambda);
  double t = 1.0;

  for (std::size_t it = 0; it < iterations; ++it) {
    primal_from_dual(f, r, lambda, rows, cols, z);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double momentum = (t - 1.0) / t_next;
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        const std::size_t k = i * cols + j;
        if (j + 1 < cols) {
          const double next = std::clamp(r.px[k] + step * (z[k + 1] - z[k]), -1.0, 1.0);
          r.px[k] = next + momentum * (next - p.px[k]);
          p.px[k] = next;
        }
        if (i + 1 < rows) {
          const double next = std::clamp(r.py[k] + step * (z[k + cols] - z[k]), -1.0, 1.0);
          r.py[k] = next + momentum * (next - p.py[k]);
          p.py[k] = next;
        }
      }
    }
    t = t_next;
  }
  primal_from_dual(f, p, lambda, rows, cols, out);
}

}  // namespace

HSICube tv_denoise(const HSICube& cube, double strength, std::size_t inner_iterations) {
  if (!(strength >= 0.0) || !std::isfinite(strength)) {
    fail(ErrorKind::InvalidArgument, "TV strength must be a non-negative finite number");
  }
  if (inner_iterations == 0) fail(ErrorKind::InvalidArgument, "TV needs at least one iteration");
  if (cube.size() != cube.rows() * cube.cols() * cube.bands() ||
      cube.rows() != cube.config().height || cube.cols() != cube.config().width ||
      cube.bands() != cube.config().bands) {
    fail(ErrorKind::DimensionMismatch, "cube shape does not match its config");
  }
  HSICube out = cube;
  if (strength == 0.0) return out;

  parallel_for(cube.bands(), [&](std::size_t b) {
    denoise_plane(cube.band(b), out.band(b), cube.rows(), cube.cols(), strength,
                  inner_iterations);
  });
  return out;
}

HSICube IdentityPrior::denoise(const HSICube& cube, double /*strength*/) const { return cube; }

HSICube TvPrior::denoise(const HSICube& cube, double strength) const {
  return tv_denoise(cube, strength, inner_iterations_);
}

}  // namespace cassi
