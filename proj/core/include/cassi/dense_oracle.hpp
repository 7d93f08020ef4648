#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cassi/sensing_operator.hpp"

namespace cassi::oracle {

/// Hard cap on materialized entries (~32 MB of doubles). Not configurable:
/// the dense path exists to check the matrix-free one on toy instances.
inline constexpr std::size_t kMaxDenseEntries = 4'194'304;

/// Row-major dense matrix, capped at kMaxDenseEntries.
class DenseMatrix {
 public:
  DenseMatrix(std::size_t rows, std::size_t cols);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<const double> values() const noexcept { return data_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// Explicit n x (n*C) sensing matrix, n = H*W'. Block c is
/// diag(vec(M(:, :, c))) in flatten_index ordering.
DenseMatrix build_dense(const SensingOperator& op);

/// Moore-Penrose pseudo-inverse via SVD; singular values below
/// 1e-12 * sigma_max are treated as zero.
DenseMatrix dense_pinv(const DenseMatrix& m);

std::vector<double> dense_apply(const DenseMatrix& m, std::span<const double> v);

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& m);

/// Frobenius norm of a - b divided by the Frobenius norm of b.
double relative_difference(const DenseMatrix& a, const DenseMatrix& b);

// Conversions between the library's array types and the column-stacked
// vectors the dense matrix acts on. Scene cubes are embedded in detector
// coordinates first (zero off-support).
std::vector<double> vectorize(const ShiftedCube& cube);
std::vector<double> vectorize(const HSICube& cube);
std::vector<double> vectorize(const Measurement& meas);
ShiftedCube shifted_from_vector(const SceneConfig& config, std::span<const double> v);
HSICube cube_from_vector(const SceneConfig& config, std::span<const double> v);
Measurement measurement_from_vector(const SceneConfig& config, std::span<const double> v);

}  // namespace cassi::oracle
