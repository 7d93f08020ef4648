#pragma once

#include <cstddef>

#include "cassi/tensor.hpp"

namespace cassi {

/// Matrix-free CASSI sensing operator.
///
/// The dense sensing matrix is n x (n*C) with n = H*W'; every band block is
/// diagonal, so Phi*Phi^T is diagonal with entries sigma(u, v) =
/// sum_c M(u, v, c)^2. Everything the reconstruction needs (forward model,
/// transpose, pseudo-inverse, range/null projectors) therefore reduces to
/// element-wise passes over the shifted mask and sigma.
///
/// Immutable after construction and safe to share between threads.
class SensingOperator {
 public:
  const SceneConfig& config() const noexcept { return config_; }
  const ShiftedCube& shifted_mask() const noexcept { return mask_; }
  /// Diagonal of Phi*Phi^T, laid out as a detector image.
  const Measurement& sigma() const noexcept { return sigma_; }
  const Measurement& sigma_inverse() const noexcept { return sigma_inv_; }

  /// Heap bytes held by the operator's arrays.
  std::size_t memory_bytes() const noexcept;

  /// Copy whose stored inverse diagonal at (row, col) is multiplied by
  /// `factor`. Fault-injection hook for oracle checks; never used by solvers.
  SensingOperator with_perturbed_sigma(std::size_t row, std::size_t col, double factor) const;

 private:
  friend SensingOperator build_operator(const CodedAperture&, const SceneConfig&);

  SceneConfig config_;
  ShiftedCube mask_;
  Measurement sigma_;
  Measurement sigma_inv_;
};

/// Band c of the result is the mask translated right by d*c; zero elsewhere.
ShiftedCube shift_mask(const CodedAperture& mask, const SceneConfig& config);

/// Band c of the result is band c of `cube` translated right by d*c.
ShiftedCube shift_cube(const HSICube& cube);

/// Left inverse of shift_cube: reads each band back from its support.
HSICube unshift_cube(const ShiftedCube& shifted);

/// Throws MaskDegenerateError if any detector pixel has sigma == 0.
SensingOperator build_operator(const CodedAperture& mask, const SceneConfig& config);

/// y = Phi x.
Measurement phi_apply(const SensingOperator& op, const HSICube& cube);

/// Phi^T y, returned in scene coordinates (Phi^T y vanishes off-support).
HSICube phi_t_apply(const SensingOperator& op, const Measurement& meas);

/// Phi^+ y = Phi^T (Sigma^-1 y); the minimum-norm solution of Phi x = y.
HSICube pinv_apply(const SensingOperator& op, const Measurement& meas);

/// Phi^+ Phi x.
HSICube range_project(const SensingOperator& op, const HSICube& cube);

/// (I - Phi^+ Phi) x.
HSICube null_project(const SensingOperator& op, const HSICube& cube);

/// Phi^+ y + (I - Phi^+ Phi) q. Data-consistent for every q.
HSICube rnd_combine(const SensingOperator& op, const Measurement& meas, const HSICube& q);

}  // namespace cassi
