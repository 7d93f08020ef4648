#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cassi/sensing_operator.hpp"

namespace cassi {

enum class InitStrategy { Shift, Repeat, Roll };

std::string_view to_string(InitStrategy s) noexcept;
/// Accepts "shift", "repeat", "roll"; throws InvalidArgument otherwise.
InitStrategy parse_init_strategy(std::string_view name);

/// Pluggable denoiser producing the null-space candidate. Implementations
/// must preserve dimensions, return finite values, and treat strength 0 as
/// the identity.
class Prior {
 public:
  virtual ~Prior() = default;
  virtual HSICube denoise(const HSICube& cube, double strength) const = 0;
};

class IdentityPrior final : public Prior {
 public:
  HSICube denoise(const HSICube& cube, double strength) const override;
};

/// Per-band anisotropic TV proximal step (see tv_denoise).
class TvPrior final : public Prior {
 public:
  explicit TvPrior(std::size_t inner_iterations = 20) : inner_iterations_(inner_iterations) {}

  HSICube denoise(const HSICube& cube, double strength) const override;

 private:
  std::size_t inner_iterations_;
};

struct SolverConfig {
  std::size_t iterations = 60;
  double tv_weight = 0.1;
  std::size_t tv_inner_iterations = 20;
  InitStrategy init = InitStrategy::Roll;
  bool crop_denoiser_input = true;
  double convergence_tol = 0.0;  // 0 runs every iteration

  void check() const;
};

/// Per-run diagnostics filled by gap_solve when requested.
struct SolveTrace {
  std::size_t iterations = 0;
  /// ||y - Phi x_k||_2 after each completed iteration.
  std::vector<double> residual_norms;
  /// Pixels handed to the denoiser in each iteration (the FLOP proxy).
  std::size_t denoised_pixels_per_iteration = 0;
};

/// Repeat y over bands, then translate band c right by d*c with zero fill.
ShiftedCube init_shift(const Measurement& meas, const SceneConfig& config);
/// Every band is y.
ShiftedCube init_repeat(const Measurement& meas, const SceneConfig& config);
/// Band c is y rotated right by d*c columns, modulo the measurement width.
ShiftedCube init_roll(const Measurement& meas, const SceneConfig& config);
ShiftedCube make_initial(InitStrategy strategy, const Measurement& meas,
                         const SceneConfig& config);

/// Drops the dispersed margin; same mapping as unshift_cube.
HSICube crop_to_scene(const ShiftedCube& shifted);

/// Approximately solves min_z 0.5*||z - cube||^2 + strength * TV(z) per band,
/// with TV(z) = sum |horizontal differences| + sum |vertical differences|.
/// Fast gradient projection on the dual for a fixed number of iterations.
HSICube tv_denoise(const HSICube& cube, double strength, std::size_t inner_iterations);

/// Generalized alternating projection in detector coordinates:
///   x <- denoise(x + Phi^T Sigma^-1 (y - Phi x))
/// starting from the configured init. With cropping on, only the scene
/// support is denoised and the margin keeps its pre-denoise values.
/// Returns the scene-support part of the final iterate.
HSICube gap_solve(const SensingOperator& op, const Measurement& meas, const Prior& prior,
                  const SolverConfig& cfg, SolveTrace* trace = nullptr);

/// Same as gap_solve but starting from an explicit detector-coordinate iterate.
HSICube gap_solve(const SensingOperator& op, const Measurement& meas, const Prior& prior,
                  const SolverConfig& cfg, ShiftedCube initial, SolveTrace* trace = nullptr);

/// Range-null wrapper: q from gap_solve, corrected with rnd_combine so the
/// output reproduces the measurement exactly.
HSICube rnd_reconstruct(const SensingOperator& op, const Measurement& meas, const Prior& prior,
                        const SolverConfig& cfg, SolveTrace* trace = nullptr);

}  // namespace cassi
