#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "cassi/tensor.hpp"

namespace cassi {

/// SplitMix64 stream. The seed -> stream mapping is fixed and
/// platform-independent; golden files and every generator below depend on
/// it, so it must not change.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  /// Independent stream for item `counter` under `seed`, for parallel
  /// generation that does not depend on visiting order.
  static Rng for_counter(std::uint64_t seed, std::uint64_t counter) noexcept;

  std::uint64_t next() noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n); n must be positive.
  std::size_t index(std::size_t n) noexcept;

 private:
  std::uint64_t state_;
};

/// SplitMix64 output function, usable as a 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Poisson(mean) draw. Inversion by multiplication below mean 10, Hormann's
/// PTRS transformed rejection above.
std::uint64_t sample_poisson(double mean, Rng& rng);

struct NoiseSpec {
  unsigned shot_bits = 11;
  std::uint64_t seed = 0;
  /// Signal level mapped to 2^bits - 1. Defaults to the measurement max.
  std::optional<double> full_scale;

  void check() const;
};

/// i.i.d. Bernoulli(density) binary mask.
CodedAperture gen_mask(std::size_t height, std::size_t width, double density, std::uint64_t seed);

/// Uniformly placed size x size window of `mask`.
CodedAperture crop_mask(const CodedAperture& mask, std::size_t size, std::uint64_t seed);

/// Opens the fewest mask pixels needed so every detector pixel receives
/// energy from some band. Columns near the detector edges are reached by
/// only a few bands, so random masks are almost never full rank without
/// this. Unchanged when the mask is already full rank.
CodedAperture ensure_full_rank(const CodedAperture& mask, const SceneConfig& config);

/// Piecewise-smooth scene in [0, 1]: a flat background plus `complexity`
/// rectangles, each with a quadratic spectral profile and a mild spatial ramp.
HSICube gen_scene(const SceneConfig& config, std::size_t complexity, std::uint64_t seed);

/// Photon-counting noise: scale so the full-scale level maps to
/// 2^bits - 1 counts, draw Poisson per pixel, scale back.
Measurement add_shot_noise(const Measurement& meas, const NoiseSpec& spec);

}  // namespace cassi
