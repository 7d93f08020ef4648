#include "cassi/scene_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cassi {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng Rng::for_counter(std::uint64_t seed, std::uint64_t counter) noexcept {
  return Rng(mix64(seed ^ mix64(counter + 0x632BE59BD9B4E019ULL)));
}

std::uint64_t Rng::next() noexcept {
  state_ += 0x9E3779B97F4A7C15ULL;
  return mix64(state_);
}

double Rng::uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t Rng::index(std::size_t n) noexcept {
  // Rejection keeps the modulo unbiased.
  const std::uint64_t bound = n;
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = next();
    if (x >= threshold) return static_cast<std::size_t>(x % bound);
  }
}

std::uint64_t sample_poisson(double mean, Rng& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    fail(ErrorKind::InvalidArgument, "Poisson mean must be finite and non-negative");
  }
  if (mean == 0.0) return 0;

  if (mean < 10.0) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = rng.uniform();
    while (prod > limit) {
      ++k;
      prod *= rng.uniform();
    }
    return k;
  }

  // PTRS, W. Hormann, "The transformed rejection method for generating
  // Poisson random variables" (1993).
  const double smu = std::sqrt(mean);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b);
    const double rhs = -mean + k * log_mean - std::lgamma(k + 1.0);
    if (lhs <= rhs) return static_cast<std::uint64_t>(k);
  }
}

void NoiseSpec::check() const {
  if (shot_bits < 1 || shot_bits > 16) {
    fail(ErrorKind::InvalidArgument,
         "shot_bits must be in [1, 16], got " + std::to_string(shot_bits));
  }
  if (full_scale && !(*full_scale > 0.0 && std::isfinite(*full_scale))) {
    fail(ErrorKind::InvalidArgument, "full_scale must be positive and finite");
  }
}

CodedAperture gen_mask(std::size_t height, std::size_t width, double density,
                       std::uint64_t seed) {
  if (height == 0 || width == 0) fail(ErrorKind::InvalidArgument, "mask needs positive size");
  if (!(density > 0.0 && density <= 1.0)) {
    fail(ErrorKind::InvalidArgument, "mask density must be in (0, 1]");
  }
  CodedAperture mask(height, width);
  Rng rng(seed);
  for (double& m : mask.values()) m = rng.uniform() < density ? 1.0 : 0.0;
  return mask;
}

CodedAperture crop_mask(const CodedAperture& mask, std::size_t size, std::uint64_t seed) {
  if (size == 0) fail(ErrorKind::InvalidArgument, "crop size must be positive");
  if (size > mask.height() || size > mask.width()) {
    fail(ErrorKind::CropTooLarge, "crop of " + std::to_string(size) + " from a " +
                                      std::to_string(mask.height()) + "x" +
                                      std::to_string(mask.width()) + " mask");
  }
  Rng rng(seed);
  const std::size_t top = rng.index(mask.height() - size + 1);
  const std::size_t left = rng.index(mask.width() - size + 1);
  CodedAperture out(size, size);
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) out(r, c) = mask(top + r, left + c);
  }
  return out;
}

CodedAperture ensure_full_rank(const CodedAperture& mask, const SceneConfig& config) {
  validate(config, mask);
  CodedAperture out = mask;
  const std::size_t d = config.shift_step;
  const std::size_t w = config.width;
  for (std::size_t u = 0; u < config.height; ++u) {
    for (std::size_t v = 0; v < config.measurement_width(); ++v) {
      // Bands reaching detector column v: v - d*c in [0, W).
      const std::size_t c_lo = v + 1 > w ? (v + 1 - w + d - 1) / d : 0;
      const std::size_t c_hi = std::min(v / d, config.bands - 1);
      // W < d leaves columns no band can reach; build_operator reports those.
      if (c_lo > c_hi) continue;
      bool lit = false;
      for (std::size_t c = c_lo; c <= c_hi && !lit; ++c) lit = out(u, v - d * c) > 0.0;
      if (!lit) out(u, v - d * c_lo) = 1.0;
    }
  }
  return out;
}

HSICube gen_scene(const SceneConfig& config, std::size_t complexity, std::uint64_t seed) {
  config.check();
  Rng rng(seed);
  HSICube cube(config);
  const double background = rng.uniform(0.1, 0.4);
  std::fill(cube.values().begin(), cube.values().end(), background);

  const std::size_t h = config.height;
  const std::size_t w = config.width;
  for (std::size_t k = 0; k < complexity; ++k) {
    const std::size_t r0 = rng.index(h);
    const std::size_t c0 = rng.index(w);
    const std::size_t r1 = std::min(h, r0 + 1 + rng.index(std::max<std::size_t>(1, h / 2)));
    const std::size_t c1 = std::min(w, c0 + 1 + rng.index(std::max<std::size_t>(1, w / 2)));
    const double base = rng.uniform(0.2, 0.9);
    const double slope = rng.uniform(-0.5, 0.5);
    const double curve = rng.uniform(-0.5, 0.5);
    const double ramp_r = rng.uniform(-0.2, 0.2);
    const double ramp_c = rng.uniform(-0.2, 0.2);
    for (std::size_t b = 0; b < config.bands; ++b) {
      const double t =
          config.bands > 1 ? static_cast<double>(b) / static_cast<double>(config.bands - 1) : 0.0;
      const double level = base + slope * t + curve * t * t;
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) {
          const double dr = static_cast<double>(r - r0) / static_cast<double>(h);
          const double dc = static_cast<double>(c - c0) / static_cast<double>(w);
          cube(r, c, b) = std::clamp(level * (1.0 + ramp_r * dr + ramp_c * dc), 0.0, 1.0);
        }
      }
    }
  }
  return cube;
}

Measurement add_shot_noise(const Measurement& meas, const NoiseSpec& spec) {
  spec.check();
  validate(meas.config(), meas);
  const auto in = meas.values();
  if (std::any_of(in.begin(), in.end(), [](double x) { return x < 0.0; })) {
    fail(ErrorKind::NegativeMeasurement, "shot noise needs a non-negative measurement");
  }
  Measurement out(meas.config());
  const double peak = spec.full_scale ? *spec.full_scale : *std::max_element(in.begin(), in.end());
  if (peak == 0.0) return out;

  const double counts = std::ldexp(1.0, static_cast<int>(spec.shot_bits)) - 1.0;
  const double scale = counts / peak;
  auto dst = out.values();
  for (std::size_t i = 0; i < in.size(); ++i) {
    Rng rng = Rng::for_counter(spec.seed, i);
    dst[i] = static_cast<double>(sample_poisson(in[i] * scale, rng)) / scale;
  }
  return out;
}

}  // namespace cassi
