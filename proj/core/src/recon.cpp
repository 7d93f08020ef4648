#include "cassi/recon.hpp"

#include <cmath>
#include <string>

namespace cassi {
namespace {

void require_measurement(const Measurement& meas, const SceneConfig& config) {
  if (meas.rows() != config.height || meas.cols() != config.measurement_width() ||
      meas.bands() != 1) {
    fail(ErrorKind::DimensionMismatch, "measurement is not H x W' for the given config");
  }
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void write_support(ShiftedCube& dst, const HSICube& src) {
  const SceneConfig& cfg = dst.config();
  for (std::size_t c = 0; c < cfg.bands; ++c) {
    const std::size_t off = cfg.shift_step * c;
    for (std::size_t u = 0; u < cfg.height; ++u) {
      for (std::size_t v = 0; v < cfg.width; ++v) dst(u, v + off, c) = src(u, v, c);
    }
  }
}

// The uncropped denoiser sees the full detector-width tensor as a cube.
SceneConfig detector_scene(const SceneConfig& cfg) {
  SceneConfig wide = cfg;
  wide.width = cfg.measurement_width();
  wide.wavelengths.clear();
  return wide;
}

}  // namespace

std::string_view to_string(InitStrategy s) noexcept {
  switch (s) {
    case InitStrategy::Shift: return "shift";
    case InitStrategy::Repeat: return "repeat";
    case InitStrategy::Roll: return "roll";
  }
  return "roll";
}

InitStrategy parse_init_strategy(std::string_view name) {
  if (name == "shift") return InitStrategy::Shift;
  if (name == "repeat") return InitStrategy::Repeat;
  if (name == "roll") return InitStrategy::Roll;
  fail(ErrorKind::InvalidArgument, "unknown init strategy '" + std::string(name) + "'");
}

void SolverConfig::check() const {
  if (iterations == 0) fail(ErrorKind::InvalidArgument, "iterations must be positive");
  if (!(tv_weight >= 0.0) || !std::isfinite(tv_weight)) {
    fail(ErrorKind::InvalidArgument, "tv_weight must be a non-negative finite number");
  }
  if (tv_inner_iterations == 0) {
    fail(ErrorKind::InvalidArgument, "tv_inner_iterations must be positive");
  }
  if (!(convergence_tol >= 0.0)) {
    fail(ErrorKind::InvalidArgument, "convergence_tol must be non-negative");
  }
}

ShiftedCube init_shift(const Measurement& meas, const SceneConfig& config) {
  require_measurement(meas, config);
  ShiftedCube out(config);
  const std::size_t wp = config.measurement_width();
  for (std::size_t c = 0; c < config.bands; ++c) {
    const std::size_t off = config.shift_step * c;
    for (std::size_t u = 0; u < config.height; ++u) {
      for (std::size_t v = off; v < wp; ++v) out(u, v, c) = meas(u, v - off);
    }
  }
  return out;
}

ShiftedCube init_repeat(const Measurement& meas, const SceneConfig& config) {
  require_measurement(meas, config);
  ShiftedCube out(config);
  for (std::size_t c = 0; c < config.bands; ++c) {
    std::copy(meas.values().begin(), meas.values().end(), out.band(c).begin());
  }
  return out;
}

ShiftedCube init_roll(const Measurement& meas, const SceneConfig& config) {
  require_measurement(meas, config);
  ShiftedCube out(config);
  const std::size_t wp = config.measurement_width();
  for (std::size_t c = 0; c < config.bands; ++c) {
    const std::size_t shift = (config.shift_step * c) % wp;
    for (std::size_t u = 0; u < config.height; ++u) {
      for (std::size_t v = 0; v < wp; ++v) out(u, v, c) = meas(u, (v + wp - shift) % wp);
    }
  }
  return out;
}

ShiftedCube make_initial(InitStrategy strategy, const Measurement& meas,
                         const SceneConfig& config) {
  switch (strategy) {
    case InitStrategy::Shift: return init_shift(meas, config);
    case InitStrategy::Repeat: return init_repeat(meas, config);
    case InitStrategy::Roll: return init_roll(meas, config);
  }
  return init_roll(meas, config);
}

HSICube crop_to_scene(const ShiftedCube& shifted) { return unshift_cube(shifted); }

HSICube gap_solve(const SensingOperator& op, const Measurement& meas, const Prior& prior,
                  const SolverConfig& cfg, SolveTrace* trace) {
  cfg.check();
  require_measurement(meas, op.config());
  // Seed from Sigma^-1 y: raw y sums ~C*density bands and sits far outside
  // the scene's value range, which a fixed-strength prior cannot undo.
  Measurement normalized(op.config());
  {
    auto nv = normalized.values();
    const auto yv = meas.values();
    const auto sv = op.sigma_inverse().values();
    for (std::size_t i = 0; i < nv.size(); ++i) nv[i] = yv[i] * sv[i];
  }
  return gap_solve(op, meas, prior, cfg, make_initial(cfg.init, normalized, op.config()), trace);
}

HSICube gap_solve(const SensingOperator& op, const Measurement& meas, const Prior& prior,
                  const SolverConfig& cfg, ShiftedCube x, SolveTrace* trace) {
  cfg.check();
  const SceneConfig& sc = op.config();
  require_measurement(meas, sc);
  if (x.rows() != sc.height || x.cols() != sc.measurement_width() || x.bands() != sc.bands) {
    fail(ErrorKind::DimensionMismatch, "initial iterate is not H x W' x C");
  }
  // Re-tag with the operator's config so later crops use its geometry.
  x = ShiftedCube(sc, std::vector<double>(x.values().begin(), x.values().end()));

  const SceneConfig wide = detector_scene(sc);
  if (trace != nullptr) {
    *trace = SolveTrace{};
    trace->denoised_pixels_per_iteration =
        cfg.crop_denoiser_input ? sc.scene_size() : wide.scene_size();
  }

  std::vector<double> previous;
  for (std::size_t k = 0; k < cfg.iterations; ++k) {
    if (cfg.convergence_tol > 0.0) previous.assign(x.values().begin(), x.values().end());

    // Weighted data correction on the scene support; Phi ignores the margin.
    HSICube scene = crop_to_scene(x);
    Measurement residual = phi_apply(op, scene);
    {
      auto rv = residual.values();
      const auto yv = meas.values();
      for (std::size_t i = 0; i < rv.size(); ++i) rv[i] = yv[i] - rv[i];
    }
    const HSICube correction = pinv_apply(op, residual);
    {
      auto sv = scene.values();
      const auto cv = correction.values();
      for (std::size_t i = 0; i < sv.size(); ++i) sv[i] += cv[i];
    }

    if (cfg.crop_denoiser_input) {
      const HSICube den = prior.denoise(scene, cfg.tv_weight);
      if (den.rows() != sc.height || den.cols() != sc.width || den.bands() != sc.bands) {
        fail(ErrorKind::DimensionMismatch, "prior changed the cube dimensions");
      }
      write_support(x, den);
    } else {
      write_support(x, scene);
      const HSICube full(wide, std::vector<double>(x.values().begin(), x.values().end()));
      const HSICube den = prior.denoise(full, cfg.tv_weight);
      if (den.rows() != x.rows() || den.cols() != x.cols() || den.bands() != x.bands()) {
        fail(ErrorKind::DimensionMismatch, "prior changed the cube dimensions");
      }
      std::copy(den.values().begin(), den.values().end(), x.values().begin());
    }

    if (!x.all_finite()) {
      fail(ErrorKind::Diverged, "iterate became non-finite at iteration " + std::to_string(k + 1));
    }

    if (trace != nullptr) {
      trace->iterations = k + 1;
      Measurement r = phi_apply(op, crop_to_scene(x));
      auto rv = r.values();
      const auto yv = meas.values();
      for (std::size_t i = 0; i < rv.size(); ++i) rv[i] = yv[i] - rv[i];
      trace->residual_norms.push_back(l2_norm(rv));
    }

    if (cfg.convergence_tol > 0.0) {
      double diff = 0.0;
      double base = 0.0;
      const auto xv = x.values();
      for (std::size_t i = 0; i < xv.size(); ++i) {
        diff += (xv[i] - previous[i]) * (xv[i] - previous[i]);
        base += previous[i] * previous[i];
      }
      if (std::sqrt(diff) <= cfg.convergence_tol * std::sqrt(base)) break;
    }
  }
  return crop_to_scene(x);
}

HSICube rnd_reconstruct(const SensingOperator& op, const Measurement& meas, const Prior& prior,
                        const SolverConfig& cfg, SolveTrace* trace) {
  const HSICube q = gap_solve(op, meas, prior, cfg, trace);
  return rnd_combine(op, meas, q);
}

}  // namespace cassi
