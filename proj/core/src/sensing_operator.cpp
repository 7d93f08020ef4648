#include "cassi/sensing_operator.hpp"

#include <string>

#include "cassi/parallel.hpp"

namespace cassi {
namespace {

bool same_geometry(const SceneConfig& a, const SceneConfig& b) {
  return a.height == b.height && a.width == b.width && a.bands == b.bands &&
         a.shift_step == b.shift_step;
}

void require_geometry(const SensingOperator& op, const SceneConfig& other, const Grid& g,
                      std::size_t cols, std::size_t bands, const char* what) {
  const SceneConfig& cfg = op.config();
  if (!same_geometry(cfg, other) || g.rows() != cfg.height || g.cols() != cols ||
      g.bands() != bands) {
    fail(ErrorKind::DimensionMismatch,
         std::string(what) + " geometry does not match the sensing operator");
  }
}

void require_cube(const SensingOperator& op, const HSICube& cube) {
  require_geometry(op, cube.config(), cube, op.config().width, op.config().bands, "cube");
}

void require_meas(const SensingOperator& op, const Measurement& meas) {
  require_geometry(op, meas.config(), meas, op.config().measurement_width(), 1, "measurement");
}

// out(u, v, c) = M(u, v + d*c, c) * weights(u, v + d*c)
HSICube back_project(const SensingOperator& op, const Measurement& weights) {
  const SceneConfig& cfg = op.config();
  const ShiftedCube& m = op.shifted_mask();
  HSICube out(cfg);
  parallel_for(cfg.bands, [&](std::size_t c) {
    const std::size_t off = cfg.shift_step * c;
    for (std::size_t u = 0; u < cfg.height; ++u) {
      const double* mrow = &m(u, off, c);
      const double* wrow = &weights(u, off);
      double* orow = &out(u, 0, c);
      for (std::size_t v = 0; v < cfg.width; ++v) orow[v] = mrow[v] * wrow[v];
    }
  });
  return out;
}

Measurement weighted(const SensingOperator& op, const Measurement& meas) {
  Measurement t(op.config());
  auto tv = t.values();
  const auto yv = meas.values();
  const auto sv = op.sigma_inverse().values();
  for (std::size_t i = 0; i < tv.size(); ++i) tv[i] = yv[i] * sv[i];
  return t;
}

}  // namespace

std::size_t SensingOperator::memory_bytes() const noexcept {
  return sizeof(double) * (mask_.size() + sigma_.size() + sigma_inv_.size()) +
         sizeof(double) * config_.wavelengths.size();
}

SensingOperator SensingOperator::with_perturbed_sigma(std::size_t row, std::size_t col,
                                                      double factor) const {
  if (row >= config_.height || col >= config_.measurement_width()) {
    fail(ErrorKind::IndexOutOfRange, "sigma perturbation outside detector");
  }
  SensingOperator copy = *this;
  copy.sigma_inv_(row, col) *= factor;
  return copy;
}

ShiftedCube shift_mask(const CodedAperture& mask, const SceneConfig& config) {
  validate(config, mask);
  ShiftedCube out(config);
  for (std::size_t c = 0; c < config.bands; ++c) {
    const std::size_t off = config.shift_step * c;
    for (std::size_t u = 0; u < config.height; ++u) {
      for (std::size_t v = 0; v < config.width; ++v) out(u, v + off, c) = mask(u, v);
    }
  }
  return out;
}

ShiftedCube shift_cube(const HSICube& cube) {
  const SceneConfig& cfg = cube.config();
  ShiftedCube out(cfg);
  for (std::size_t c = 0; c < cfg.bands; ++c) {
    const std::size_t off = cfg.shift_step * c;
    for (std::size_t u = 0; u < cfg.height; ++u) {
      for (std::size_t v = 0; v < cfg.width; ++v) out(u, v + off, c) = cube(u, v, c);
    }
  }
  return out;
}

HSICube unshift_cube(const ShiftedCube& shifted) {
  const SceneConfig& cfg = shifted.config();
  if (shifted.rows() != cfg.height || shifted.cols() != cfg.measurement_width() ||
      shifted.bands() != cfg.bands) {
    fail(ErrorKind::DimensionMismatch, "shifted cube shape does not match its config");
  }
  HSICube out(cfg);
  for (std::size_t c = 0; c < cfg.bands; ++c) {
    const std::size_t off = cfg.shift_step * c;
    for (std::size_t u = 0; u < cfg.height; ++u) {
      for (std::size_t v = 0; v < cfg.width; ++v) out(u, v, c) = shifted(u, v + off, c);
    }
  }
  return out;
}

SensingOperator build_operator(const CodedAperture& mask, const SceneConfig& config) {
  SensingOperator op;
  op.config_ = config;
  op.mask_ = shift_mask(mask, config);
  op.sigma_ = Measurement(config);
  op.sigma_inv_ = Measurement(config);

  const std::size_t wp = config.measurement_width();
  for (std::size_t u = 0; u < config.height; ++u) {
    for (std::size_t v = 0; v < wp; ++v) {
      double s = 0.0;
      for (std::size_t c = 0; c < config.bands; ++c) {
        const double m = op.mask_(u, v, c);
        s += m * m;
      }
      if (!(s > 0.0)) throw MaskDegenerateError(u, v);
      op.sigma_(u, v) = s;
      op.sigma_inv_(u, v) = 1.0 / s;
    }
  }
  return op;
}

Measurement phi_apply(const SensingOperator& op, const HSICube& cube) {
  require_cube(op, cube);
  const SceneConfig& cfg = op.config();
  const ShiftedCube& m = op.shifted_mask();
  Measurement y(cfg);
  // Rows are independent; the band sum per pixel always runs c = 0..C-1.
  parallel_for(cfg.height, [&](std::size_t u) {
    double* yrow = &y(u, 0);
    for (std::size_t c = 0; c < cfg.bands; ++c) {
      const std::size_t off = cfg.shift_step * c;
      const double* mrow = &m(u, off, c);
      const double* xrow = &cube(u, 0, c);
      double* ydst = yrow + off;
      for (std::size_t v = 0; v < cfg.width; ++v) ydst[v] += mrow[v] * xrow[v];
    }
  });
  return y;
}

HSICube phi_t_apply(const SensingOperator& op, const Measurement& meas) {
  require_meas(op, meas);
  return back_project(op, meas);
}

HSICube pinv_apply(const SensingOperator& op, const Measurement& meas) {
  require_meas(op, meas);
  return back_project(op, weighted(op, meas));
}

HSICube range_project(const SensingOperator& op, const HSICube& cube) {
  return pinv_apply(op, phi_apply(op, cube));
}

HSICube null_project(const SensingOperator& op, const HSICube& cube) {
  HSICube out = range_project(op, cube);
  auto ov = out.values();
  const auto xv = cube.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = xv[i] - ov[i];
  return out;
}

HSICube rnd_combine(const SensingOperator& op, const Measurement& meas, const HSICube& q) {
  require_meas(op, meas);
  require_cube(op, q);
  // Phi^+ y + q - Phi^+ Phi q, folded into q + Phi^+ (y - Phi q).
  Measurement residual = phi_apply(op, q);
  auto rv = residual.values();
  const auto yv = meas.values();
  for (std::size_t i = 0; i < rv.size(); ++i) rv[i] = yv[i] - rv[i];
  HSICube out = pinv_apply(op, residual);
  auto ov = out.values();
  const auto qv = q.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] += qv[i];
  return out;
}

}  // namespace cassi
