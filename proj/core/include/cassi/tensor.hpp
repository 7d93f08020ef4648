#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cassi/error.hpp"

namespace cassi {

/// Acquisition geometry. Band 0 is the undispersed band; band c lands d*c
/// columns to the right on the detector.
struct SceneConfig {
  std::size_t height = 1;
  std::size_t width = 1;
  std::size_t bands = 1;
  std::size_t shift_step = 1;
  std::vector<double> wavelengths;  // nm, metadata only; empty or one per band

  /// Validated construction; throws InvalidArgument on zero dimensions.
  static SceneConfig make(std::size_t height, std::size_t width, std::size_t bands,
                          std::size_t shift_step);

  std::size_t measurement_width() const noexcept { return width + shift_step * (bands - 1); }
  std::size_t scene_size() const noexcept { return height * width * bands; }
  std::size_t detector_size() const noexcept { return height * measurement_width(); }

  void check() const;

  friend bool operator==(const SceneConfig&, const SceneConfig&) = default;
};

/// Dense rows x cols x bands array of doubles. Band-major, then row, then
/// column, so each band is one contiguous row-major plane.
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, std::size_t bands, double fill = 0.0);
  Grid(std::size_t rows, std::size_t cols, std::size_t bands, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t bands() const noexcept { return bands_; }
  std::size_t plane_size() const noexcept { return rows_ * cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c, std::size_t b) noexcept {
    return data_[(b * rows_ + r) * cols_ + c];
  }
  const double& operator()(std::size_t r, std::size_t c, std::size_t b) const noexcept {
    return data_[(b * rows_ + r) * cols_ + c];
  }

  std::span<double> band(std::size_t b) noexcept {
    return {data_.data() + b * plane_size(), plane_size()};
  }
  std::span<const double> band(std::size_t b) const noexcept {
    return {data_.data() + b * plane_size(), plane_size()};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  const std::vector<double>& storage() const noexcept { return data_; }

  bool all_finite() const noexcept;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t bands_ = 0;
  std::vector<double> data_;
};

/// H x W x C spectral scene.
class HSICube : public Grid {
 public:
  HSICube() = default;
  explicit HSICube(const SceneConfig& config);
  HSICube(const SceneConfig& config, std::vector<double> values);

  const SceneConfig& config() const noexcept { return config_; }

 private:
  SceneConfig config_;
};

/// H x W' x C cube in detector coordinates; band c is supported on
/// columns [d*c, d*c + W).
class ShiftedCube : public Grid {
 public:
  ShiftedCube() = default;
  explicit ShiftedCube(const SceneConfig& config);
  ShiftedCube(const SceneConfig& config, std::vector<double> values);

  const SceneConfig& config() const noexcept { return config_; }

  std::size_t support_begin(std::size_t band) const noexcept {
    return config_.shift_step * band;
  }

 private:
  SceneConfig config_;
};

/// H x W' detector image.
class Measurement : public Grid {
 public:
  Measurement() = default;
  explicit Measurement(const SceneConfig& config);
  Measurement(const SceneConfig& config, std::vector<double> values);

  const SceneConfig& config() const noexcept { return config_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return Grid::operator()(r, c, 0); }
  const double& operator()(std::size_t r, std::size_t c) const noexcept {
    return Grid::operator()(r, c, 0);
  }

 private:
  SceneConfig config_;
};

/// 2D coded aperture; values must be finite and non-negative.
class CodedAperture : public Grid {
 public:
  CodedAperture() = default;
  CodedAperture(std::size_t height, std::size_t width, double fill = 0.0);
  CodedAperture(std::size_t height, std::size_t width, std::vector<double> values);

  std::size_t height() const noexcept { return rows(); }
  std::size_t width() const noexcept { return cols(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return Grid::operator()(r, c, 0); }
  const double& operator()(std::size_t r, std::size_t c) const noexcept {
    return Grid::operator()(r, c, 0);
  }
};

void validate(const SceneConfig& config, const HSICube& cube);
void validate(const SceneConfig& config, const ShiftedCube& cube);
void validate(const SceneConfig& config, const Measurement& meas);
void validate(const SceneConfig& config, const CodedAperture& mask);

/// Position of (row, col, band) in the vectorized detector-coordinate cube:
/// column-stacked within a band, bands concatenated. `col` ranges over the
/// measurement width.
std::size_t flatten_index(std::size_t row, std::size_t col, std::size_t band,
                          const SceneConfig& config);

/// Position of (row, col) in the vectorized measurement.
std::size_t flatten_index(std::size_t row, std::size_t col, const SceneConfig& config);

}  // namespace cassi
