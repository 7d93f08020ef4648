#include "cassi/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cassi {
namespace {

std::string shape_string(std::size_t r, std::size_t c, std::size_t b) {
  return std::to_string(r) + "x" + std::to_string(c) + "x" + std::to_string(b);
}

void check_shape(const Grid& g, std::size_t r, std::size_t c, std::size_t b, const char* what) {
  if (g.rows() != r || g.cols() != c || g.bands() != b || g.size() != r * c * b) {
    fail(ErrorKind::DimensionMismatch, std::string(what) + " has shape " +
                                           shape_string(g.rows(), g.cols(), g.bands()) +
                                           ", expected " + shape_string(r, c, b));
  }
}

void check_finite(const Grid& g, const char* what) {
  const auto v = g.values();
  const auto it = std::find_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); });
  if (it != v.end()) {
    fail(ErrorKind::NonFiniteValue,
         std::string(what) + " has a non-finite value at flat offset " +
             std::to_string(static_cast<std::size_t>(it - v.begin())));
  }
}

}  // namespace

SceneConfig SceneConfig::make(std::size_t height, std::size_t width, std::size_t bands,
                              std::size_t shift_step) {
  SceneConfig cfg;
  cfg.height = height;
  cfg.width = width;
  cfg.bands = bands;
  cfg.shift_step = shift_step;
  cfg.check();
  return cfg;
}

void SceneConfig::check() const {
  if (height == 0 || width == 0 || bands == 0 || shift_step == 0) {
    fail(ErrorKind::InvalidArgument,
         "scene config requires H, W, C, d >= 1 (got H=" + std::to_string(height) +
             " W=" + std::to_string(width) + " C=" + std::to_string(bands) +
             " d=" + std::to_string(shift_step) + ")");
  }
  if (!wavelengths.empty() && wavelengths.size() != bands) {
    fail(ErrorKind::InvalidArgument, "wavelength list must have one entry per band");
  }
}

Grid::Grid(std::size_t rows, std::size_t cols, std::size_t bands, double fill)
    : rows_(rows), cols_(cols), bands_(bands), data_(rows * cols * bands, fill) {}

Grid::Grid(std::size_t rows, std::size_t cols, std::size_t bands, std::vector<double> values)
    : rows_(rows), cols_(cols), bands_(bands), data_(std::move(values)) {
  if (data_.size() != rows * cols * bands) {
    fail(ErrorKind::DimensionMismatch, "got " + std::to_string(data_.size()) +
                                           " values for shape " + shape_string(rows, cols, bands));
  }
}

bool Grid::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

HSICube::HSICube(const SceneConfig& config)
    : Grid(config.height, config.width, config.bands), config_(config) {}

HSICube::HSICube(const SceneConfig& config, std::vector<double> values)
    : Grid(config.height, config.width, config.bands, std::move(values)), config_(config) {}

ShiftedCube::ShiftedCube(const SceneConfig& config)
    : Grid(config.height, config.measurement_width(), config.bands), config_(config) {}

ShiftedCube::ShiftedCube(const SceneConfig& config, std::vector<double> values)
    : Grid(config.height, config.measurement_width(), config.bands, std::move(values)),
      config_(config) {}

Measurement::Measurement(const SceneConfig& config)
    : Grid(config.height, config.measurement_width(), 1), config_(config) {}

Measurement::Measurement(const SceneConfig& config, std::vector<double> values)
    : Grid(config.height, config.measurement_width(), 1, std::move(values)), config_(config) {}

CodedAperture::CodedAperture(std::size_t height, std::size_t width, double fill)
    : Grid(height, width, 1, fill) {}

CodedAperture::CodedAperture(std::size_t height, std::size_t width, std::vector<double> values)
    : Grid(height, width, 1, std::move(values)) {}

void validate(const SceneConfig& config, const HSICube& cube) {
  config.check();
  check_shape(cube, config.height, config.width, config.bands, "cube");
  check_finite(cube, "cube");
}

void validate(const SceneConfig& config, const ShiftedCube& cube) {
  config.check();
  check_shape(cube, config.height, config.measurement_width(), config.bands, "shifted cube");
  check_finite(cube, "shifted cube");
}

void validate(const SceneConfig& config, const Measurement& meas) {
  config.check();
  check_shape(meas, config.height, config.measurement_width(), 1, "measurement");
  check_finite(meas, "measurement");
}

void validate(const SceneConfig& config, const CodedAperture& mask) {
  config.check();
  check_shape(mask, config.height, config.width, 1, "mask");
  check_finite(mask, "mask");
  const auto v = mask.values();
  if (std::any_of(v.begin(), v.end(), [](double x) { return x < 0.0; })) {
    fail(ErrorKind::InvalidArgument, "mask values must be non-negative");
  }
}

std::size_t flatten_index(std::size_t row, std::size_t col, std::size_t band,
                          const SceneConfig& config) {
  const std::size_t wp = config.measurement_width();
  if (row >= config.height || col >= wp || band >= config.bands) {
    fail(ErrorKind::IndexOutOfRange, "(" + std::to_string(row) + ", " + std::to_string(col) +
                                         ", " + std::to_string(band) + ") outside " +
                                         shape_string(config.height, wp, config.bands));
  }
  return band * config.height * wp + col * config.height + row;
}

std::size_t flatten_index(std::size_t row, std::size_t col, const SceneConfig& config) {
  return flatten_index(row, col, 0, config);
}

}  // namespace cassi
