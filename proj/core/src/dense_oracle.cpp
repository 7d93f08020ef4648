#include "cassi/dense_oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <string>

namespace cassi::oracle {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> view(const DenseMatrix& m) {
  return {m.values().data(), static_cast<Eigen::Index>(m.rows()),
          static_cast<Eigen::Index>(m.cols())};
}

void check_cap(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    fail(ErrorKind::InvalidArgument, "dense matrix needs positive dimensions");
  }
  if (cols > kMaxDenseEntries / rows) {
    fail(ErrorKind::InstanceTooLarge, std::to_string(rows) + "x" + std::to_string(cols) +
                                          " exceeds the dense oracle cap of " +
                                          std::to_string(kMaxDenseEntries) + " entries");
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  check_cap(rows, cols);
  data_.assign(rows * cols, 0.0);
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix build_dense(const SensingOperator& op) {
  const SceneConfig& cfg = op.config();
  const std::size_t n = cfg.detector_size();
  // Check before allocating: n * (n * C) can overflow the cap by many orders.
  if (n > kMaxDenseEntries || n * cfg.bands > kMaxDenseEntries / n) {
    fail(ErrorKind::InstanceTooLarge,
         "sensing matrix " + std::to_string(n) + "x" + std::to_string(n) + "*" +
             std::to_string(cfg.bands) + " exceeds the dense oracle cap");
  }
  DenseMatrix phi(n, n * cfg.bands);
  const ShiftedCube& m = op.shifted_mask();
  const std::size_t wp = cfg.measurement_width();
  for (std::size_t c = 0; c < cfg.bands; ++c) {
    for (std::size_t v = 0; v < wp; ++v) {
      for (std::size_t u = 0; u < cfg.height; ++u) {
        const std::size_t row = flatten_index(u, v, cfg);
        phi(row, flatten_index(u, v, c, cfg)) = m(u, v, c);
      }
    }
  }
  return phi;
}

DenseMatrix dense_pinv(const DenseMatrix& m) {
  const auto a = view(m);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    fail(ErrorKind::NumericalFailure, "SVD did not converge");
  }
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? 1e-12 * s(0) : 0.0;
  Eigen::VectorXd inv(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) inv(i) = s(i) > cutoff ? 1.0 / s(i) : 0.0;

  const Eigen::MatrixXd p = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  DenseMatrix out(m.cols(), m.rows());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      out(r, c) = p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

std::vector<double> dense_apply(const DenseMatrix& m, std::span<const double> v) {
  if (v.size() != m.cols()) {
    fail(ErrorKind::DimensionMismatch, "vector of length " + std::to_string(v.size()) +
                                           " against " + std::to_string(m.cols()) + " columns");
  }
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) acc += m(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) fail(ErrorKind::DimensionMismatch, "inner dimensions differ");
  DenseMatrix out(a.rows(), b.cols());
  const RowMajor p = view(a) * view(b);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      out(r, c) = p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

DenseMatrix transpose(const DenseMatrix& m) {
  DenseMatrix out(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = m(r, c);
  }
  return out;
}

double relative_difference(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorKind::DimensionMismatch, "matrices differ in shape");
  }
  const double denom = view(b).norm();
  const double num = (view(a) - view(b)).norm();
  return denom > 0.0 ? num / denom : num;
}

std::vector<double> vectorize(const ShiftedCube& cube) {
  const SceneConfig& cfg = cube.config();
  std::vector<double> v(cube.size());
  for (std::size_t c = 0; c < cfg.bands; ++c) {
    for (std::size_t u = 0; u < cfg.height; ++u) {
      for (std::size_t col = 0; col < cfg.measurement_width(); ++col) {
        v[flatten_index(u, col, c, cfg)] = cube(u, col, c);
      }
    }
  }
  return v;
}

std::vector<double> vectorize(const HSICube& cube) { return vectorize(shift_cube(cube)); }

std::vector<double> vectorize(const Measurement& meas) {
  const SceneConfig& cfg = meas.config();
  std::vector<double> v(meas.size());
  for (std::size_t u = 0; u < cfg.height; ++u) {
    for (std::size_t col = 0; col < cfg.measurement_width(); ++col) {
      v[flatten_index(u, col, cfg)] = meas(u, col);
    }
  }
  return v;
}

ShiftedCube shifted_from_vector(const SceneConfig& config, std::span<const double> v) {
  ShiftedCube out(config);
  if (v.size() != out.size()) fail(ErrorKind::DimensionMismatch, "vector length");
  for (std::size_t c = 0; c < config.bands; ++c) {
    for (std::size_t u = 0; u < config.height; ++u) {
      for (std::size_t col = 0; col < config.measurement_width(); ++col) {
        out(u, col, c) = v[flatten_index(u, col, c, config)];
      }
    }
  }
  return out;
}

HSICube cube_from_vector(const SceneConfig& config, std::span<const double> v) {
  return unshift_cube(shifted_from_vector(config, v));
}

Measurement measurement_from_vector(const SceneConfig& config, std::span<const double> v) {
  Measurement out(config);
  if (v.size() != out.size()) fail(ErrorKind::DimensionMismatch, "vector length");
  for (std::size_t u = 0; u < config.height; ++u) {
    for (std::size_t col = 0; col < config.measurement_width(); ++col) {
      out(u, col) = v[flatten_index(u, col, config)];
    }
  }
  return out;
}

}  // namespace cassi::oracle
