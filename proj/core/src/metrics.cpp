#include "cassi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cassi {
namespace {

constexpr std::size_t kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

void require_same_shape(const Grid& a, const Grid& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.bands() != b.bands()) {
    fail(ErrorKind::DimensionMismatch, "metric inputs differ in shape");
  }
  if (a.size() == 0) fail(ErrorKind::DimensionMismatch, "metric inputs are empty");
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<double> gaussian_window(std::size_t size) {
  std::vector<double> w(size);
  const double centre = static_cast<double>(size / 2);
  for (std::size_t i = 0; i < size; ++i) {
    const double x = static_cast<double>(i) - centre;
    w[i] = std::exp(-(x * x) / (2.0 * kWindowSigma * kWindowSigma));
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

// Separable valid-region filtering of a rows x cols plane.
std::vector<double> filter_valid(const std::vector<double>& plane, std::size_t rows,
                                 std::size_t cols, const std::vector<double>& w) {
  const std::size_t k = w.size();
  const std::size_t out_c = cols - k + 1;
  const std::size_t out_r = rows - k + 1;
  std::vector<double> horiz(rows * out_c);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < out_c; ++c) {
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += w[t] * plane[r * cols + c + t];
      horiz[r * out_c + c] = acc;
    }
  }
  std::vector<double> out(out_r * out_c);
  for (std::size_t r = 0; r < out_r; ++r) {
    for (std::size_t c = 0; c < out_c; ++c) {
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += w[t] * horiz[(r + t) * out_c + c];
      out[r * out_c + c] = acc;
    }
  }
  return out;
}

double band_ssim(const Grid& a, const Grid& b, std::size_t band, const std::vector<double>& w) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  const std::size_t n = rows * cols;
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  const auto pa = a.band(band);
  const auto pb = b.band(band);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = clamp01(pa[i]);
    y[i] = clamp01(pb[i]);
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = filter_valid(x, rows, cols, w);
  const auto my = filter_valid(y, rows, cols, w);
  const auto sxx = filter_valid(xx, rows, cols, w);
  const auto syy = filter_valid(yy, rows, cols, w);
  const auto sxy = filter_valid(xy, rows, cols, w);

  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double var_x = sxx[i] - mx[i] * mx[i];
    const double var_y = syy[i] - my[i] * my[i];
    const double cov = sxy[i] - mx[i] * my[i];
    const double num = (2.0 * mx[i] * my[i] + kC1) * (2.0 * cov + kC2);
    const double den = (mx[i] * mx[i] + my[i] * my[i] + kC1) * (var_x + var_y + kC2);
    total += num / den;
  }
  return total / static_cast<double>(mx.size());
}

}  // namespace

PsnrResult psnr(const Grid& reference, const Grid& test) {
  require_same_shape(reference, test);
  PsnrResult out;
  double total_sq = 0.0;
  for (std::size_t b = 0; b < reference.bands(); ++b) {
    const auto pr = reference.band(b);
    const auto pt = test.band(b);
    double sq = 0.0;
    for (std::size_t i = 0; i < pr.size(); ++i) {
      const double diff = clamp01(pr[i]) - clamp01(pt[i]);
      sq += diff * diff;
    }
    total_sq += sq;
    const double mse = sq / static_cast<double>(pr.size());
    out.per_band_mse.push_back(mse);
    out.per_band.push_back(mse > 0.0 ? std::min(kPsnrCapDb, -10.0 * std::log10(mse))
                                     : kPsnrCapDb);
  }
  out.psnr_db = mean(out.per_band);
  out.mse = total_sq / static_cast<double>(reference.size());
  return out;
}

SsimResult ssim(const Grid& reference, const Grid& test) {
  require_same_shape(reference, test);
  std::size_t size = std::min({kWindow, reference.rows(), reference.cols()});
  if (size % 2 == 0) --size;
  const auto w = gaussian_window(size);
  SsimResult out;
  for (std::size_t b = 0; b < reference.bands(); ++b) {
    out.per_band.push_back(band_ssim(reference, test, b, w));
  }
  out.ssim = mean(out.per_band);
  return out;
}

MetricReport evaluate(const Grid& reference, const Grid& test) {
  PsnrResult p = psnr(reference, test);
  SsimResult s = ssim(reference, test);
  MetricReport r;
  r.psnr_db = p.psnr_db;
  r.ssim = s.ssim;
  r.per_band_psnr = std::move(p.per_band);
  r.per_band_ssim = std::move(s.per_band);
  r.per_band_mse = std::move(p.per_band_mse);
  r.mse = p.mse;
  return r;
}

}  // namespace cassi
