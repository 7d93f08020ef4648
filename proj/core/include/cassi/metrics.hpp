#pragma once

#include <vector>

#include "cassi/tensor.hpp"

namespace cassi {

/// PSNR reported for a band with zero error.
inline constexpr double kPsnrCapDb = 100.0;

struct PsnrResult {
  double psnr_db = 0.0;  // mean of per_band
  std::vector<double> per_band;
  std::vector<double> per_band_mse;
  double mse = 0.0;  // over the whole cube
};

struct SsimResult {
  double ssim = 0.0;  // mean of per_band
  std::vector<double> per_band;
};

struct MetricReport {
  double psnr_db = 0.0;
  double ssim = 0.0;
  std::vector<double> per_band_psnr;
  std::vector<double> per_band_ssim;
  std::vector<double> per_band_mse;
  double mse = 0.0;
};

// Both inputs are clamped to [0, 1]; peak value is 1.

/// Per-band 10*log10(1/MSE), capped at kPsnrCapDb, averaged over bands.
PsnrResult psnr(const Grid& reference, const Grid& test);

/// Per-band SSIM with an 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
/// K2 = 0.03, evaluated only where the window fits. Bands smaller than the
/// window use the largest odd window that fits.
SsimResult ssim(const Grid& reference, const Grid& test);

MetricReport evaluate(const Grid& reference, const Grid& test);

}  // namespace cassi
