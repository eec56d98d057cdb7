#pragma once

#include <optional>
#include <string>
#include <vector>

#include "convbeers/image.hpp"

namespace convbeers {

struct Roi {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool inside(const PanImage& img) const noexcept {
    return x >= 0 && y >= 0 && w > 0 && h > 0 && x + w <= img.width() && y + h <= img.height();
  }
};

inline constexpr double kPsnrCapDb = 99.0;

/// 10 log10(peak^2 / MSE), capped at 99 dB when MSE < peak^2 * 1e-10.
double psnr(const PanImage& x, const PanImage& y, double peak);

/// Mean local SSIM over an 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
/// K2 = 0.03, dynamic range `peak`. Only windows fully inside the image count.
double ssim(const PanImage& x, const PanImage& y, double peak);

struct MtfCurve {
  std::vector<double> frequencies;  ///< cycles/pixel, 0 .. 0.5
  std::vector<double> values;       ///< values[0] == 1
  double mtf_at_nyquist = 0;
  double edge_angle_deg = 0;        ///< signed slant off the edge axis
  bool transposed = false;          ///< edge was near-horizontal
};

/// Slanted-edge MTF: per-row gradient centroids fitted by least squares,
/// pixels binned at 4x on edge-normal distance, LSF by differencing,
/// Hamming window on the LSF peak, DFT normalised at DC.
MtfCurve slanted_edge_mtf(const PanImage& img, const Roi& roi);

struct RoiStats {
  double mean = 0;
  double std = 0;
  double snr = 0;
};

struct SnrEstimate {
  std::vector<RoiStats> per_roi;
  double alpha_hat = 0;
  double beta_hat = 0;
  double snr_at_l0 = 0;
  double snr_at_l1 = 0;
  bool noiseless = false;
};

inline constexpr double kSnrCap = 1e6;

/// Per-ROI mean/std, least-squares fit of variance against mean
/// (sigma^2 = alpha L + beta), anchors reported through the fitted law.
SnrEstimate variance_snr(const PanImage& img, const std::vector<Roi>& rois, double l0,
                         double l1);

struct PairMetrics {
  double psnr_db = 0;
  double ssim = 0;
  std::optional<double> lpips;  ///< passed through, never computed here
  std::optional<double> dists;
};

PairMetrics evaluate_pair(const PanImage& candidate, const PanImage& reference, double peak,
                          std::optional<double> lpips = std::nullopt,
                          std::optional<double> dists = std::nullopt);

struct MetricSummary {
  std::vector<PairMetrics> pairs;
  double mean_psnr_db = 0;
  double mean_ssim = 0;
  std::optional<double> mean_lpips;
  std::optional<double> mean_dists;
};

MetricSummary summarize(std::vector<PairMetrics> pairs);

}  // namespace convbeers
