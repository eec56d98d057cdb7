#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "convbeers/image.hpp"

namespace convbeers {

/// Normalised sinc, sin(pi f) / (pi f), sinc(0) = 1.
double sinc(double f) noexcept;

/// sinc(0.5): the detector-only MTF at Nyquist, 2/pi.
inline constexpr double kDetectorNyquistMtf = 2.0 / std::numbers::pi;

/// Response of the anti-alias Gaussian at the post-subsampling Nyquist.
inline constexpr double kAntiAliasNyquistGain = 0.5;

struct MtfConfig {
  double mtf_nyq = 0.07;  ///< system MTF at 0.5 cycles per target pixel
};

/// gamma = 2 ln(sinc(0.5) * gain / mtf_nyq), i.e. the decay for which
/// exp(-gamma/2) * sinc(0.5) * gain == mtf_nyq. `gain` is the response of
/// any further system stage at Nyquist (1 for a stand-alone blur).
double gamma_from_nyquist(const MtfConfig& cfg, double nyquist_gain = 1.0);

/// MTF(fx, fy) = exp(-gamma f_r) sinc(fx) sinc(fy) sampled on the DFT grid
/// (row-major, DFT index order). Frequencies are in cycles per target pixel:
/// with oversampling r the grid is `r` samples per target pixel, so sample
/// frequency k/n maps to r*k/n, and gamma is calibrated against the whole
/// system (blur then anti-alias filter).
struct MtfGrid {
  int width = 0;
  int height = 0;
  int oversampling = 1;
  double gamma = 0;
  std::vector<double> values;

  double at(int kx, int ky) const { return values[static_cast<std::size_t>(ky) * width + kx]; }
};

MtfGrid build_mtf_grid(const MtfConfig& cfg, int width, int height, int oversampling = 1);

/// Odd-sided, unit-sum blur kernel.
struct Psf {
  int side = 1;
  std::vector<double> kernel;
  double retained_energy = 1.0;  ///< sum of squares kept by the crop

  int half() const noexcept { return side / 2; }
  double at(int dx, int dy) const {
    return kernel[static_cast<std::size_t>(dy + half()) * side + (dx + half())];
  }
};

/// Inverse DFT of the grid, centre-cropped to `support` and renormalised.
/// Throws if the inverse has a significant imaginary part or the crop keeps
/// less than 99% of the kernel's squared energy.
Psf psf_from_mtf(const MtfGrid& grid, int support);

/// 15 at r = 1; 15 r rounded up to odd otherwise.
int default_psf_support(int oversampling);

/// Builds a grid large enough for `support` and returns the cropped PSF.
Psf make_psf(const MtfConfig& cfg, int oversampling = 1, int support = 0);

/// Linear convolution with half-sample symmetric (mirror) boundaries. Output
/// matches the input size. Negative results (possible from kernel side lobes)
/// are clamped to 0 and counted in *clamped.
PanImage apply_blur(const PanImage& img, const Psf& psf, std::size_t* clamped = nullptr);

enum class BlurMethod { automatic, direct, fft };
PanImage apply_blur(const PanImage& img, const Psf& psf, BlurMethod method,
                    std::size_t* clamped = nullptr);

/// Gaussian sigma used before subsampling by r: Gaussian MTF is 0.5 at the
/// new Nyquist.
double antialias_sigma(int r) noexcept;

/// Anti-alias filter (r > 1) then I_out(x, y) = I(x0 + r x, y0 + r y) with
/// x0 = y0 = floor(r / 2). Output is floor(W/r) x floor(H/r) with gsd * r.
PanImage downsample_gsd(const PanImage& img, int r);

struct NoiseConfig {
  double l0 = 25.0;
  double snr0 = 50.0;
  double l1 = 100.0;
  double snr1 = 110.0;
};

/// sigma^2(L) = alpha L + beta.
struct NoiseParams {
  double alpha = 0;
  double beta = 0;

  double variance(double luminance) const noexcept { return alpha * luminance + beta; }
  double sigma(double luminance) const noexcept;
  double snr(double luminance) const noexcept;
};

/// Exact two-point solve of sigma_i = L_i / SNR_i against the linear
/// variance law. Throws if the variance is not positive over
/// [0, operating_max].
NoiseParams calibrate_noise(const NoiseConfig& cfg, double operating_max = 163.84);

/// out = max(0, in + n), n ~ N(0, sigma(in)). Deterministic per seed.
PanImage apply_noise(const PanImage& img, const NoiseParams& params, std::uint64_t seed,
                     std::size_t* clamped = nullptr);

/// Exact parameters used by one degrade() call.
struct AppliedParams {
  double mtf_nyq = 0;
  double gamma = 0;
  int psf_support = 0;
  int oversampling = 1;
  NoiseConfig noise;
  NoiseParams noise_params;
  std::uint64_t seed = 0;
  std::size_t blur_clamped = 0;
  std::size_t noise_clamped = 0;
};

struct DegradeOptions {
  double operating_max = 163.84;
  int psf_support = 0;  ///< 0 selects default_psf_support(r)
};

struct DegradeResult {
  PanImage image;
  AppliedParams applied;
};

/// apply_blur -> downsample_gsd -> apply_noise.
DegradeResult degrade(const PanImage& img, const MtfConfig& mtf, const NoiseConfig& noise,
                      int r, std::uint64_t seed, const DegradeOptions& options = {});

using Range = std::pair<double, double>;

/// Parameter ranges of a dataset recipe. Degenerate ranges (lo == hi)
/// describe the fixed-degradation datasets.
struct DegradationConfig {
  Range mtf_range{0.07, 0.07};
  Range snr0_range{50, 50};
  Range snr1_range{110, 110};
  int oversampling = 1;
  double l0 = 25.0;
  double l1 = 100.0;
  std::uint64_t seed = 0;

  /// Empty when valid.
  std::vector<std::string> violations() const;
  void validate() const;
  bool contains(double mtf_nyq, double snr0, double snr1) const noexcept;
};

DegradationConfig sim_degraded_variable();
DegradationConfig sim_degraded_fixed();
DegradationConfig sim_reference_fixed();

struct SampledDegradation {
  MtfConfig mtf;
  NoiseConfig noise;
};

/// Uniform draws inside each range; SNR lower bounds are clamped to >= 5.
/// SNR pairs whose noise law is not positive on [0, operating_max] are
/// redrawn, so variable recipes sample the valid part of their ranges.
SampledDegradation sample_config(const DegradationConfig& cfg, std::uint64_t seed,
                                 double operating_max = 163.84);

}  // namespace convbeers
