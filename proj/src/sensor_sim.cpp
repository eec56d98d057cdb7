#include "convbeers/sensor_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "convbeers/error.hpp"
#include "convbeers/fft.hpp"
#include "convbeers/rng.hpp"

namespace convbeers {
namespace {

// Half-sample symmetric reflection: ... b a | a b c ... c | c b ...
inline int reflect(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

std::vector<float> clamp_negative(std::vector<double>&& values, std::size_t* clamped) {
  std::vector<float> out(values.size());
  std::size_t n = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double v = values[i];
    if (v < 0) {
      v = 0;
      ++n;
    }
    out[i] = static_cast<float>(v);
  }
  if (clamped) *clamped = n;
  return out;
}

PanImage blur_direct(const PanImage& img, const Psf& psf, std::size_t* clamped) {
  const int w = img.width(), h = img.height(), k = psf.half();
  const auto px = img.pixels();
  std::vector<int> xi(static_cast<std::size_t>(w + 2 * k)), yi(static_cast<std::size_t>(h + 2 * k));
  for (int i = -k; i < w + k; ++i) xi[static_cast<std::size_t>(i + k)] = reflect(i, w);
  for (int i = -k; i < h + k; ++i) yi[static_cast<std::size_t>(i + k)] = reflect(i, h);
  std::vector<double> out(img.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int dy = -k; dy <= k; ++dy) {
        const std::size_t row = static_cast<std::size_t>(yi[static_cast<std::size_t>(y - dy + k)]) * w;
        const double* kr = psf.kernel.data() + static_cast<std::size_t>(dy + k) * psf.side;
        for (int dx = -k; dx <= k; ++dx)
          acc += kr[dx + k] * px[row + static_cast<std::size_t>(xi[static_cast<std::size_t>(x - dx + k)])];
      }
      out[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  return PanImage(w, h, clamp_negative(std::move(out), clamped), img.gsd(), img.bit_depth_hint());
}

// Circular convolution on the mirror-padded frame; the interior is free of
// wrap-around because the pad equals the kernel half-width.
PanImage blur_fft(const PanImage& img, const Psf& psf, std::size_t* clamped) {
  const int w = img.width(), h = img.height(), k = psf.half();
  const int pw = w + 2 * k, ph = h + 2 * k;
  ComplexGrid frame(static_cast<std::size_t>(pw) * ph);
  for (int y = 0; y < ph; ++y)
    for (int x = 0; x < pw; ++x)
      frame[static_cast<std::size_t>(y) * pw + x] = img.at(reflect(x - k, w), reflect(y - k, h));
  ComplexGrid kern(frame.size());
  for (int dy = -k; dy <= k; ++dy)
    for (int dx = -k; dx <= k; ++dx)
      kern[static_cast<std::size_t>((dy + ph) % ph) * pw + (dx + pw) % pw] = psf.at(dx, dy);
  ComplexGrid fi = fft2(frame, pw, ph, FftDirection::forward);
  const ComplexGrid fk = fft2(kern, pw, ph, FftDirection::forward);
  for (std::size_t i = 0; i < fi.size(); ++i) fi[i] *= fk[i];
  const ComplexGrid conv = fft2(fi, pw, ph, FftDirection::inverse);
  const double norm = 1.0 / (static_cast<double>(pw) * ph);
  std::vector<double> out(img.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out[static_cast<std::size_t>(y) * w + x] =
          conv[static_cast<std::size_t>(y + k) * pw + (x + k)].real() * norm;
  return PanImage(w, h, clamp_negative(std::move(out), clamped), img.gsd(), img.bit_depth_hint());
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> g(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    g[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += g[static_cast<std::size_t>(i + radius)];
  }
  for (double& v : g) v /= sum;
  return g;
}

}  // namespace

double sinc(double f) noexcept {
  if (f == 0.0) return 1.0;
  const double x = std::numbers::pi * f;
  return std::sin(x) / x;
}

double gamma_from_nyquist(const MtfConfig& cfg, double nyquist_gain) {
  require(nyquist_gain > 0 && nyquist_gain <= 1, ErrorCode::invalid_argument,
          "gamma_from_nyquist: gain must be in (0, 1]");
  require(cfg.mtf_nyq > 0 && std::isfinite(cfg.mtf_nyq), ErrorCode::invalid_argument,
          "mtf_nyq must be positive");
  const double ceiling = kDetectorNyquistMtf * nyquist_gain;
  // Equality is the detector-only system (gamma = 0).
  require(cfg.mtf_nyq <= ceiling * (1 + 1e-12), ErrorCode::invalid_argument,
          "mtf_nyq " + std::to_string(cfg.mtf_nyq) + " >= " + std::to_string(ceiling) +
              ": no exponential decay needed");
  return std::max(0.0, 2.0 * std::log(ceiling / cfg.mtf_nyq));
}

MtfGrid build_mtf_grid(const MtfConfig& cfg, int width, int height, int oversampling) {
  require(width >= 8 && height >= 8, ErrorCode::invalid_argument,
          "build_mtf_grid: grid must be at least 8x8");
  require(oversampling >= 1, ErrorCode::invalid_argument, "oversampling must be >= 1");
  MtfGrid grid;
  grid.width = width;
  grid.height = height;
  grid.oversampling = oversampling;
  grid.gamma = gamma_from_nyquist(cfg, oversampling > 1 ? kAntiAliasNyquistGain : 1.0);
  grid.values.resize(static_cast<std::size_t>(width) * height);
  std::vector<double> fx(static_cast<std::size_t>(width)), sx(fx.size());
  for (int k = 0; k < width; ++k) {
    fx[static_cast<std::size_t>(k)] = oversampling * dft_frequency(k, width);
    sx[static_cast<std::size_t>(k)] = sinc(fx[static_cast<std::size_t>(k)]);
  }
  for (int ky = 0; ky < height; ++ky) {
    const double fy = oversampling * dft_frequency(ky, height);
    const double sy = sinc(fy);
    for (int kx = 0; kx < width; ++kx) {
      const double f = fx[static_cast<std::size_t>(kx)];
      grid.values[static_cast<std::size_t>(ky) * width + kx] =
          std::exp(-grid.gamma * std::hypot(f, fy)) * sx[static_cast<std::size_t>(kx)] * sy;
    }
  }
  return grid;
}

Psf psf_from_mtf(const MtfGrid& grid, int support) {
  require(support % 2 == 1 && support >= 7, ErrorCode::invalid_argument,
          "psf support must be odd and >= 7");
  require(support <= std::min(grid.width, grid.height), ErrorCode::invalid_argument,
          "psf support exceeds the MTF grid");
  ComplexGrid spectrum(grid.values.begin(), grid.values.end());
  const ComplexGrid spatial = fft2(spectrum, grid.width, grid.height, FftDirection::inverse);
  const double norm = 1.0 / (static_cast<double>(grid.width) * grid.height);

  double peak = 0, max_imag = 0, total_energy = 0;
  for (const auto& c : spatial) {
    peak = std::max(peak, std::abs(c.real()) * norm);
    max_imag = std::max(max_imag, std::abs(c.imag()) * norm);
    total_energy += c.real() * c.real() * norm * norm;
  }
  require(max_imag < 1e-8 * peak, ErrorCode::numerical,
          "psf_from_mtf: imaginary residue " + std::to_string(max_imag) +
              " indicates an asymmetric MTF grid");

  Psf psf;
  psf.side = support;
  psf.kernel.resize(static_cast<std::size_t>(support) * support);
  const int h = support / 2;
  double kept_energy = 0, sum = 0;
  for (int dy = -h; dy <= h; ++dy) {
    for (int dx = -h; dx <= h; ++dx) {
      const int sx = (dx + grid.width) % grid.width;
      const int sy = (dy + grid.height) % grid.height;
      const double v = spatial[static_cast<std::size_t>(sy) * grid.width + sx].real() * norm;
      psf.kernel[static_cast<std::size_t>(dy + h) * support + (dx + h)] = v;
      kept_energy += v * v;
      sum += v;
    }
  }
  psf.retained_energy = kept_energy / total_energy;
  require(psf.retained_energy >= 0.99, ErrorCode::numerical,
          "psf_from_mtf: support " + std::to_string(support) + " keeps only " +
              std::to_string(100 * psf.retained_energy) + "% of the kernel energy");
  for (double& v : psf.kernel) v /= sum;
  return psf;
}

int default_psf_support(int oversampling) {
  require(oversampling >= 1, ErrorCode::invalid_argument, "oversampling must be >= 1");
  const int s = 15 * oversampling;
  return s % 2 == 1 ? s : s + 1;
}

Psf make_psf(const MtfConfig& cfg, int oversampling, int support) {
  if (support == 0) support = default_psf_support(oversampling);
  int side = std::max(128, 16 * support);
  side += side % 2;
  return psf_from_mtf(build_mtf_grid(cfg, side, side, oversampling), support);
}

PanImage apply_blur(const PanImage& img, const Psf& psf, std::size_t* clamped) {
  return apply_blur(img, psf, BlurMethod::automatic, clamped);
}

PanImage apply_blur(const PanImage& img, const Psf& psf, BlurMethod method,
                    std::size_t* clamped) {
  require(psf.side % 2 == 1 &&
              psf.kernel.size() == static_cast<std::size_t>(psf.side) * psf.side,
          ErrorCode::invalid_argument, "apply_blur: malformed PSF");
  require(img.width() > psf.side && img.height() > psf.side, ErrorCode::invalid_argument,
          "apply_blur: image must be larger than the PSF support");
  if (method == BlurMethod::automatic)
    method = psf.side > 21 ? BlurMethod::fft : BlurMethod::direct;
  return method == BlurMethod::fft ? blur_fft(img, psf, clamped) : blur_direct(img, psf, clamped);
}

double antialias_sigma(int r) noexcept {
  return r * std::sqrt(2.0 * std::numbers::ln2) / std::numbers::pi;
}

PanImage downsample_gsd(const PanImage& img, int r) {
  require(r >= 1, ErrorCode::invalid_argument, "downsample_gsd: r must be >= 1");
  require(img.width() >= r && img.height() >= r, ErrorCode::invalid_argument,
          "downsample_gsd: image smaller than r");
  if (r == 1) return img;
  const int w = img.width(), h = img.height();
  const std::vector<double> g = gaussian_kernel(antialias_sigma(r));
  const int radius = static_cast<int>(g.size() / 2);
  const int ow = w / r, oh = h / r, off = r / 2;

  // Only the sampled rows/columns of the separable filter are needed.
  std::vector<double> rows(static_cast<std::size_t>(oh) * w);
  for (int oy = 0; oy < oh; ++oy) {
    const int y = off + r * oy;
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int t = -radius; t <= radius; ++t)
        acc += g[static_cast<std::size_t>(t + radius)] * img.at(x, reflect(y + t, h));
      rows[static_cast<std::size_t>(oy) * w + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      const int x = off + r * ox;
      double acc = 0;
      for (int t = -radius; t <= radius; ++t)
        acc += g[static_cast<std::size_t>(t + radius)] *
               rows[static_cast<std::size_t>(oy) * w + reflect(x + t, w)];
      out[static_cast<std::size_t>(oy) * ow + ox] = acc;
    }
  }
  return PanImage(ow, oh, clamp_negative(std::move(out), nullptr), img.gsd() * r,
                  img.bit_depth_hint());
}

double NoiseParams::sigma(double luminance) const noexcept {
  return std::sqrt(std::max(0.0, variance(luminance)));
}

double NoiseParams::snr(double luminance) const noexcept {
  const double s = sigma(luminance);
  return s > 0 ? luminance / s : std::numeric_limits<double>::infinity();
}

NoiseParams calibrate_noise(const NoiseConfig& cfg, double operating_max) {
  require(cfg.l0 > 0 && cfg.l1 > 0 && cfg.snr0 > 0 && cfg.snr1 > 0,
          ErrorCode::invalid_argument, "noise config values must be positive");
  require(cfg.l0 != cfg.l1, ErrorCode::invalid_argument,
          "noise config: l0 and l1 must differ");
  const double s0 = cfg.l0 / cfg.snr0, s1 = cfg.l1 / cfg.snr1;
  NoiseParams p;
  p.alpha = (s1 * s1 - s0 * s0) / (cfg.l1 - cfg.l0);
  p.beta = s0 * s0 - p.alpha * cfg.l0;
  // Linear in L, so the extremes of the operating range decide.
  require(p.variance(0) > 0 && p.variance(operating_max) > 0, ErrorCode::calibration,
          "noise calibration yields non-positive variance on [0, " +
              std::to_string(operating_max) + "] (alpha=" + std::to_string(p.alpha) +
              ", beta=" + std::to_string(p.beta) + ")");
  return p;
}

PanImage apply_noise(const PanImage& img, const NoiseParams& params, std::uint64_t seed,
                     std::size_t* clamped) {
  if (clamped) *clamped = 0;
  if (params.alpha == 0 && params.beta == 0) return img;
  Rng rng(seed);
  const auto px = img.pixels();
  std::vector<double> out(px.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double var = params.variance(px[i]);
    if (var < 0)
      throw Error(ErrorCode::numerical, "apply_noise: negative variance at luminance " +
                                            std::to_string(px[i]));
    out[i] = px[i] + std::sqrt(var) * rng.normal();
  }
  return PanImage(img.width(), img.height(), clamp_negative(std::move(out), clamped), img.gsd(),
                  img.bit_depth_hint());
}

DegradeResult degrade(const PanImage& img, const MtfConfig& mtf, const NoiseConfig& noise,
                      int r, std::uint64_t seed, const DegradeOptions& options) {
  require(r >= 1, ErrorCode::invalid_argument, "degrade: r must be >= 1");
  DegradeResult result;
  AppliedParams& a = result.applied;
  a.mtf_nyq = mtf.mtf_nyq;
  a.oversampling = r;
  a.noise = noise;
  a.seed = seed;
  a.psf_support = options.psf_support ? options.psf_support : default_psf_support(r);
  a.noise_params = calibrate_noise(noise, options.operating_max);

  const Psf psf = make_psf(mtf, r, a.psf_support);
  a.gamma = gamma_from_nyquist(mtf, r > 1 ? kAntiAliasNyquistGain : 1.0);
  const PanImage blurred = apply_blur(img, psf, &a.blur_clamped);
  const PanImage sampled = downsample_gsd(blurred, r);
  result.image = apply_noise(sampled, a.noise_params, seed, &a.noise_clamped);
  return result;
}

}  // namespace convbeers
