#include "convbeers/quality.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "convbeers/error.hpp"

namespace convbeers {
namespace {

constexpr int kOversample = 4;
constexpr int kEsfHalfWidth = 16;  // pixels either side of the edge
constexpr double kMinAngleDeg = 2.0;
constexpr double kMaxAngleDeg = 15.0;
constexpr double kAngleSlackDeg = 0.1;

void require_same_shape(const PanImage& x, const PanImage& y, const char* what) {
  require(x.same_shape(y), ErrorCode::dimension_mismatch,
          std::string(what) + ": dimension mismatch (" + std::to_string(x.width()) + "x" +
              std::to_string(x.height()) + " vs " + std::to_string(y.width()) + "x" +
              std::to_string(y.height()) + ")");
}

// Valid-mode separable filtering of a w x h field with a 1-D kernel.
std::vector<double> filter_valid(const std::vector<double>& in, int w, int h,
                                 const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int ow = w - n + 1, oh = h - n + 1;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0;
      for (int i = 0; i < n; ++i) acc += k[static_cast<std::size_t>(i)] * in[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0;
      for (int i = 0; i < n; ++i) acc += k[static_cast<std::size_t>(i)] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  return out;
}

struct LineFit {
  double a = 0;  // x at y = 0
  double b = 0;  // dx/dy
};

LineFit fit_line(const std::vector<double>& ys, const std::vector<double>& xs) {
  const double n = static_cast<double>(ys.size());
  double sy = 0, sx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    sy += ys[i];
    sx += xs[i];
    syy += ys[i] * ys[i];
    sxy += ys[i] * xs[i];
  }
  const double den = n * syy - sy * sy;
  LineFit f;
  f.b = den != 0 ? (n * sxy - sy * sx) / den : 0.0;
  f.a = (sx - f.b * sy) / n;
  return f;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

double psnr(const PanImage& x, const PanImage& y, double peak) {
  require_same_shape(x, y, "psnr");
  require(peak > 0, ErrorCode::invalid_argument, "psnr: peak must be positive");
  const auto a = x.pixels(), b = y.pixels();
  double se = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.size());
  if (mse < peak * peak * 1e-10) return kPsnrCapDb;
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const PanImage& x, const PanImage& y, double peak) {
  require_same_shape(x, y, "ssim");
  require(peak > 0, ErrorCode::invalid_argument, "ssim: peak must be positive");
  constexpr int kWin = 11;
  constexpr double kSigma = 1.5;
  require(x.width() >= kWin && x.height() >= kWin, ErrorCode::invalid_argument,
          "ssim: image smaller than the 11x11 window");
  std::vector<double> g(kWin);
  double gs = 0;
  for (int i = 0; i < kWin; ++i) {
    const double d = i - kWin / 2;
    g[static_cast<std::size_t>(i)] = std::exp(-d * d / (2 * kSigma * kSigma));
    gs += g[static_cast<std::size_t>(i)];
  }
  for (double& v : g) v /= gs;

  const int w = x.width(), h = x.height();
  const auto px = x.pixels(), py = y.pixels();
  std::vector<double> a(px.begin(), px.end()), b(py.begin(), py.end());
  std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto mu_a = filter_valid(a, w, h, g), mu_b = filter_valid(b, w, h, g);
  const auto e_aa = filter_valid(aa, w, h, g), e_bb = filter_valid(bb, w, h, g),
             e_ab = filter_valid(ab, w, h, g);
  const double c1 = (0.01 * peak) * (0.01 * peak), c2 = (0.03 * peak) * (0.03 * peak);
  double acc = 0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i], mb = mu_b[i];
    const double va = e_aa[i] - ma * ma, vb = e_bb[i] - mb * mb, cov = e_ab[i] - ma * mb;
    acc += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return acc / static_cast<double>(mu_a.size());
}

MtfCurve slanted_edge_mtf(const PanImage& img, const Roi& roi) {
  require(roi.inside(img), ErrorCode::invalid_argument, "slanted_edge_mtf: ROI outside image");
  require(roi.w >= 32 && roi.h >= 32, ErrorCode::invalid_argument,
          "slanted_edge_mtf: edge ROI must be at least 32x32");
  PanImage patch = img.crop(roi.x, roi.y, roi.w, roi.h);

  // Work on a near-vertical edge; transpose near-horizontal ones.
  double gx_energy = 0, gy_energy = 0;
  for (int y = 1; y + 1 < patch.height(); ++y)
    for (int x = 1; x + 1 < patch.width(); ++x) {
      gx_energy += std::abs(patch.at(x + 1, y) - patch.at(x - 1, y));
      gy_energy += std::abs(patch.at(x, y + 1) - patch.at(x, y - 1));
    }
  MtfCurve curve;
  if (gy_energy > gx_energy) {
    patch = patch.transposed();
    curve.transposed = true;
  }
  const int w = patch.width(), h = patch.height();

  // Row gradients, smoothed with [1 2 1] / 4 across x.
  std::vector<double> grad(static_cast<std::size_t>(w) * h, 0.0);
  double polarity = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 1; x + 1 < w; ++x) {
      const double g = 0.5 * (patch.at(x + 1, y) - patch.at(x - 1, y));
      grad[static_cast<std::size_t>(y) * w + x] = g;
      polarity += g;
    }
  const double sign = polarity >= 0 ? 1.0 : -1.0;
  auto g_at = [&](int x, int y) {
    const auto* row = grad.data() + static_cast<std::size_t>(y) * w;
    const double c = row[x];
    const double l = x > 1 ? row[x - 1] : c, r = x + 2 < w ? row[x + 1] : c;
    return sign * (0.25 * l + 0.5 * c + 0.25 * r);
  };

  // Pass 1: per-row argmax; noise scale from the median absolute gradient.
  std::vector<double> ys, xs, all_abs;
  all_abs.reserve(grad.size());
  for (double g : grad) all_abs.push_back(std::abs(g));
  const double noise = 1.4826 * median(all_abs) + 1e-12;
  std::vector<double> peaks;
  for (int y = 0; y < h; ++y) {
    int best = 1;
    double best_v = -1e300;
    for (int x = 1; x + 1 < w; ++x) {
      const double v = g_at(x, y);
      if (v > best_v) {
        best_v = v;
        best = x;
      }
    }
    peaks.push_back(best_v);
    ys.push_back(y);
    xs.push_back(best);
  }
  if (median(peaks) < 4.0 * noise)
    throw Error(ErrorCode::measurement, "slanted_edge_mtf: no edge found (gradient SNR too low)");
  LineFit fit = fit_line(ys, xs);
  {
    // Discard gross outliers before centroiding.
    std::vector<double> ys2, xs2;
    for (std::size_t i = 0; i < ys.size(); ++i)
      if (std::abs(xs[i] - (fit.a + fit.b * ys[i])) < 3.0) {
        ys2.push_back(ys[i]);
        xs2.push_back(xs[i]);
      }
    if (ys2.size() >= ys.size() / 2) fit = fit_line(ys2, xs2);
  }

  // Passes 2-3: windowed gradient centroids around the current line.
  for (int pass = 0; pass < 2; ++pass) {
    ys.clear();
    xs.clear();
    const int win = pass == 0 ? 8 : 6;
    for (int y = 0; y < h; ++y) {
      const int c = static_cast<int>(std::lround(fit.a + fit.b * y));
      double sw = 0, swx = 0;
      for (int x = std::max(1, c - win); x <= std::min(w - 2, c + win); ++x) {
        const double v = std::max(0.0, g_at(x, y));
        sw += v;
        swx += v * x;
      }
      if (sw > 0) {
        ys.push_back(y);
        xs.push_back(swx / sw);
      }
    }
    require(ys.size() >= static_cast<std::size_t>(h / 2), ErrorCode::measurement,
            "slanted_edge_mtf: edge not traceable across the ROI");
    fit = fit_line(ys, xs);
  }

  const double angle = std::atan(fit.b) * 180.0 / std::numbers::pi;
  curve.edge_angle_deg = angle;
  if (std::abs(angle) < kMinAngleDeg - kAngleSlackDeg ||
      std::abs(angle) > kMaxAngleDeg + kAngleSlackDeg)
    throw Error(ErrorCode::measurement, "slanted_edge_mtf: slant " + std::to_string(angle) +
                                            " deg outside the 2-15 deg validity range");

  // Edge-spread function on edge-normal distance at 4x oversampling.
  const int half = std::min(kEsfHalfWidth, w / 2 - 4);
  require(half >= 8, ErrorCode::measurement, "slanted_edge_mtf: ROI too narrow");
  const int nbins = 2 * half * kOversample;
  const double cos_t = 1.0 / std::sqrt(1.0 + fit.b * fit.b);
  std::vector<double> sum(static_cast<std::size_t>(nbins), 0.0);
  std::vector<int> count(static_cast<std::size_t>(nbins), 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double d = (x - (fit.a + fit.b * y)) * cos_t;
      const int bin = static_cast<int>(std::floor((d + half) * kOversample));
      if (bin < 0 || bin >= nbins) continue;
      sum[static_cast<std::size_t>(bin)] += patch.at(x, y);
      ++count[static_cast<std::size_t>(bin)];
    }
  std::vector<double> esf(static_cast<std::size_t>(nbins));
  std::vector<int> filled;
  for (int i = 0; i < nbins; ++i)
    if (count[static_cast<std::size_t>(i)] > 0) {
      esf[static_cast<std::size_t>(i)] = sign * sum[static_cast<std::size_t>(i)] / count[static_cast<std::size_t>(i)];
      filled.push_back(i);
    }
  require(filled.size() >= static_cast<std::size_t>(nbins) * 3 / 4, ErrorCode::measurement,
          "slanted_edge_mtf: too many empty ESF bins");
  // Linear interpolation over empty bins, flat extrapolation at the ends.
  for (int i = 0; i < nbins; ++i) {
    if (count[static_cast<std::size_t>(i)] > 0) continue;
    const auto hi = std::lower_bound(filled.begin(), filled.end(), i);
    if (hi == filled.begin()) {
      esf[static_cast<std::size_t>(i)] = esf[static_cast<std::size_t>(*hi)];
    } else if (hi == filled.end()) {
      esf[static_cast<std::size_t>(i)] = esf[static_cast<std::size_t>(filled.back())];
    } else {
      const int b = *hi, a = *(hi - 1);
      const double t = static_cast<double>(i - a) / (b - a);
      esf[static_cast<std::size_t>(i)] = (1 - t) * esf[static_cast<std::size_t>(a)] + t * esf[static_cast<std::size_t>(b)];
    }
  }

  // Contrast and monotonicity on the oriented (rising) ESF.
  const int plateau = std::max(4, nbins / 8);
  double lo = 0, hi = 0;
  for (int i = 0; i < plateau; ++i) {
    lo += esf[static_cast<std::size_t>(i)];
    hi += esf[static_cast<std::size_t>(nbins - 1 - i)];
  }
  lo /= plateau;
  hi /= plateau;
  const double contrast = hi - lo;
  const double level = std::max(std::abs(lo), std::abs(hi));
  if (!(contrast >= 0.1 * level) || contrast <= 0)
    throw Error(ErrorCode::measurement, "slanted_edge_mtf: edge contrast below 10% of peak");
  {
    double run_max = -1e300;
    for (int i = 0; i + kOversample <= nbins; ++i) {
      double m = 0;
      for (int j = 0; j < kOversample; ++j) m += esf[static_cast<std::size_t>(i + j)];
      m /= kOversample;
      run_max = std::max(run_max, m);
      if (m < run_max - 0.25 * contrast)
        throw Error(ErrorCode::measurement, "slanted_edge_mtf: non-monotonic ESF");
    }
  }

  // LSF, Hamming window centred on its peak, DFT up to 0.5 cycles/pixel.
  const int n = nbins;
  std::vector<double> lsf(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i + 1 < n; ++i) lsf[static_cast<std::size_t>(i)] = esf[static_cast<std::size_t>(i + 1)] - esf[static_cast<std::size_t>(i)];
  const int peak = static_cast<int>(std::max_element(lsf.begin(), lsf.end()) - lsf.begin());
  for (int i = 0; i < n; ++i)
    lsf[static_cast<std::size_t>(i)] *= 0.54 + 0.46 * std::cos(2 * std::numbers::pi * (i - peak) / n);

  const int kmax = n / (2 * kOversample);  // bin of 0.5 cycles/pixel
  curve.frequencies.resize(static_cast<std::size_t>(kmax + 1));
  curve.values.resize(static_cast<std::size_t>(kmax + 1));
  double dc = 0;
  for (int k = 0; k <= kmax; ++k) {
    double re = 0, im = 0;
    for (int i = 0; i < n; ++i) {
      const double ph = -2 * std::numbers::pi * k * i / n;
      re += lsf[static_cast<std::size_t>(i)] * std::cos(ph);
      im += lsf[static_cast<std::size_t>(i)] * std::sin(ph);
    }
    const double f = static_cast<double>(k) * kOversample / n;
    double mag = std::hypot(re, im);
    if (k == 0) dc = mag;
    // Undo the forward difference's sinc(f * bin width) attenuation.
    const double x = std::numbers::pi * f / kOversample;
    const double diff_gain = k == 0 ? 1.0 : std::sin(x) / x;
    curve.frequencies[static_cast<std::size_t>(k)] = f;
    curve.values[static_cast<std::size_t>(k)] = mag / diff_gain;
  }
  require(dc > 0, ErrorCode::measurement, "slanted_edge_mtf: degenerate LSF");
  for (double& v : curve.values) v /= dc;
  curve.mtf_at_nyquist = curve.values.back();
  return curve;
}

SnrEstimate variance_snr(const PanImage& img, const std::vector<Roi>& rois, double l0,
                         double l1) {
  require(rois.size() >= 3, ErrorCode::invalid_argument, "variance_snr: need at least 3 ROIs");
  SnrEstimate est;
  double min_mean = 1e300, max_mean = -1e300;
  bool any_noise = false;
  for (const Roi& r : rois) {
    require(r.inside(img), ErrorCode::invalid_argument, "variance_snr: ROI outside image");
    require(r.w >= 16 && r.h >= 16, ErrorCode::invalid_argument,
            "variance_snr: SNR ROI must be at least 16x16");
    double s = 0, ss = 0;
    const double n = static_cast<double>(r.w) * r.h;
    for (int y = r.y; y < r.y + r.h; ++y)
      for (int x = r.x; x < r.x + r.w; ++x) s += img.at(x, y);
    const double mean = s / n;
    for (int y = r.y; y < r.y + r.h; ++y)
      for (int x = r.x; x < r.x + r.w; ++x) {
        const double d = img.at(x, y) - mean;
        ss += d * d;
      }
    RoiStats st;
    st.mean = mean;
    st.std = std::sqrt(ss / (n - 1));
    st.snr = st.std > 0 ? std::min(kSnrCap, mean / st.std) : kSnrCap;
    any_noise = any_noise || st.std > 0;
    min_mean = std::min(min_mean, mean);
    max_mean = std::max(max_mean, mean);
    est.per_roi.push_back(st);
  }
  require(min_mean > 0 && max_mean >= 2.0 * min_mean, ErrorCode::invalid_argument,
          "variance_snr: insufficient luminance spread (need a 2x range of ROI means)");
  if (!any_noise) {
    est.noiseless = true;
    est.snr_at_l0 = est.snr_at_l1 = kSnrCap;
    return est;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(est.per_roi.size());
  for (const auto& st : est.per_roi) {
    const double v = st.std * st.std;
    sx += st.mean;
    sy += v;
    sxx += st.mean * st.mean;
    sxy += st.mean * v;
  }
  est.alpha_hat = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  est.beta_hat = (sy - est.alpha_hat * sx) / k;
  auto anchor = [&](double l) {
    const double var = est.alpha_hat * l + est.beta_hat;
    if (!(var > 0))
      throw Error(ErrorCode::measurement,
                  "variance_snr: fitted variance non-positive at L=" + std::to_string(l));
    return std::min(kSnrCap, l / std::sqrt(var));
  };
  est.snr_at_l0 = anchor(l0);
  est.snr_at_l1 = anchor(l1);
  return est;
}

PairMetrics evaluate_pair(const PanImage& candidate, const PanImage& reference, double peak,
                          std::optional<double> lpips, std::optional<double> dists) {
  require_same_shape(candidate, reference, "evaluate_pair");
  PairMetrics m;
  m.psnr_db = psnr(candidate, reference, peak);
  m.ssim = ssim(candidate, reference, peak);
  m.lpips = lpips;
  m.dists = dists;
  return m;
}

MetricSummary summarize(std::vector<PairMetrics> pairs) {
  MetricSummary s;
  s.pairs = std::move(pairs);
  if (s.pairs.empty()) return s;
  double lp = 0, di = 0;
  std::size_t nlp = 0, ndi = 0;
  for (const auto& p : s.pairs) {
    s.mean_psnr_db += p.psnr_db;
    s.mean_ssim += p.ssim;
    if (p.lpips) {
      lp += *p.lpips;
      ++nlp;
    }
    if (p.dists) {
      di += *p.dists;
      ++ndi;
    }
  }
  const double n = static_cast<double>(s.pairs.size());
  s.mean_psnr_db /= n;
  s.mean_ssim /= n;
  if (nlp) s.mean_lpips = lp / static_cast<double>(nlp);
  if (ndi) s.mean_dists = di / static_cast<double>(ndi);
  return s;
}

}  // namespace convbeers
