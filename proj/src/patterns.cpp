#include "convbeers/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "convbeers/error.hpp"
#include "convbeers/rng.hpp"

namespace convbeers {
namespace {

// Antiderivative of clamp(v, 0, 1).
double clamp_integral(double v) {
  if (v <= 0) return 0.0;
  if (v >= 1) return v - 0.5;
  return 0.5 * v * v;
}

// Mean of clamp(v(u), 0, 1) for v linear from v0 (u=0) to v1 (u=1).
double mean_clamped_linear(double v0, double v1) {
  if (std::abs(v1 - v0) < 1e-12) return std::clamp(v0, 0.0, 1.0);
  return (clamp_integral(v1) - clamp_integral(v0)) / (v1 - v0);
}

}  // namespace

PanImage render_slanted_edge(int size, double angle_deg, double low, double high) {
  require(size >= 64, ErrorCode::invalid_argument, "slanted edge: size must be >= 64");
  require(std::abs(angle_deg) >= 2.0 && std::abs(angle_deg) <= 15.0,
          ErrorCode::invalid_argument,
          "slanted edge: angle must be within 2..15 degrees off vertical");
  require(low < high || low == high, ErrorCode::invalid_argument,
          "slanted edge: low must not exceed high");
  require(low >= 0, ErrorCode::invalid_argument, "slanted edge: negative radiance");

  const double slope = std::tan(angle_deg * std::numbers::pi / 180.0);
  const double c = size / 2.0;
  std::vector<float> px(static_cast<std::size_t>(size) * size);
  for (int j = 0; j < size; ++j) {
    // Edge x position at the top and bottom of the pixel row.
    const double e0 = c + (j - c) * slope;
    const double e1 = c + (j + 1 - c) * slope;
    for (int i = 0; i < size; ++i) {
      // Fraction of the pixel right of the edge: mean over the row of
      // clamp(i + 1 - x_edge, 0, 1).
      const double cover = mean_clamped_linear(i + 1 - e0, i + 1 - e1);
      px[static_cast<std::size_t>(j) * size + i] =
          static_cast<float>(low + (high - low) * cover);
    }
  }
  return PanImage(size, size, std::move(px));
}

PanImage render_flat_panels(const std::vector<double>& levels, int panel) {
  require(!levels.empty() && panel > 0, ErrorCode::invalid_argument,
          "flat panels: need at least one level and a positive size");
  const int w = panel * static_cast<int>(levels.size());
  std::vector<float> px(static_cast<std::size_t>(w) * panel);
  for (int y = 0; y < panel; ++y)
    for (int x = 0; x < w; ++x)
      px[static_cast<std::size_t>(y) * w + x] = static_cast<float>(levels[x / panel]);
  return PanImage(w, panel, std::move(px));
}

PanImage render_scene(int width, int height, std::uint64_t seed,
                      const SceneOptions& options) {
  require(width > 0 && height > 0 && options.supersample >= 1,
          ErrorCode::invalid_argument, "render_scene: bad dimensions");
  Rng rng(seed);
  const int s = options.supersample;
  const int sw = width * s, sh = height * s;
  const double top = options.max_radiance;

  // Background: a few low-frequency cosines around a random mean.
  const double base = rng.uniform(0.2, 0.55) * top;
  struct Wave { double fx, fy, phase, amp; };
  std::vector<Wave> waves(4);
  for (auto& w : waves) {
    const double theta = rng.uniform(0, 2 * std::numbers::pi);
    const double f = rng.uniform(0.002, 0.02);
    w = {f * std::cos(theta), f * std::sin(theta), rng.uniform(0, 2 * std::numbers::pi),
         rng.uniform(0.02, 0.08) * top};
  }
  std::vector<float> fine(static_cast<std::size_t>(sw) * sh);
  for (int y = 0; y < sh; ++y) {
    for (int x = 0; x < sw; ++x) {
      const double px = (x + 0.5) / s, py = (y + 0.5) / s;
      double v = base;
      for (const auto& w : waves)
        v += w.amp * std::cos(2 * std::numbers::pi * (w.fx * px + w.fy * py) + w.phase);
      fine[static_cast<std::size_t>(y) * sw + x] = static_cast<float>(v);
    }
  }

  // Painter's algorithm over oriented rectangles (buildings, fields, roads).
  const double span = std::max(width, height);
  for (int k = 0; k < options.shapes; ++k) {
    const double kind = rng.uniform();
    double half_w, half_h;
    if (kind < 0.6) {  // blocks
      half_w = rng.uniform(0.01, 0.08) * span;
      half_h = rng.uniform(0.01, 0.08) * span;
    } else if (kind < 0.85) {  // linear features
      half_w = rng.uniform(0.1, 0.5) * span;
      half_h = rng.uniform(0.4, 2.5);
    } else {  // small details
      half_w = rng.uniform(0.5, 2.5);
      half_h = rng.uniform(0.5, 2.5);
    }
    const double cx = rng.uniform(0, width), cy = rng.uniform(0, height);
    const double theta = rng.uniform(0, std::numbers::pi);
    const double level = rng.uniform(0.03, 1.0) * top;
    const double ct = std::cos(theta), st = std::sin(theta);
    const double reach = std::hypot(half_w, half_h);
    const int x0 = std::max(0, static_cast<int>((cx - reach) * s));
    const int x1 = std::min(sw, static_cast<int>((cx + reach) * s) + 1);
    const int y0 = std::max(0, static_cast<int>((cy - reach) * s));
    const int y1 = std::min(sh, static_cast<int>((cy + reach) * s) + 1);
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        const double dx = (x + 0.5) / s - cx, dy = (y + 0.5) / s - cy;
        const double u = dx * ct + dy * st, v = -dx * st + dy * ct;
        if (std::abs(u) <= half_w && std::abs(v) <= half_h)
          fine[static_cast<std::size_t>(y) * sw + x] = static_cast<float>(level);
      }
    }
  }

  // Weak multiplicative texture at the native pixel scale, then box-average.
  std::vector<float> px(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0;
      for (int j = 0; j < s; ++j)
        for (int i = 0; i < s; ++i)
          acc += fine[static_cast<std::size_t>(y * s + j) * sw + (x * s + i)];
      const double texture = 1.0 + 0.03 * (rng.uniform() - 0.5);
      px[static_cast<std::size_t>(y) * width + x] =
          static_cast<float>(std::clamp(acc / (s * s) * texture, 0.0, top));
    }
  }
  return PanImage(width, height, std::move(px));
}

}  // namespace convbeers
