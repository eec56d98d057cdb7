#include "convbeers/image.hpp"

#include <cmath>
#include <string>

#include "convbeers/error.hpp"

namespace convbeers {

PanImage::PanImage(int width, int height, std::vector<float> pixels,
                   double gsd, int bit_depth_hint)
    : width_(width),
      height_(height),
      pixels_(std::move(pixels)),
      gsd_(gsd),
      bit_depth_hint_(bit_depth_hint) {
  require(width > 0 && height > 0, ErrorCode::invalid_argument,
          "image dimensions must be positive");
  require(pixels_.size() == static_cast<std::size_t>(width) * height,
          ErrorCode::dimension_mismatch,
          "pixel count " + std::to_string(pixels_.size()) + " != " +
              std::to_string(width) + "x" + std::to_string(height));
  require(gsd > 0 && std::isfinite(gsd), ErrorCode::invalid_argument,
          "gsd must be positive");
  for (float v : pixels_) {
    require(std::isfinite(v) && v >= 0.0f, ErrorCode::numerical,
            "pixel values must be finite and non-negative");
  }
}

PanImage PanImage::uniform(int width, int height, float value, double gsd) {
  return PanImage(width, height,
                  std::vector<float>(static_cast<std::size_t>(width) * height,
                                     value),
                  gsd);
}

double PanImage::mean() const noexcept {
  if (pixels_.empty()) return 0.0;
  double sum = 0.0;
  for (float v : pixels_) sum += v;
  return sum / static_cast<double>(pixels_.size());
}

PanImage PanImage::crop(int x, int y, int w, int h) const {
  require(x >= 0 && y >= 0 && w > 0 && h > 0 && x + w <= width_ &&
              y + h <= height_,
          ErrorCode::invalid_argument, "crop window outside image");
  std::vector<float> out(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r) {
    const float* src = pixels_.data() + static_cast<std::size_t>(y + r) * width_ + x;
    std::copy(src, src + w, out.begin() + static_cast<std::ptrdiff_t>(r) * w);
  }
  return PanImage(w, h, std::move(out), gsd_, bit_depth_hint_);
}

PanImage PanImage::transposed() const {
  std::vector<float> out(pixels_.size());
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x)
      out[static_cast<std::size_t>(x) * height_ + y] = at(x, y);
  return PanImage(height_, width_, std::move(out), gsd_, bit_depth_hint_);
}

PanImage PanImage::with_gsd(double gsd) const {
  PanImage copy = *this;
  require(gsd > 0 && std::isfinite(gsd), ErrorCode::invalid_argument,
          "gsd must be positive");
  copy.gsd_ = gsd;
  return copy;
}

void RadiometricScale::validate() const {
  require(dn_max > 0, ErrorCode::invalid_argument, "dn_max must be positive");
  require(radiance_at_dn_max > 0 && std::isfinite(radiance_at_dn_max),
          ErrorCode::invalid_argument, "radiance_at_dn_max must be positive");
}

int RadiometricScale::to_dn(double radiance, bool* clamped) const noexcept {
  const double dn = std::nearbyint(radiance * dn_max / radiance_at_dn_max);
  if (clamped) *clamped = false;
  if (dn < 0) {
    if (clamped) *clamped = radiance < 0;
    return 0;
  }
  if (dn > dn_max) {
    if (clamped) *clamped = true;
    return dn_max;
  }
  if (clamped && radiance > radiance_at_dn_max) *clamped = true;
  return static_cast<int>(dn);
}

}  // namespace convbeers
