#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace convbeers {

/// Single-band radiance raster (W/m^2/sr/um), row-major. Immutable once
/// built; every operation returns a new image.
class PanImage {
 public:
  PanImage() = default;

  /// Validates the raster: pixels.size() == width*height, finite, >= 0, gsd > 0.
  PanImage(int width, int height, std::vector<float> pixels, double gsd = 1.0,
           int bit_depth_hint = 12);

  static PanImage uniform(int width, int height, float value, double gsd = 1.0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double gsd() const noexcept { return gsd_; }
  int bit_depth_hint() const noexcept { return bit_depth_hint_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  float at(int x, int y) const noexcept {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::span<const float> pixels() const noexcept { return pixels_; }

  double mean() const noexcept;

  bool same_shape(const PanImage& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  /// Copy of the given window. The window must lie inside the image.
  PanImage crop(int x, int y, int w, int h) const;

  PanImage transposed() const;

  PanImage with_gsd(double gsd) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> pixels_;
  double gsd_ = 1.0;
  int bit_depth_hint_ = 12;
};

/// Linear DN <-> radiance map for 12-bit payloads.
struct RadiometricScale {
  int dn_max = 4095;
  double radiance_at_dn_max = 163.84;

  void validate() const;

  double to_radiance(double dn) const noexcept {
    return dn * radiance_at_dn_max / dn_max;
  }
  /// Nearest DN, clamped to [0, dn_max]. Sets *clamped when clamping happened.
  int to_dn(double radiance, bool* clamped = nullptr) const noexcept;
};

}  // namespace convbeers
