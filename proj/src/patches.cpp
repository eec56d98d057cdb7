#include "convbeers/patches.hpp"

#include "convbeers/error.hpp"

namespace convbeers {

PanImage rgb_to_pan(const PanImage& r, const PanImage& g, const PanImage& b) {
  require(r.same_shape(g) && r.same_shape(b), ErrorCode::dimension_mismatch,
          "rgb_to_pan: band sizes differ");
  std::vector<float> pan(r.size());
  const auto pr = r.pixels(), pg = g.pixels(), pb = b.pixels();
  for (std::size_t i = 0; i < pan.size(); ++i) {
    pan[i] = static_cast<float>((static_cast<double>(pr[i]) + pg[i] + pb[i]) / 3.0);
  }
  return PanImage(r.width(), r.height(), std::move(pan), r.gsd(), r.bit_depth_hint());
}

int patch_count(int width, int height, int patch, int stride) {
  if (patch > width || patch > height || patch <= 0 || stride < 1) return 0;
  return ((width - patch) / stride + 1) * ((height - patch) / stride + 1);
}

std::vector<PanImage> extract_patches(const PanImage& img, int patch, int stride) {
  require(patch > 0 && stride >= 1, ErrorCode::invalid_argument,
          "extract_patches: patch and stride must be positive");
  require(patch <= img.width() && patch <= img.height(), ErrorCode::invalid_argument,
          "extract_patches: patch larger than image");
  std::vector<PanImage> out;
  out.reserve(static_cast<std::size_t>(patch_count(img.width(), img.height(), patch, stride)));
  for (int y = 0; y + patch <= img.height(); y += stride)
    for (int x = 0; x + patch <= img.width(); x += stride)
      out.push_back(img.crop(x, y, patch, patch));
  return out;
}

}  // namespace convbeers
