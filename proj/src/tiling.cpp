#include "convbeers/tiling.hpp"

#include <algorithm>

#include "convbeers/error.hpp"
#include "parallel.hpp"

namespace convbeers {

std::vector<int> tile_origins(int length, int tile, int overlap) {
  if (length <= tile) return {0};
  const int stride = tile - overlap;
  std::vector<int> origins;
  for (int s = 0;; s += stride) {
    if (s + tile >= length) {
      origins.push_back(length - tile);
      break;
    }
    origins.push_back(s);
  }
  return origins;
}

namespace {

// Half-open [begin, end) span of output owned by tile i along one axis.
std::pair<int, int> owned_span(const std::vector<int>& origins, std::size_t i, int tile,
                               int length) {
  const int t = std::min(tile, length);
  const int begin = i == 0 ? 0 : (origins[i] + origins[i - 1] + t) / 2;
  const int end = i + 1 == origins.size() ? length : (origins[i + 1] + origins[i] + t) / 2;
  return {begin, end};
}

}  // namespace

Tensor infer_tiled(const NetworkParams& params, const Tensor& x, const TileOptions& o,
                   const ActivationHook<float>* hook) {
  require(o.tile >= 64, ErrorCode::invalid_argument, "infer_tiled: tile must be >= 64");
  require(o.overlap >= 16, ErrorCode::invalid_argument, "infer_tiled: overlap must be >= 16");
  require(o.tile - 2 * o.overlap > 0, ErrorCode::invalid_argument,
          "infer_tiled: tile - 2*overlap must be positive");
  require(x.batch() == 1 && x.channels() == 1, ErrorCode::dimension_mismatch,
          "infer_tiled: expected a (1,1,H,W) tensor, got " + x.shape_string());
  const int w = x.width(), h = x.height();
  if (w <= o.tile && h <= o.tile) return forward(params, x, 1, hook);

  const auto xs = tile_origins(w, o.tile, o.overlap);
  const auto ys = tile_origins(h, o.tile, o.overlap);
  const int tw = std::min(o.tile, w), th = std::min(o.tile, h);
  Tensor out(1, 1, h, w);
  const int count = static_cast<int>(xs.size() * ys.size());
  detail::parallel_for(count, o.workers, [&](int k) {
    const std::size_t iy = static_cast<std::size_t>(k) / xs.size();
    const std::size_t ix = static_cast<std::size_t>(k) % xs.size();
    const int x0 = xs[ix], y0 = ys[iy];
    Tensor tile(1, 1, th, tw);
    for (int y = 0; y < th; ++y)
      std::copy_n(x.data() + static_cast<std::size_t>(y0 + y) * w + x0, tw,
                  tile.data() + static_cast<std::size_t>(y) * tw);
    const Tensor r = forward(params, tile, 1, hook);
    const auto [bx, ex] = owned_span(xs, ix, o.tile, w);
    const auto [by, ey] = owned_span(ys, iy, o.tile, h);
    for (int y = by; y < ey; ++y)
      std::copy_n(r.data() + static_cast<std::size_t>(y - y0) * tw + (bx - x0), ex - bx,
                  out.data() + static_cast<std::size_t>(y) * w + bx);
  });
  return out;
}

PanImage restore_image(const NetworkParams& params, const PanImage& img, double scale,
                       const TileOptions& options, const ActivationHook<float>* hook) {
  const Tensor x = image_to_tensor(img, scale);
  const Tensor y = infer_tiled(params, x, options, hook);
  return tensor_to_image(y, 0, scale, img.gsd());
}

}  // namespace convbeers
