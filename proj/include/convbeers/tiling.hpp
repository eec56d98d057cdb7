#pragma once

#include "convbeers/image.hpp"
#include "convbeers/network.hpp"

namespace convbeers {

struct TileOptions {
  int tile = 256;
  int overlap = 32;
  int workers = 1;
};

/// Tile origins along one axis: stride tile - overlap, last tile flush
/// with the far edge. A single origin 0 when length <= tile.
std::vector<int> tile_origins(int length, int tile, int overlap);

/// Overlapping tiles run independently; each keeps its interior up to the
/// midpoint of every overlap (overlap/2 for regular spacing). Frames no
/// larger than a tile take one full-frame pass. Input and output are
/// normalized (1,1,H,W) tensors.
Tensor infer_tiled(const NetworkParams& params, const Tensor& x, const TileOptions& options = {},
                   const ActivationHook<float>* hook = nullptr);

/// Radiance in, radiance out: normalizes by `scale`, runs infer_tiled,
/// de-normalizes and clamps to >= 0.
PanImage restore_image(const NetworkParams& params, const PanImage& img, double scale,
                       const TileOptions& options = {},
                       const ActivationHook<float>* hook = nullptr);

}  // namespace convbeers
