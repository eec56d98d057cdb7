#pragma once

#include <cstdint>
#include <vector>

#include "convbeers/image.hpp"

namespace convbeers {

/// Ideal step edge through the frame centre, tilted `angle_deg` off vertical
/// (2..15 degrees, either sign), dark on the left. Pixels carry exact
/// area-weighted coverage.
PanImage render_slanted_edge(int size, double angle_deg, double low, double high);

/// Horizontal strip of square flat panels, one per radiance level.
PanImage render_flat_panels(const std::vector<double>& levels, int panel);

struct SceneOptions {
  int supersample = 4;      ///< sub-samples per axis for area weighting
  double max_radiance = 150.0;
  int shapes = 60;
};

/// Synthetic urban-like scene: smooth background, rotated rectangles of
/// uniform radiance, thin linear features and dots, weak texture. Deterministic
/// per seed.
PanImage render_scene(int width, int height, std::uint64_t seed,
                      const SceneOptions& options = {});

}  // namespace convbeers
