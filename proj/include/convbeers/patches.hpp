#pragma once

#include <vector>

#include "convbeers/image.hpp"

namespace convbeers {

/// Unweighted mean of three equally sized bands.
PanImage rgb_to_pan(const PanImage& r, const PanImage& g, const PanImage& b);

/// Row-major tiling; partial border patches are dropped.
std::vector<PanImage> extract_patches(const PanImage& img, int patch, int stride);

/// Number of patches extract_patches yields for a width x height image.
int patch_count(int width, int height, int patch, int stride);

}  // namespace convbeers
