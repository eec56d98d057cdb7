#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "convbeers/image.hpp"

namespace convbeers {

/// Raw DN raster as stored on disk (one band, 16-bit).
struct DnRaster {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> dn;
};

/// Reads a baseline TIFF (8/16-bit unsigned, 1 or 3 samples, stripped or
/// tiled) and maps DN to radiance. RGB inputs are averaged to pan.
/// 8-bit samples are stretched to [0, dn_max] first.
PanImage load_tiff(const std::filesystem::path& path,
                   const RadiometricScale& scale = {});

struct SaveReport {
  std::size_t clamped = 0;  ///< pixels saturated at 0 or dn_max
};

/// Writes a single-band, 16-bit unsigned, little-endian, uncompressed TIFF.
SaveReport save_tiff(const PanImage& img, const std::filesystem::path& path,
                     const RadiometricScale& scale = {});

DnRaster read_dn_raster(const std::filesystem::path& path);
void write_dn_raster(const DnRaster& raster, const std::filesystem::path& path);

/// Radiance -> DN with the same clamping save_tiff applies.
DnRaster to_dn_raster(const PanImage& img, const RadiometricScale& scale,
                      std::size_t* clamped = nullptr);

}  // namespace convbeers

namespace convbeers {

/// The image as it reads back after save_tiff + load_tiff.
PanImage dn_roundtrip(const PanImage& img, const RadiometricScale& scale = {});

}  // namespace convbeers
