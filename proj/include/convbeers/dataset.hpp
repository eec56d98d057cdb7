#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "convbeers/image.hpp"
#include "convbeers/manifest.hpp"
#include "convbeers/sensor_sim.hpp"

namespace convbeers {

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct DatasetBuildOptions {
  DegradationConfig degraded = sim_degraded_variable();
  DegradationConfig reference = sim_reference_fixed();
  int patch = 128;
  SplitFractions split;
  std::uint64_t seed = 0;
  int workers = 1;
  RadiometricScale scale;
};

/// Per source: degrade with a draw from `degraded` and with a draw from
/// `reference` (same oversampling), tile both into patch x patch pairs and
/// write them as TIFF under out_dir/{degraded,reference}, plus one sidecar
/// JSON per source under out_dir/sidecars. Sources are assigned whole to
/// train/val/test. Writes out_dir/manifest.json and returns it.
DatasetManifest build_dataset(const std::vector<std::filesystem::path>& sources,
                              const std::filesystem::path& out_dir,
                              const DatasetBuildOptions& options);

/// *.tif / *.tiff files in `dir`, sorted by name.
std::vector<std::filesystem::path> list_tiffs(const std::filesystem::path& dir);

/// Split label for each of `count` sources: a seeded shuffle, then the first
/// round(train*count) train, the next round(val*count) val, the rest test.
std::vector<Split> assign_splits(std::size_t count, const SplitFractions& fractions,
                                 std::uint64_t seed);

}  // namespace convbeers
