#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace convbeers {

enum class Split { train, val, test };

std::string_view to_string(Split split);
Split split_from_string(std::string_view name);

/// One degraded/reference pair. Paths are stored relative to the manifest
/// file's directory.
struct ManifestEntry {
  std::string degraded;
  std::string reference;
  double mtf_nyq = 0;
  double snr0 = 0;
  double snr1 = 0;
  std::uint64_t seed = 0;
  int patch = 0;
  Split split = Split::train;

  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;  ///< directory the relative paths resolve against

  std::filesystem::path degraded_path(const ManifestEntry& e) const { return base_dir / e.degraded; }
  std::filesystem::path reference_path(const ManifestEntry& e) const { return base_dir / e.reference; }

  DatasetManifest filtered(Split split) const;
  std::size_t count(Split split) const;
};

/// JSON array of objects with keys degraded, reference, mtf_nyq, snr0, snr1,
/// seed, patch, split.
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Checks every pair exists and both images share dimensions (reads headers
/// through load_tiff). Returns human-readable violations; empty when valid.
std::vector<std::string> validate_manifest_files(const DatasetManifest& manifest);

}  // namespace convbeers
