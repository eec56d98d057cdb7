#include "convbeers/manifest.hpp"

#include <fstream>

#include "convbeers/error.hpp"
#include "convbeers/tiff_io.hpp"
#include "json.hpp"

namespace convbeers {

using nlohmann::json;

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "train";
}

Split split_from_string(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "val") return Split::val;
  if (name == "test") return Split::test;
  throw Error(ErrorCode::config, "unknown split '" + std::string(name) + "'");
}

DatasetManifest DatasetManifest::filtered(Split split) const {
  DatasetManifest out;
  out.base_dir = base_dir;
  for (const auto& e : entries)
    if (e.split == split) out.entries.push_back(e);
  return out;
}

std::size_t DatasetManifest::count(Split split) const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.split == split ? 1 : 0;
  return n;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  json arr = json::array();
  for (const auto& e : manifest.entries) {
    arr.push_back(json{{"degraded", e.degraded},
                       {"reference", e.reference},
                       {"mtf_nyq", e.mtf_nyq},
                       {"snr0", e.snr0},
                       {"snr1", e.snr1},
                       {"seed", e.seed},
                       {"patch", e.patch},
                       {"split", std::string(to_string(e.split))}});
  }
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::io, "cannot write manifest '" + path.string() + "'");
  out << arr.dump(2) << '\n';
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::io, "cannot read manifest '" + path.string() + "'");
  json arr;
  try {
    arr = json::parse(in);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::format, "manifest '" + path.string() + "': " + ex.what());
  }
  require(arr.is_array(), ErrorCode::format, "manifest must be a JSON array");
  DatasetManifest m;
  m.base_dir = path.parent_path();
  for (const auto& o : arr) {
    try {
      ManifestEntry e;
      e.degraded = o.at("degraded").get<std::string>();
      e.reference = o.at("reference").get<std::string>();
      e.mtf_nyq = o.at("mtf_nyq").get<double>();
      e.snr0 = o.at("snr0").get<double>();
      e.snr1 = o.at("snr1").get<double>();
      e.seed = o.at("seed").get<std::uint64_t>();
      e.patch = o.at("patch").get<int>();
      e.split = split_from_string(o.at("split").get<std::string>());
      m.entries.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::format, "manifest '" + path.string() + "': " + ex.what());
    }
  }
  return m;
}

std::vector<std::string> validate_manifest_files(const DatasetManifest& manifest) {
  std::vector<std::string> problems;
  for (const auto& e : manifest.entries) {
    const auto d = manifest.degraded_path(e), r = manifest.reference_path(e);
    if (!std::filesystem::exists(d)) {
      problems.push_back("missing degraded image " + d.string());
      continue;
    }
    if (!std::filesystem::exists(r)) {
      problems.push_back("missing reference image " + r.string());
      continue;
    }
    const DnRaster a = read_dn_raster(d), b = read_dn_raster(r);
    if (a.width != b.width || a.height != b.height)
      problems.push_back("dimension mismatch between " + d.string() + " and " + r.string());
  }
  return problems;
}

}  // namespace convbeers
