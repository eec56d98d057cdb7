#include "convbeers/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "convbeers/config_io.hpp"
#include "convbeers/error.hpp"
#include "convbeers/patches.hpp"
#include "convbeers/rng.hpp"
#include "convbeers/tiff_io.hpp"
#include "parallel.hpp"

namespace convbeers {

std::vector<std::filesystem::path> list_tiffs(const std::filesystem::path& dir) {
  require(std::filesystem::is_directory(dir), ErrorCode::io,
          "source directory " + dir.string() + " does not exist");
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".tif" || ext == ".tiff") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Split> assign_splits(std::size_t count, const SplitFractions& f, std::uint64_t seed) {
  require(f.train >= 0 && f.val >= 0 && f.test >= 0 &&
              std::abs(f.train + f.val + f.test - 1.0) < 1e-9,
          ErrorCode::config, "split fractions must be non-negative and sum to 1");
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, 0x73706C6974));
  rng.shuffle(order.begin(), order.end());
  const auto n_train = static_cast<std::size_t>(std::llround(f.train * static_cast<double>(count)));
  const auto n_val = std::min(count - std::min(count, n_train),
                              static_cast<std::size_t>(std::llround(f.val * static_cast<double>(count))));
  std::vector<Split> out(count, Split::test);
  for (std::size_t i = 0; i < count; ++i) {
    if (i < n_train) out[order[i]] = Split::train;
    else if (i < n_train + n_val) out[order[i]] = Split::val;
  }
  return out;
}

namespace {

struct SourceOutput {
  std::vector<ManifestEntry> entries;
};

}  // namespace

DatasetManifest build_dataset(const std::vector<std::filesystem::path>& sources,
                              const std::filesystem::path& out_dir,
                              const DatasetBuildOptions& o) {
  require(!sources.empty(), ErrorCode::invalid_argument, "dataset-build: no source images");
  o.degraded.validate();
  o.reference.validate();
  o.scale.validate();
  require(o.degraded.oversampling == o.reference.oversampling, ErrorCode::config,
          "dataset-build: degraded and reference configs must share the oversampling factor");
  require(o.patch >= 16, ErrorCode::config, "dataset-build: patch must be >= 16");
  const auto splits = assign_splits(sources.size(), o.split, o.seed);
  const int r = o.degraded.oversampling;
  for (const char* sub : {"degraded", "reference", "sidecars"})
    std::filesystem::create_directories(out_dir / sub);

  std::vector<SourceOutput> results(sources.size());
  detail::parallel_for(static_cast<int>(sources.size()), o.workers, [&](int idx) {
    const auto i = static_cast<std::size_t>(idx);
    const PanImage src = load_tiff(sources[i], o.scale);
    const std::uint64_t seed = derive_seed(o.seed, i);
    const auto deg_draw = sample_config(o.degraded, derive_seed(seed, 1), o.scale.radiance_at_dn_max);
    const auto ref_draw = sample_config(o.reference, derive_seed(seed, 2), o.scale.radiance_at_dn_max);
    DegradeOptions dopt;
    dopt.operating_max = o.scale.radiance_at_dn_max;
    const auto deg = degrade(src, deg_draw.mtf, deg_draw.noise, r, derive_seed(seed, 3), dopt);
    const auto ref = degrade(src, ref_draw.mtf, ref_draw.noise, r, derive_seed(seed, 4), dopt);
    require(deg.image.same_shape(ref.image), ErrorCode::dimension_mismatch,
            "dataset-build: misaligned pair dimensions for " + sources[i].string());
    require(deg.image.width() >= o.patch && deg.image.height() >= o.patch,
            ErrorCode::invalid_argument,
            "dataset-build: " + sources[i].string() + " is smaller than one patch after downsampling");

    char stem[32];
    std::snprintf(stem, sizeof(stem), "src%04zu", i);
    Json side;
    side["source"] = sources[i].filename().string();
    side["split"] = std::string(to_string(splits[i]));
    side["degraded"] = applied_to_json(deg.applied);
    side["reference"] = applied_to_json(ref.applied);
    write_json_file(out_dir / "sidecars" / (std::string(stem) + ".json"), side);

    const auto dp = extract_patches(deg.image, o.patch, o.patch);
    const auto rp = extract_patches(ref.image, o.patch, o.patch);
    for (std::size_t k = 0; k < dp.size(); ++k) {
      char name[48];
      std::snprintf(name, sizeof(name), "%s_p%03zu.tif", stem, k);
      save_tiff(dp[k], out_dir / "degraded" / name, o.scale);
      save_tiff(rp[k], out_dir / "reference" / name, o.scale);
      ManifestEntry e;
      e.degraded = std::string("degraded/") + name;
      e.reference = std::string("reference/") + name;
      e.mtf_nyq = deg.applied.mtf_nyq;
      e.snr0 = deg.applied.noise.snr0;
      e.snr1 = deg.applied.noise.snr1;
      e.seed = seed;
      e.patch = o.patch;
      e.split = splits[i];
      results[i].entries.push_back(std::move(e));
    }
  });

  DatasetManifest m;
  m.base_dir = out_dir;
  for (auto& r : results)
    for (auto& e : r.entries) m.entries.push_back(std::move(e));
  save_manifest(m, out_dir / "manifest.json");
  return m;
}

}  // namespace convbeers
