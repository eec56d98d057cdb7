#include <cmath>

#include "convbeers/manifest.hpp"
#include "convbeers/patches.hpp"
#include "convbeers/tiff_io.hpp"
#include "helpers.hpp"

using namespace convbeers;
using testing::TempDir;

TEST_CASE("PanImage rejects malformed rasters") {
  CHECK_THROWS_AS(PanImage(2, 2, {1, 2, 3}), Error);
  CHECK_THROWS_AS(PanImage(2, 2, {1, 2, 3, -1}), Error);
  CHECK_THROWS_AS(PanImage(2, 2, {1, 2, 3, NAN}), Error);
  CHECK_THROWS_AS(PanImage(2, 2, {1, 2, 3, 4}, 0.0), Error);
  const PanImage ok(2, 2, {1, 2, 3, 4});
  CHECK(ok.mean() == doctest::Approx(2.5));
}

TEST_CASE("crop and transpose") {
  const PanImage img(3, 2, {0, 1, 2, 3, 4, 5});
  const PanImage c = img.crop(1, 0, 2, 2);
  CHECK(c.at(0, 0) == 1);
  CHECK(c.at(1, 1) == 5);
  const PanImage t = img.transposed();
  CHECK(t.width() == 2);
  CHECK(t.at(1, 2) == img.at(2, 1));
  CHECK_THROWS_AS(img.crop(2, 0, 2, 2), Error);
}

TEST_CASE("DN mapping is nearest and clamped") {
  const RadiometricScale s;
  bool clamped = false;
  CHECK(s.to_dn(s.to_radiance(1234), &clamped) == 1234);
  CHECK_FALSE(clamped);
  CHECK(s.to_dn(1e6, &clamped) == s.dn_max);
  CHECK(clamped);
  CHECK(s.to_dn(-3, &clamped) == 0);
  CHECK(clamped);
}

TEST_CASE("16-bit TIFF round trip keeps DNs exactly") {
  TempDir dir("tiff");
  DnRaster r{5, 3, {}};
  for (int i = 0; i < 15; ++i) r.dn.push_back(static_cast<std::uint16_t>(i * 273));
  write_dn_raster(r, dir / "a.tif");
  const DnRaster back = read_dn_raster(dir / "a.tif");
  CHECK(back.width == 5);
  CHECK(back.height == 3);
  CHECK(back.dn == r.dn);
}

TEST_CASE("dn_roundtrip equals save then load") {
  TempDir dir("dnrt");
  Rng rng(4);
  const PanImage img = testing::random_image(rng, 17, 9, 0, 170);
  save_tiff(img, dir / "x.tif");
  const PanImage loaded = load_tiff(dir / "x.tif");
  const PanImage rt = dn_roundtrip(img);
  for (std::size_t i = 0; i < img.size(); ++i) CHECK(rt.pixels()[i] == loaded.pixels()[i]);
}

TEST_CASE("save reports clamped pixels") {
  TempDir dir("clamp");
  const PanImage img(2, 1, {10.f, 500.f});
  CHECK(save_tiff(img, dir / "c.tif").clamped == 1);
}

TEST_CASE("missing or foreign files are errors") {
  TempDir dir("bad");
  CHECK(testing::error_code_of([&] { load_tiff(dir / "none.tif"); }) == ErrorCode::io);
  std::ofstream(dir / "junk.tif") << "not a tiff";
  CHECK_THROWS_AS(load_tiff(dir / "junk.tif"), Error);
}

TEST_CASE("rgb_to_pan is the band mean") {
  const PanImage r(1, 1, {3}), g(1, 1, {6}), b(1, 1, {9});
  CHECK(rgb_to_pan(r, g, b).at(0, 0) == doctest::Approx(6));
}

TEST_CASE("patch extraction drops partial borders") {
  Rng rng(1);
  const PanImage img = testing::random_image(rng, 300, 260, 0, 1);
  const auto p = extract_patches(img, 128, 128);
  CHECK(p.size() == 4);
  CHECK(patch_count(300, 260, 128, 128) == 4);
  CHECK(p[3].at(5, 7) == img.at(128 + 5, 128 + 7));
}

TEST_CASE("manifest save/load round trip") {
  TempDir dir("manifest");
  DatasetManifest m;
  m.entries.push_back({"degraded/a.tif", "reference/a.tif", 0.05, 40, 120, 7, 128, Split::val});
  m.entries.push_back({"degraded/b.tif", "reference/b.tif", 0.03, 20, 90, 8, 128, Split::test});
  save_manifest(m, dir / "manifest.json");
  const DatasetManifest back = load_manifest(dir / "manifest.json");
  CHECK(back.entries == m.entries);
  CHECK(back.count(Split::val) == 1);
  CHECK(back.degraded_path(back.entries[0]) == dir.path() / "degraded/a.tif");
  CHECK_FALSE(validate_manifest_files(back).empty());
  CHECK(split_from_string(to_string(Split::test)) == Split::test);
}
