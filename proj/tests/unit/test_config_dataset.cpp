#include <map>
#include <set>

#include "convbeers/config_io.hpp"
#include "convbeers/dataset.hpp"
#include "convbeers/patterns.hpp"
#include "convbeers/tiff_io.hpp"
#include "helpers.hpp"

using namespace convbeers;
using testing::TempDir;

TEST_CASE("unknown config keys are rejected") {
  CHECK(testing::error_code_of([] {
          degradation_from_json(Json{{"mtf_nyq", 0.05}, {"bogus", 1}});
        }) == ErrorCode::config);
  CHECK(testing::error_code_of([] { train_config_from_json(Json{{"epoch", 3}}); }) == ErrorCode::config);
}

TEST_CASE("every config violation is listed") {
  try {
    degradation_from_json(Json{{"mtf_range", {0.09, 0.01}}, {"oversampling", 0}, {"snr0", -1}});
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("mtf") != std::string::npos);
    CHECK(msg.find("oversampling") != std::string::npos);
    CHECK(msg.find("snr0") != std::string::npos);
  }
}

TEST_CASE("presets and JSON round trip") {
  const DegradationConfig v = degradation_preset("sim-degraded-variable");
  CHECK(v.mtf_range == sim_degraded_variable().mtf_range);
  CHECK_THROWS_AS(degradation_preset("nope"), Error);
  const DegradationConfig back = degradation_from_json(degradation_to_json(v));
  CHECK(back.mtf_range == v.mtf_range);
  CHECK(back.snr0_range == v.snr0_range);
  CHECK(back.snr1_range == v.snr1_range);
  TrainConfig t;
  t.epochs = 3;
  t.lr = 2e-4;
  const TrainConfig t2 = train_config_from_json(train_config_to_json(t));
  CHECK(t2.epochs == 3);
  CHECK(t2.lr == 2e-4);
}

TEST_CASE("split assignment follows the fractions and is seeded") {
  const auto s = assign_splits(10, SplitFractions{}, 3);
  std::map<Split, int> n;
  for (Split x : s) ++n[x];
  CHECK(n[Split::train] == 8);
  CHECK(n[Split::val] == 1);
  CHECK(n[Split::test] == 1);
  CHECK(assign_splits(10, SplitFractions{}, 3) == s);
}

TEST_CASE("dataset build: aligned pairs, per-source splits, sidecars agree with the manifest") {
  TempDir dir("dataset");
  for (int i = 0; i < 10; ++i) save_tiff(render_scene(256, 256, 40 + i), dir / ("s" + std::to_string(i) + ".tif"));
  DatasetBuildOptions o;
  o.degraded.oversampling = 2;
  o.reference.oversampling = 2;
  o.patch = 64;
  o.seed = 9;
  const DatasetManifest m = build_dataset(list_tiffs(dir.path()), dir / "out", o);
  CHECK(m.entries.size() == 10 * 4);
  CHECK(validate_manifest_files(m).empty());

  std::map<std::string, std::set<Split>> split_of_source;
  for (const auto& e : m.entries) {
    const PanImage d = load_tiff(m.degraded_path(e)), r = load_tiff(m.reference_path(e));
    CHECK(d.same_shape(r));
    CHECK(d.width() == 64);
    const std::string src = std::filesystem::path(e.degraded).filename().string().substr(0, 7);
    split_of_source[src].insert(e.split);

    const Json side = load_json_file(dir / "out" / "sidecars" / (src + ".json"));
    CHECK(side["degraded"]["mtf_nyq"].get<double>() == e.mtf_nyq);
    CHECK(side["degraded"]["snr0"].get<double>() == e.snr0);
    CHECK(side["degraded"]["snr1"].get<double>() == e.snr1);
  }
  for (const auto& [src, splits] : split_of_source) CHECK(splits.size() == 1);
}

TEST_CASE("empty source list is an error") {
  TempDir dir("empty");
  CHECK_THROWS_AS(build_dataset({}, dir / "out", DatasetBuildOptions{}), Error);
}
