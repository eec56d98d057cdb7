#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <filesystem>
#include <optional>
#include <ostream>

#include "convbeers/checkpoint.hpp"
#include "convbeers/config_io.hpp"
#include "convbeers/dataset.hpp"
#include "convbeers/error.hpp"
#include "convbeers/patterns.hpp"
#include "convbeers/quality.hpp"
#include "convbeers/quantizer.hpp"
#include "convbeers/rng.hpp"
#include "convbeers/tiff_io.hpp"
#include "convbeers/tiling.hpp"
#include "convbeers/trainer.hpp"

namespace convbeers::cli {
namespace {

namespace fs = std::filesystem;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string out;
};

std::string join(const std::vector<std::string>& keys) {
  std::string s;
  for (const auto& k : keys) s += (s.empty() ? "" : ", ") + k;
  return s;
}

std::string keys_footer(const std::vector<std::string>& keys) {
  return "Config keys (--config JSON): " + join(keys);
}

Json load_config(const Globals& g, const std::vector<std::string>& allowed, const std::string& what) {
  if (g.config.empty()) return Json::object();
  require(fs::is_regular_file(g.config), ErrorCode::io, "config file not found: " + g.config);
  Json j = load_json_file(g.config);
  require_known_keys(j, allowed, what + " config");
  return j;
}

void require_file(const std::string& path, const std::string& what) {
  require(!path.empty(), ErrorCode::invalid_argument, what + " path is required");
  require(fs::is_regular_file(path), ErrorCode::io, what + " not found: " + path);
}

void require_out(const Globals& g) {
  require(!g.out.empty(), ErrorCode::invalid_argument, "--out <dir> is required for this command");
  fs::create_directories(g.out);
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::config, std::string("config key \"") + key + "\" has the wrong type");
  }
}

std::vector<fs::path> inputs_of(const std::string& in) {
  require(!in.empty(), ErrorCode::invalid_argument, "--in <file|dir> is required");
  if (fs::is_directory(in)) {
    auto files = list_tiffs(in);
    require(!files.empty(), ErrorCode::io, "no TIFF files in " + in);
    return files;
  }
  require_file(in, "input image");
  return {fs::path(in)};
}

Json pair_metrics_json(const PairMetrics& m) {
  Json j;
  j["psnr_db"] = m.psnr_db;
  j["ssim"] = m.ssim;
  j["lpips"] = m.lpips ? Json(*m.lpips) : Json(nullptr);
  j["dists"] = m.dists ? Json(*m.dists) : Json(nullptr);
  return j;
}

Split parse_split(const std::string& s) {
  try {
    return split_from_string(s);
  } catch (const std::exception&) {
    throw Error(ErrorCode::invalid_argument, "--split must be train, val or test");
  }
}

// ---------------------------------------------------------------- commands

const std::vector<std::string> kDatasetKeys{"degraded", "reference", "patch", "split"};
const std::vector<std::string> kRestoreKeys{"tile", "overlap"};
const std::vector<std::string> kEvaluateKeys{"peak"};
const std::vector<std::string> kSnrKeys{"l0", "l1"};
const std::vector<std::string> kQuantizeKeys{"bits", "calibration_patches"};
const std::vector<std::string> kBenchKeys{"width", "height", "tile", "overlap"};

Json cmd_dataset_build(const Globals& g, const std::string& src) {
  const Json cfg = load_config(g, kDatasetKeys, "dataset-build");
  require(fs::is_directory(src), ErrorCode::io, "source directory not found: " + src);
  require_out(g);
  DatasetBuildOptions o;
  if (cfg.contains("degraded")) o.degraded = degradation_from_json(cfg["degraded"], o.degraded);
  if (cfg.contains("reference")) o.reference = degradation_from_json(cfg["reference"], o.reference);
  o.patch = get_or(cfg, "patch", o.patch);
  if (cfg.contains("split")) {
    const Json& s = cfg["split"];
    require_known_keys(s, {"train", "val", "test"}, "split");
    o.split = {get_or(s, "train", 0.0), get_or(s, "val", 0.0), get_or(s, "test", 0.0)};
  }
  o.seed = g.seed.value_or(o.degraded.seed);
  o.workers = g.workers;
  const auto sources = list_tiffs(src);
  require(!sources.empty(), ErrorCode::io, "no TIFF images in " + src);
  const auto m = build_dataset(sources, g.out, o);
  Json r;
  r["manifest"] = (fs::path(g.out) / "manifest.json").string();
  r["sources"] = sources.size();
  r["pairs"] = m.entries.size();
  r["train"] = m.count(Split::train);
  r["val"] = m.count(Split::val);
  r["test"] = m.count(Split::test);
  r["patch"] = o.patch;
  r["seed"] = o.seed;
  return r;
}

Json cmd_simulate(const Globals& g, const std::string& in) {
  Json cfg_json = Json::object();
  if (!g.config.empty()) {
    require_file(g.config, "config file");
    cfg_json = load_json_file(g.config);
  }
  DegradationConfig cfg = cfg_json.empty() ? sim_degraded_fixed()
                                           : degradation_from_json(cfg_json, sim_degraded_fixed());
  const auto files = inputs_of(in);
  require_out(g);
  const std::uint64_t seed = g.seed.value_or(cfg.seed);
  Json outputs = Json::array();
  for (std::size_t i = 0; i < files.size(); ++i) {
    const PanImage src = load_tiff(files[i]);
    const std::uint64_t s = derive_seed(seed, i);
    const auto draw = sample_config(cfg, derive_seed(s, 1));
    const auto res = degrade(src, draw.mtf, draw.noise, cfg.oversampling, derive_seed(s, 2));
    const fs::path img = fs::path(g.out) / (files[i].stem().string() + ".tif");
    const fs::path side = fs::path(g.out) / (files[i].stem().string() + ".json");
    const auto saved = save_tiff(res.image, img);
    Json a = applied_to_json(res.applied);
    a["source"] = files[i].string();
    a["dn_clamped"] = saved.clamped;
    write_json_file(side, a);
    Json o;
    o["image"] = img.string();
    o["sidecar"] = side.string();
    o["applied"] = applied_to_json(res.applied);
    outputs.push_back(o);
  }
  Json r;
  r["outputs"] = outputs;
  r["config"] = degradation_to_json(cfg);
  return r;
}

Json cmd_train(const Globals& g, const std::string& manifest, const std::string& init) {
  const Json cfg_json = load_config(g, train_config_keys(), "train");
  require_file(manifest, "manifest");
  if (!init.empty()) require_file(init, "initial checkpoint");
  require_out(g);
  TrainConfig cfg = train_config_from_json(cfg_json);
  if (g.seed) cfg.seed = *g.seed;
  cfg.workers = g.workers;
  cfg.out_dir = g.out;
  const DatasetManifest m = load_manifest(manifest);
  const auto problems = validate_manifest_files(m);
  if (!problems.empty()) {
    std::string msg = "manifest invalid:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw Error(ErrorCode::invalid_argument, msg);
  }
  std::optional<NetworkParams> initial;
  if (!init.empty()) initial = load_checkpoint(init);
  const TrainResult res = train(m, cfg, nullptr, initial ? &*initial : nullptr);
  Json r;
  r["model"] = (fs::path(g.out) / "model.cbrs").string();
  r["log"] = (fs::path(g.out) / "train_log.jsonl").string();
  r["config"] = train_config_to_json(cfg);
  r["baseline_val_psnr_db"] = res.baseline_val_psnr_db ? Json(*res.baseline_val_psnr_db) : Json(nullptr);
  Json epochs = Json::array();
  for (const auto& e : res.log) epochs.push_back(Json::parse(epoch_record_json(e)));
  r["epochs"] = epochs;
  r["final_val_psnr_db"] =
      !res.log.empty() && res.log.back().val_psnr_db ? Json(*res.log.back().val_psnr_db) : Json(nullptr);
  if (res.diverged)
    throw Error(ErrorCode::numerical, "training diverged: " + res.divergence_message +
                                          "; last good parameters saved to " + r["model"].get<std::string>());
  return r;
}

// Loads either checkpoint format; the quantized one brings its grid hook.
struct LoadedModel {
  NetworkParams params;
  std::optional<QuantModel> quant;
};

LoadedModel load_model(const std::string& path) {
  require_file(path, "model");
  std::ifstream f(path, std::ios::binary);
  char magic[4] = {};
  f.read(magic, 4);
  LoadedModel m;
  if (std::string(magic, 4) == "CBQ8") {
    m.quant = load_quant_model(path);
    m.params = quantized_weights(*m.quant);
  } else {
    m.params = load_checkpoint(path);
  }
  return m;
}

TileOptions tile_options(const Json& cfg, int workers) {
  TileOptions t;
  t.tile = get_or(cfg, "tile", t.tile);
  t.overlap = get_or(cfg, "overlap", t.overlap);
  t.workers = workers;
  return t;
}

Json cmd_restore(const Globals& g, const std::string& model, const std::string& in,
                 const std::string& manifest, const std::string& split) {
  const Json cfg = load_config(g, kRestoreKeys, "restore");
  const TileOptions topt = tile_options(cfg, g.workers);
  require(in.empty() != manifest.empty(), ErrorCode::invalid_argument,
          "restore needs exactly one of --in or --manifest");
  std::vector<fs::path> files;
  if (!manifest.empty()) {
    require_file(manifest, "manifest");
    const DatasetManifest m = load_manifest(manifest);
    for (const auto& e : m.filtered(parse_split(split)).entries) files.push_back(m.degraded_path(e));
    require(!files.empty(), ErrorCode::invalid_argument, "manifest has no pairs in split " + split);
    for (const auto& f : files) require_file(f.string(), "degraded image");
  } else {
    files = inputs_of(in);
  }
  const LoadedModel lm = load_model(model);
  require_out(g);
  std::optional<ActivationHook<float>> hook;
  if (lm.quant) hook = quantization_hook(*lm.quant);
  const RadiometricScale scale;
  Json outputs = Json::array();
  for (const auto& f : files) {
    const PanImage img = load_tiff(f, scale);
    const PanImage restored = restore_image(lm.params, img, scale.radiance_at_dn_max, topt,
                                            hook ? &*hook : nullptr);
    const fs::path dst = fs::path(g.out) / f.filename();
    const auto rep = save_tiff(restored, dst, scale);
    Json o;
    o["input"] = f.string();
    o["output"] = dst.string();
    o["dn_clamped"] = rep.clamped;
    outputs.push_back(o);
  }
  Json r;
  r["model"] = model;
  r["quantized"] = lm.quant.has_value();
  r["tile"] = topt.tile;
  r["overlap"] = topt.overlap;
  r["outputs"] = outputs;
  return r;
}

Json cmd_evaluate(const Globals& g, const std::string& candidate, const std::string& reference,
                  const std::string& manifest, const std::string& split,
                  const std::string& restored, std::optional<double> lpips,
                  std::optional<double> dists) {
  const Json cfg = load_config(g, kEvaluateKeys, "evaluate");
  const RadiometricScale scale;
  const double peak = get_or(cfg, "peak", scale.radiance_at_dn_max);
  require(peak > 0, ErrorCode::config, "\"peak\" must be positive");
  std::vector<std::pair<fs::path, fs::path>> pairs;
  if (!manifest.empty()) {
    require(candidate.empty() && reference.empty(), ErrorCode::invalid_argument,
            "evaluate takes either --manifest or --candidate/--reference");
    require_file(manifest, "manifest");
    const DatasetManifest m = load_manifest(manifest);
    for (const auto& e : m.filtered(parse_split(split)).entries) {
      const fs::path cand = restored.empty() ? m.degraded_path(e)
                                             : fs::path(restored) / m.degraded_path(e).filename();
      pairs.emplace_back(cand, m.reference_path(e));
    }
    require(!pairs.empty(), ErrorCode::invalid_argument, "manifest has no pairs in split " + split);
  } else {
    pairs.emplace_back(candidate, reference);
  }
  for (const auto& [c, r] : pairs) {
    require_file(c.string(), "candidate image");
    require_file(r.string(), "reference image");
  }
  std::vector<PairMetrics> metrics;
  Json per_pair = Json::array();
  for (const auto& [c, ref] : pairs) {
    const PanImage a = load_tiff(c, scale), b = load_tiff(ref, scale);
    const PairMetrics pm = evaluate_pair(a, b, peak, pairs.size() == 1 ? lpips : std::nullopt,
                                         pairs.size() == 1 ? dists : std::nullopt);
    Json j = pair_metrics_json(pm);
    j["candidate"] = c.string();
    j["reference"] = ref.string();
    per_pair.push_back(j);
    metrics.push_back(pm);
  }
  const MetricSummary s = summarize(std::move(metrics));
  Json r;
  r["psnr_db"] = s.mean_psnr_db;
  r["ssim"] = s.mean_ssim;
  r["mtf_at_nyquist"] = nullptr;
  r["snr_l0"] = nullptr;
  r["snr_l1"] = nullptr;
  r["lpips"] = s.mean_lpips ? Json(*s.mean_lpips) : Json(nullptr);
  r["dists"] = s.mean_dists ? Json(*s.mean_dists) : Json(nullptr);
  r["peak"] = peak;
  r["count"] = s.pairs.size();
  r["pairs"] = per_pair;
  return r;
}

std::vector<RoiSpec> load_rois(const std::string& path, const std::string& kind) {
  require_file(path, "ROI sidecar");
  std::vector<RoiSpec> out;
  for (auto& r : rois_from_json(load_json_file(path)))
    if (r.kind == kind) out.push_back(r);
  require(!out.empty(), ErrorCode::invalid_argument, "ROI sidecar has no \"" + kind + "\" regions");
  return out;
}

Json roi_json(const Roi& r) { return Json{{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}}; }

Json cmd_mtf(const Globals& g, const std::string& in, const std::string& rois) {
  load_config(g, {}, "mtf");
  require_file(in, "input image");
  const auto edges = load_rois(rois, "edge");
  const PanImage img = load_tiff(in);
  Json per = Json::array();
  double mean = 0;
  for (const auto& e : edges) {
    const MtfCurve c = slanted_edge_mtf(img, e.roi);
    Json j;
    j["roi"] = roi_json(e.roi);
    j["mtf_at_nyquist"] = c.mtf_at_nyquist;
    j["edge_angle_deg"] = c.edge_angle_deg;
    j["transposed"] = c.transposed;
    j["frequencies"] = c.frequencies;
    j["values"] = c.values;
    per.push_back(j);
    mean += c.mtf_at_nyquist;
  }
  Json r;
  r["mtf_at_nyquist"] = mean / static_cast<double>(edges.size());
  r["edges"] = per;
  return r;
}

Json cmd_snr(const Globals& g, const std::string& in, const std::string& rois) {
  const Json cfg = load_config(g, kSnrKeys, "snr");
  require_file(in, "input image");
  const auto flats = load_rois(rois, "flat");
  const PanImage img = load_tiff(in);
  std::vector<Roi> r;
  for (const auto& f : flats) r.push_back(f.roi);
  const double l0 = get_or(cfg, "l0", 25.0), l1 = get_or(cfg, "l1", 100.0);
  const SnrEstimate est = variance_snr(img, r, l0, l1);
  Json per = Json::array();
  for (std::size_t i = 0; i < r.size(); ++i) {
    Json j;
    j["roi"] = roi_json(r[i]);
    j["mean"] = est.per_roi[i].mean;
    j["std"] = est.per_roi[i].std;
    j["snr"] = est.per_roi[i].snr;
    per.push_back(j);
  }
  Json out;
  out["snr_l0"] = est.snr_at_l0;
  out["snr_l1"] = est.snr_at_l1;
  out["l0"] = l0;
  out["l1"] = l1;
  out["alpha_hat"] = est.alpha_hat;
  out["beta_hat"] = est.beta_hat;
  out["noiseless"] = est.noiseless;
  out["rois"] = per;
  return out;
}

Json cmd_quantize(const Globals& g, const std::string& model, const std::string& manifest) {
  const Json cfg = load_config(g, kQuantizeKeys, "quantize");
  const int bits = get_or(cfg, "bits", 8);
  const int calib = get_or(cfg, "calibration_patches", 16);
  require(calib >= 8, ErrorCode::config, "\"calibration_patches\" must be >= 8");
  require_file(manifest, "manifest");
  const NetworkParams params = load_checkpoint((require_file(model, "model"), model));
  require_out(g);
  const RadiometricScale scale;
  const DatasetManifest m = load_manifest(manifest);
  std::vector<Tensor> calibration;
  for (const auto& e : m.filtered(Split::train).entries) {
    if (static_cast<int>(calibration.size()) == calib) break;
    calibration.push_back(image_to_tensor(load_tiff(m.degraded_path(e), scale), scale.radiance_at_dn_max));
  }
  const QuantModel qm = calibrate(params, calibration, bits);
  const fs::path qpath = fs::path(g.out) / "model.cbq8";
  save_quant_model(qm, qpath);
  const DriftReport d = compare(qm, m, scale, g.workers);
  Json r;
  r["model"] = qpath.string();
  r["bits"] = bits;
  r["calibration_patches"] = qm.summary.patches;
  r["mae"] = d.mae;
  r["std"] = d.std;
  r["psnr_float_db"] = d.psnr_float_db;
  r["psnr_int8_db"] = d.psnr_int8_db;
  r["ssim_float"] = d.ssim_float;
  r["ssim_int8"] = d.ssim_int8;
  r["float_payload_bytes"] = d.float_payload_bytes;
  r["int8_payload_bytes"] = d.int8_payload_bytes;
  r["size_ratio"] = d.size_ratio;
  r["file_bytes"] = fs::file_size(qpath);
  Json per = Json::array();
  for (const auto& p : d.pairs)
    per.push_back({{"mae", p.mae},
                   {"psnr_float_db", p.psnr_float_db},
                   {"psnr_int8_db", p.psnr_int8_db},
                   {"ssim_float", p.ssim_float},
                   {"ssim_int8", p.ssim_int8}});
  r["pairs"] = per;
  return r;
}

Json cmd_bench(const Globals& g, const std::string& model) {
  const Json cfg = load_config(g, kBenchKeys, "bench");
  const int w = get_or(cfg, "width", 1360), h = get_or(cfg, "height", 900);
  require(w >= 64 && h >= 64, ErrorCode::config, "bench frame must be at least 64x64");
  const TileOptions topt = tile_options(cfg, g.workers);
  const std::uint64_t seed = g.seed.value_or(0);
  const NetworkParams params = model.empty()
                                   ? init_params(seed, {}, InitScheme::kaiming_damped_residual)
                                   : load_model(model).params;
  const PanImage frame = render_scene(w, h, seed);
  const auto tiles = tile_origins(w, topt.tile, topt.overlap).size() *
                     tile_origins(h, topt.tile, topt.overlap).size();
  const auto t0 = std::chrono::steady_clock::now();
  const PanImage out = restore_image(params, frame, RadiometricScale{}.radiance_at_dn_max, topt);
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Json r;
  r["width"] = out.width();
  r["height"] = out.height();
  r["tile"] = topt.tile;
  r["overlap"] = topt.overlap;
  r["workers"] = g.workers;
  r["tiles"] = tiles;
  r["seconds"] = sec;
  r["tiles_per_s"] = static_cast<double>(tiles) / sec;
  r["px_per_s"] = static_cast<double>(w) * h / sec;
  return r;
}

Json error_json(const std::string& code, const std::string& message) {
  return Json{{"error", {{"code", code}, {"message", message}}}};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sensor simulation, restoration training and quality measurement for panchromatic imagery",
               "convbeers"};
  app.require_subcommand(1);
  Globals g;
  auto add_globals = [&](CLI::App* sub) {
    sub->add_option("--config", g.config, "JSON config file");
    sub->add_option("--seed", g.seed, "64-bit seed (overrides the config seed)");
    sub->add_option("--workers", g.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", g.out, "output directory");
  };

  std::string src, in, manifest, init, model, split = "test", candidate, reference, restored, rois;
  std::optional<double> lpips, dists;

  auto* ds = app.add_subcommand("dataset-build", "Build a paired dataset from source images");
  ds->add_option("--src", src, "directory of source TIFFs")->required();
  ds->footer(keys_footer(kDatasetKeys) + "\n  degraded/reference take a preset name or an object with: " +
             join(degradation_config_keys()) + "\n  split: {train, val, test}");
  auto* sim = app.add_subcommand("simulate", "Degrade images and write applied-parameter sidecars");
  sim->add_option("--in", in, "input TIFF or directory")->required();
  sim->footer(keys_footer(degradation_config_keys()) + " (or a preset name string)");
  auto* tr = app.add_subcommand("train", "Train the restoration network on a manifest");
  tr->add_option("--manifest", manifest, "dataset manifest")->required();
  tr->add_option("--init", init, "checkpoint to start from");
  tr->footer(keys_footer(train_config_keys()));
  auto* rs = app.add_subcommand("restore", "Restore images with a trained (or quantized) model");
  rs->add_option("--model", model, "checkpoint (.cbrs) or quantized model (.cbq8)")->required();
  rs->add_option("--in", in, "input TIFF or directory");
  rs->add_option("--manifest", manifest, "restore the degraded images of a manifest split");
  rs->add_option("--split", split, "manifest split (train, val, test)");
  rs->footer(keys_footer(kRestoreKeys));
  auto* ev = app.add_subcommand("evaluate", "PSNR/SSIM of candidate images against references");
  ev->add_option("--candidate", candidate, "candidate TIFF");
  ev->add_option("--reference", reference, "reference TIFF");
  ev->add_option("--manifest", manifest, "evaluate a manifest split");
  ev->add_option("--split", split, "manifest split (train, val, test)");
  ev->add_option("--restored", restored, "directory of restored images named like the degraded ones");
  ev->add_option("--lpips", lpips, "externally computed LPIPS, passed through");
  ev->add_option("--dists", dists, "externally computed DISTS, passed through");
  ev->footer(keys_footer(kEvaluateKeys));
  auto* mt = app.add_subcommand("mtf", "Slanted-edge MTF over the edge ROIs of a sidecar");
  mt->add_option("--in", in, "input TIFF")->required();
  mt->add_option("--rois", rois, "ROI sidecar JSON")->required();
  mt->footer("Config keys (--config JSON): none");
  auto* sn = app.add_subcommand("snr", "Variance-based SNR over the flat ROIs of a sidecar");
  sn->add_option("--in", in, "input TIFF")->required();
  sn->add_option("--rois", rois, "ROI sidecar JSON")->required();
  sn->footer(keys_footer(kSnrKeys));
  auto* qz = app.add_subcommand("quantize", "INT8 post-training quantization and drift report");
  qz->add_option("--model", model, "float checkpoint")->required();
  qz->add_option("--manifest", manifest, "manifest: train split calibrates, test split compares")->required();
  qz->footer(keys_footer(kQuantizeKeys));
  auto* bn = app.add_subcommand("bench", "Tiled-inference throughput on a synthetic frame");
  bn->add_option("--model", model, "checkpoint (default: seeded initial weights)");
  bn->footer(keys_footer(kBenchKeys));
  for (auto* sub : {ds, sim, tr, rs, ev, mt, sn, qz, bn}) add_globals(sub);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << error_json("usage", e.what()).dump() << '\n';
    return 2;
  }

  std::string name;
  try {
    Json report;
    if (ds->parsed()) name = "dataset-build", report = cmd_dataset_build(g, src);
    else if (sim->parsed()) name = "simulate", report = cmd_simulate(g, in);
    else if (tr->parsed()) name = "train", report = cmd_train(g, manifest, init);
    else if (rs->parsed()) name = "restore", report = cmd_restore(g, model, in, manifest, split);
    else if (ev->parsed())
      name = "evaluate", report = cmd_evaluate(g, candidate, reference, manifest, split, restored, lpips, dists);
    else if (mt->parsed()) name = "mtf", report = cmd_mtf(g, in, rois);
    else if (sn->parsed()) name = "snr", report = cmd_snr(g, in, rois);
    else if (qz->parsed()) name = "quantize", report = cmd_quantize(g, model, manifest);
    else name = "bench", report = cmd_bench(g, model);
    Json full;
    full["command"] = name;
    for (auto& [k, v] : report.items()) full[k] = v;
    if (!g.out.empty()) {
      fs::create_directories(g.out);
      write_json_file(fs::path(g.out) / (name + "_report.json"), full);
    }
    out << full.dump(2) << '\n';
    return 0;
  } catch (const Error& e) {
    err << error_json(std::string(to_string(e.code())), e.what()).dump() << '\n';
    return e.code() == ErrorCode::config || e.code() == ErrorCode::invalid_argument ? 2 : 1;
  } catch (const std::exception& e) {
    err << error_json("internal", e.what()).dump() << '\n';
    return 1;
  }
}

}  // namespace convbeers::cli
