// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.
// Usage: acceptance [work_dir] [--only N,...] [--reuse] [--prepare]
// --reuse keeps a desk dataset/model already in work_dir instead of rebuilding;
// --prepare only builds and trains it.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "convbeers/backward.hpp"
#include "convbeers/checkpoint.hpp"
#include "convbeers/dataset.hpp"
#include "convbeers/fft.hpp"
#include "convbeers/loss.hpp"
#include "convbeers/patterns.hpp"
#include "convbeers/quality.hpp"
#include "convbeers/quantizer.hpp"
#include "convbeers/rng.hpp"
#include "convbeers/sensor_sim.hpp"
#include "convbeers/tiff_io.hpp"
#include "convbeers/tiling.hpp"
#include "convbeers/trainer.hpp"

using namespace convbeers;
namespace fs = std::filesystem;

namespace {

// Pinned thresholds.
constexpr std::size_t kExpectedParams = 1'219'841;
constexpr double kGradRelTol = 1e-3;
constexpr double kGradStep = 1e-3;
constexpr double kGradZeroFloor = 1e-9;  // |g| and |fd| both below: counted equal
constexpr double kMtfClosureTol = 0.015;
constexpr double kSnrClosureTol = 0.10;
constexpr double kMinPsnrGainDb = 2.0;
constexpr double kMinDeltaMtf = 0.02;
constexpr double kMaxQuantMae = 0.05;
constexpr double kMaxQuantPsnrDropDb = 3.0;
constexpr double kTilingTol = 1e-4;
constexpr double kOracleTol = 1e-9;
constexpr double kSsimOracleTol = 1e-6;

// Desk-scale training recipe.
constexpr int kScenes = 70;
constexpr int kSceneSide = 512;
constexpr int kOversampling = 2;
constexpr int kEpochs = 6;
constexpr int kBatch = 4;
constexpr double kLr = 3e-4;
constexpr int kCrop = 64;

NoiseConfig sim_degraded_fixed_noise() {
  const DegradationConfig c = sim_degraded_fixed();
  return {c.l0, c.snr0_range.first, c.l1, c.snr1_range.first};
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ------------------------------------------------------------ 1: parameters

Outcome param_count() {
  const NetworkParams p(NetworkShape{});
  const std::size_t n = p.parameter_count();
  return {n == kExpectedParams, fmt("%zu trainable scalars", n)};
}

// ------------------------------------------------------------ 2: gradients

// Kink-free setup: every ReLU pre-activation and every L1/FFT residual
// component is held well away from zero so finite differences stay smooth.
Outcome gradient_check() {
  const NetworkShape shape{4, 2};
  BasicParams<double> p = init_params(3, shape).cast<double>();
  Rng rng(17);
  for (int b = 0; b < shape.blocks; ++b) {
    const int l = 1 + 2 * b;
    for (auto& w : p.weight(l).values) w *= 0.05;
    auto& bias = p.bias(l).values;
    for (std::size_t c = 0; c < bias.size(); ++c)
      bias[c] = c < bias.size() / 2 ? 2.0 + rng.uniform() : -2.0;
  }
  for (int l = 0; l < p.layers(); ++l)
    if ((l - 1) % 2 != 0 || l >= 1 + 2 * shape.blocks)
      for (auto& v : p.bias(l).values) v = 0.1 * rng.normal();

  BasicTensor<double> x(1, 1, 9, 9);
  for (auto& v : x.values()) v = rng.uniform();

  double min_preact = 1e300;
  const ActivationHook<double> probe = [&](int layer, double* d, std::size_t n) {
    if (layer >= 1 && layer < 1 + 2 * shape.blocks && (layer - 1) % 2 == 0)
      for (std::size_t i = 0; i < n; ++i) min_preact = std::min(min_preact, std::abs(d[i]));
  };
  const BasicTensor<double> out0 = forward(p, x, 1, &probe);

  // Residual target: signs random, magnitudes in [0.5, 1]; reseed until every
  // DFT component of the residual (bar the identically-zero Im at DC) clears
  // the margin.
  BasicTensor<double> target(1, 1, 9, 9);
  double fft_margin = 0;
  for (std::uint64_t s = 0; s < 2000 && fft_margin < 0.15; ++s) {
    Rng r(derive_seed(99, s));
    ComplexGrid g(81);
    for (std::size_t i = 0; i < 81; ++i) {
      const double mag = 0.5 + 0.5 * r.uniform();
      const double res = r.uniform() < 0.5 ? -mag : mag;
      target.values()[i] = out0.data()[i] - res;
      g[i] = {res, 0.0};
    }
    const ComplexGrid f = fft2(g, 9, 9, FftDirection::forward);
    double m = 1e300;
    for (std::size_t i = 0; i < 81; ++i) {
      m = std::min(m, std::abs(f[i].real()));
      if (i != 0) m = std::min(m, std::abs(f[i].imag()));
    }
    fft_margin = m;
  }

  const LossWeights w{};
  const auto analytic = backward(p, x, target, LossWeights{w.l1, 0.0, w.fft});
  const LossWeights lw{w.l1, 0.0, w.fft};
  double worst = 0;
  std::size_t n = 0, bad = 0;
  for (std::size_t t = 0; t < p.tensors().size(); ++t) {
    for (std::size_t k = 0; k < p.tensors()[t].values.size(); ++k, ++n) {
      auto q = p;
      q.tensors()[t].values[k] += kGradStep;
      const double lp = loss_total(forward(q, x), target, lw).total;
      q.tensors()[t].values[k] -= 2 * kGradStep;
      const double lm = loss_total(forward(q, x), target, lw).total;
      const double fd = (lp - lm) / (2 * kGradStep);
      const double g = analytic.grads.tensors()[t].values[k];
      const double denom = std::max({std::abs(fd), std::abs(g), kGradZeroFloor});
      const double rel = std::abs(fd - g) / denom;
      worst = std::max(worst, rel);
      bad += rel >= kGradRelTol;
    }
  }
  const bool setup_ok = min_preact >= 0.5 && fft_margin >= 0.1;
  return {setup_ok && bad == 0,
          fmt("%zu params, worst rel err %.2e, %zu over %.0e (ReLU margin %.2f, FFT margin %.2f)",
              n, worst, bad, kGradRelTol, min_preact, fft_margin)};
}

// ------------------------------------------------------------ 3: MTF closure

Outcome mtf_closure() {
  std::string detail;
  bool ok = true;
  const int side = 512;
  for (int r : {2, 4}) {
    for (double level : {0.03, 0.05, 0.07}) {
      const PanImage hi = render_slanted_edge(side * r, 5.0, 20, 120);
      const auto d = degrade(hi, MtfConfig{level}, sim_degraded_fixed_noise(), r, 7);
      const int s = d.image.width();
      const double m = slanted_edge_mtf(d.image, Roi{s / 4, s / 4, s / 2, s / 2}).mtf_at_nyquist;
      ok &= std::abs(m - level) <= kMtfClosureTol;
      detail += fmt("%sr%d %.2f->%.4f", detail.empty() ? "" : ", ", r, level, m);
    }
  }
  return {ok, detail + fmt(" (tol %.3f)", kMtfClosureTol)};
}

// ------------------------------------------------------------ 4: SNR closure

Outcome snr_closure() {
  const NoiseConfig nc = sim_degraded_fixed_noise();
  const std::vector<double> levels{15, 25, 50, 100, 140};
  const int panel = 256;
  const PanImage flat = render_flat_panels(levels, panel);
  const PanImage noisy = apply_noise(flat, calibrate_noise(nc), 21);
  std::vector<Roi> rois;
  for (std::size_t i = 0; i < levels.size(); ++i)
    rois.push_back(Roi{static_cast<int>(i) * panel + 32, 32, panel - 64, panel - 64});
  const SnrEstimate e = variance_snr(noisy, rois, nc.l0, nc.l1);
  const double e0 = std::abs(e.snr_at_l0 / nc.snr0 - 1), e1 = std::abs(e.snr_at_l1 / nc.snr1 - 1);
  return {e0 <= kSnrClosureTol && e1 <= kSnrClosureTol,
          fmt("SNR(25)=%.1f vs %.0f (%.1f%%), SNR(100)=%.1f vs %.0f (%.1f%%)", e.snr_at_l0, nc.snr0,
              100 * e0, e.snr_at_l1, nc.snr1, 100 * e1)};
}

// ------------------------------------------------------------ 5-8: trained model

struct Trained {
  DatasetManifest manifest;
  NetworkParams params;
  std::vector<TrainingPair> test;
  double seconds = 0;
};

DatasetBuildOptions desk_dataset_options() {
  DatasetBuildOptions o;
  o.degraded.oversampling = kOversampling;
  o.reference.oversampling = kOversampling;
  o.patch = 128;
  o.seed = 11;
  return o;
}

void write_scenes(const fs::path& dir, int count, int side, std::uint64_t seed) {
  fs::create_directories(dir);
  for (int i = 0; i < count; ++i)
    save_tiff(render_scene(side, side, derive_seed(seed, static_cast<std::uint64_t>(i))),
              dir / fmt("scene_%03d.tif", i));
}

TrainConfig desk_train_config() {
  TrainConfig c;
  c.epochs = kEpochs;
  c.batch = kBatch;
  c.lr = kLr;
  c.patch = kCrop;
  c.seed = 5;
  return c;
}

Trained train_desk_model(const fs::path& work, bool reuse) {
  const auto t0 = std::chrono::steady_clock::now();
  Trained t;
  if (!reuse) fs::remove_all(work / "desk");
  const fs::path ds = work / "desk" / "dataset";
  const fs::path model = work / "desk" / "train" / "model.cbrs";
  if (!fs::exists(ds / "manifest.json")) {
    write_scenes(work / "desk" / "scenes", kScenes, kSceneSide, 1000);
    build_dataset(list_tiffs(work / "desk" / "scenes"), ds, desk_dataset_options());
  }
  t.manifest = load_manifest(ds / "manifest.json");
  if (fs::exists(model)) {
    t.params = load_checkpoint(model);
  } else {
    TrainConfig c = desk_train_config();
    c.out_dir = work / "desk" / "train";
    t.params = train(t.manifest, c, nullptr, nullptr, [](const EpochRecord& e, const NetworkParams&) {
                 std::fprintf(stderr, "  %s\n", epoch_record_json(e).c_str());
               }).params;
  }
  t.test = load_pairs(t.manifest, Split::test);
  t.seconds = seconds_since(t0);
  return t;
}

Outcome restoration_gain(const Trained& t) {
  const RadiometricScale scale;
  double base_psnr = 0, base_ssim = 0;
  for (const auto& p : t.test) {
    base_psnr += psnr(p.degraded, p.reference, scale.radiance_at_dn_max);
    base_ssim += ssim(p.degraded, p.reference, scale.radiance_at_dn_max);
  }
  base_psnr /= static_cast<double>(t.test.size());
  base_ssim /= static_cast<double>(t.test.size());
  const ValidationScore r = validate_pairs(t.params, t.test, scale);
  const std::size_t train_pairs = t.manifest.count(Split::train);
  const bool ok = train_pairs >= 200 && r.psnr_db - base_psnr >= kMinPsnrGainDb && r.ssim > base_ssim;
  return {ok, fmt("%zu train pairs, %d epochs, %zu held-out: PSNR %.2f -> %.2f dB (+%.2f), "
                  "SSIM %.4f -> %.4f (%.0fs)",
                  train_pairs, kEpochs, t.test.size(), base_psnr, r.psnr_db, r.psnr_db - base_psnr,
                  base_ssim, r.ssim, t.seconds)};
}

Outcome mtf_gain(const Trained& t) {
  const RadiometricScale scale;
  const int side = 256;
  std::string detail;
  bool ok = true;
  double worst = 1e300;
  for (double level : {0.03, 0.05, 0.07}) {
    const PanImage hi = render_slanted_edge(side * kOversampling, 5.0, 20, 120);
    const auto d = degrade(hi, MtfConfig{level}, sim_degraded_fixed_noise(), kOversampling, 31);
    const PanImage restored = dn_roundtrip(
        restore_image(t.params, dn_roundtrip(d.image, scale), scale.radiance_at_dn_max), scale);
    const Roi roi{side / 4, side / 4, side / 2, side / 2};
    const double md = slanted_edge_mtf(d.image, roi).mtf_at_nyquist;
    const double mr = slanted_edge_mtf(restored, roi).mtf_at_nyquist;
    ok &= mr - md > kMinDeltaMtf;
    worst = std::min(worst, mr - md);
    detail += fmt("%s%.2f: %.4f -> %.4f", detail.empty() ? "" : ", ", level, md, mr);
  }
  return {ok, detail + fmt(" (min delta %.4f)", worst)};
}

Outcome quant_drift(const Trained& t) {
  const RadiometricScale scale;
  std::vector<Tensor> calib;
  for (const auto& p : load_pairs(t.manifest, Split::train, scale)) {
    if (calib.size() == 16) break;
    calib.push_back(image_to_tensor(p.degraded, scale.radiance_at_dn_max));
  }
  const QuantModel qm = calibrate(t.params, calib, 8);
  const DriftReport d = compare(qm, t.test, scale);
  const double drop = d.psnr_float_db - d.psnr_int8_db;
  return {d.mae < kMaxQuantMae && drop <= kMaxQuantPsnrDropDb,
          fmt("MAE %.5f (std %.5f), PSNR float %.2f / int8 %.2f dB (drop %.2f), size ratio %.2f",
              d.mae, d.std, d.psnr_float_db, d.psnr_int8_db, drop, d.size_ratio)};
}

Outcome tiling_equivalence(const Trained& t) {
  const RadiometricScale scale;
  const PanImage frame = render_scene(512, 512, 77);
  const Tensor x = image_to_tensor(frame, scale.radiance_at_dn_max);
  const Tensor full = forward(t.params, x);
  const Tensor tiled = infer_tiled(t.params, x, TileOptions{256, 32, 1});
  double worst = 0;
  for (std::size_t i = 0; i < full.size(); ++i)
    worst = std::max(worst, std::abs(static_cast<double>(full.data()[i]) - tiled.data()[i]));
  return {worst <= kTilingTol, fmt("max |tiled - full| = %.3e on 512x512 (tile 256, overlap 32)", worst)};
}

// ------------------------------------------------------------ 9: metric oracles

PanImage random_image(Rng& rng, int w, int h, double peak) {
  std::vector<float> px(static_cast<std::size_t>(w) * h);
  for (auto& v : px) v = static_cast<float>(peak * rng.uniform());
  return PanImage(w, h, std::move(px));
}

double oracle_psnr(const PanImage& a, const PanImage& b, double peak) {
  double mse = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) mse += std::pow(double(a.at(x, y)) - b.at(x, y), 2);
  mse /= static_cast<double>(a.size());
  return 10 * std::log10(peak * peak / mse);
}

// Direct 2-D windowed statistics at every valid position.
double oracle_ssim(const PanImage& a, const PanImage& b, double peak) {
  const int k = 11, half = 5;
  const double sigma = 1.5;
  double g[11][11], gs = 0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) gs += g[i][j] = std::exp(-((i - half) * (i - half) + (j - half) * (j - half)) / (2 * sigma * sigma));
  const double c1 = std::pow(0.01 * peak, 2), c2 = std::pow(0.03 * peak, 2);
  double total = 0;
  int count = 0;
  for (int y = 0; y + k <= a.height(); ++y)
    for (int x = 0; x + k <= a.width(); ++x) {
      double ma = 0, mb = 0;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          ma += g[i][j] / gs * a.at(x + j, y + i);
          mb += g[i][j] / gs * b.at(x + j, y + i);
        }
      double va = 0, vb = 0, cov = 0;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          const double da = a.at(x + j, y + i) - ma, db = b.at(x + j, y + i) - mb;
          va += g[i][j] / gs * da * da;
          vb += g[i][j] / gs * db * db;
          cov += g[i][j] / gs * da * db;
        }
      total += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  return total / count;
}

// |Re| + |Im| of the naive DFT of the difference, averaged over bins.
double oracle_fft_loss(const Tensor& a, const Tensor& b) {
  const int h = a.height(), w = a.width();
  double s = 0;
  for (int u = 0; u < h; ++u)
    for (int v = 0; v < w; ++v) {
      std::complex<double> acc = 0;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const double d = double(a.data()[y * w + x]) - b.data()[y * w + x];
          acc += d * std::polar(1.0, -2 * std::numbers::pi * (double(u * y) / h + double(v * x) / w));
        }
      s += std::abs(acc.real()) + std::abs(acc.imag());
    }
  return s / (h * w);
}

Outcome metric_oracles() {
  Rng rng(2024);
  double worst_psnr = 0, worst_ssim = 0, worst_l1 = 0, worst_fft = 0, self_ssim = 0;
  const double peak = 163.84;
  for (int trial = 0; trial < 12; ++trial) {
    const int w = 8 + static_cast<int>(rng.uniform() * 9), h = 8 + static_cast<int>(rng.uniform() * 9);
    const PanImage a = random_image(rng, w, h, peak), b = random_image(rng, w, h, peak);
    worst_psnr = std::max(worst_psnr, std::abs(psnr(a, b, peak) - oracle_psnr(a, b, peak)));
    if (w >= 11 && h >= 11) {
      worst_ssim = std::max(worst_ssim, std::abs(ssim(a, b, peak) - oracle_ssim(a, b, peak)));
      self_ssim = std::max(self_ssim, std::abs(ssim(a, a, peak) - 1.0));
    }
    const Tensor ta = image_to_tensor(a, peak), tb = image_to_tensor(b, peak);
    double l1 = 0;
    for (std::size_t i = 0; i < ta.size(); ++i) l1 += std::abs(double(ta.data()[i]) - tb.data()[i]);
    worst_l1 = std::max(worst_l1, std::abs(loss_l1(ta, tb) - l1 / static_cast<double>(ta.size())));
    worst_fft = std::max(worst_fft, std::abs(loss_fft(ta, tb) - oracle_fft_loss(ta, tb)) /
                                        std::max(1.0, oracle_fft_loss(ta, tb)));
  }
  // All-zero parameters reduce the network to its global skip.
  const NetworkParams zero(NetworkShape{});
  const PanImage img = random_image(rng, 16, 16, 1.0);
  const Tensor x = image_to_tensor(img, 1.0);
  const Tensor y = forward(zero, x);
  double identity = 0;
  for (std::size_t i = 0; i < x.size(); ++i) identity = std::max(identity, double(std::abs(y.data()[i] - x.data()[i])));
  const bool ok = worst_psnr <= kOracleTol && worst_ssim <= kSsimOracleTol && worst_l1 <= kOracleTol &&
                  worst_fft <= kSsimOracleTol && self_ssim <= kOracleTol && identity == 0.0;
  return {ok, fmt("|dPSNR| %.1e, |dSSIM| %.1e, |dL1| %.1e, rel dFFT %.1e, |SSIM(x,x)-1| %.1e, "
                  "zero-net max diff %.1e",
                  worst_psnr, worst_ssim, worst_l1, worst_fft, self_ssim, identity)};
}

// ------------------------------------------------------------ 10: determinism

std::string file_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

// Every regular file under dir, relative path -> bytes.
std::vector<std::pair<std::string, std::string>> tree_bytes(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out.emplace_back(fs::relative(e.path(), dir).string(), file_bytes(e.path()));
  std::sort(out.begin(), out.end());
  return out;
}

Outcome determinism(const fs::path& work) {
  const fs::path root = work / "determinism";
  fs::remove_all(root);
  write_scenes(root / "scenes", 10, 256, 500);
  const auto sources = list_tiffs(root / "scenes");

  std::vector<std::string> mismatched;
  std::vector<std::vector<std::pair<std::string, std::string>>> ds_trees, train_trees;
  std::vector<std::string> degrade_bytes;
  for (int run = 0; run < 3; ++run) {
    const int workers = run == 2 ? 3 : 1 + run;
    const fs::path ds = root / fmt("dataset_%d", run);
    DatasetBuildOptions o = desk_dataset_options();
    o.workers = workers;
    build_dataset(sources, ds, o);
    ds_trees.push_back(tree_bytes(ds));

    const PanImage src = load_tiff(sources.front());
    const auto draw = sample_config(sim_degraded_variable(), 42);
    const auto d = degrade(src, draw.mtf, draw.noise, kOversampling, 43);
    const fs::path deg = root / fmt("degraded_%d.tif", run);
    save_tiff(d.image, deg);
    degrade_bytes.push_back(file_bytes(deg));

    TrainConfig c = desk_train_config();
    c.epochs = 2;
    c.workers = workers;
    c.out_dir = root / fmt("train_%d", run);
    train(load_manifest(ds / "manifest.json"), c);
    train_trees.push_back(tree_bytes(c.out_dir));
  }
  for (int run = 1; run < 3; ++run) {
    if (ds_trees[run] != ds_trees[0]) mismatched.push_back(fmt("dataset-build run %d", run));
    if (degrade_bytes[run] != degrade_bytes[0]) mismatched.push_back(fmt("degrade run %d", run));
    if (train_trees[run] != train_trees[0]) mismatched.push_back(fmt("train run %d", run));
  }
  std::string detail = fmt("3 runs (workers 1/2/3): %zu dataset files, %zu training files",
                           ds_trees[0].size(), train_trees[0].size());
  for (const auto& m : mismatched) detail += "; differs: " + m;
  return {mismatched.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = fs::temp_directory_path() / "convbeers_acceptance";
  std::set<int> only;
  bool reuse = false, prepare = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--reuse") {
      reuse = true;
    } else if (a == "--prepare") {
      prepare = true;
    } else if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string tok; std::getline(ss, tok, ',');) only.insert(std::stoi(tok));
    } else {
      work = a;
    }
  }
  fs::create_directories(work);
  if (prepare) {
    try {
      const Trained t = train_desk_model(work, false);
      std::printf("desk model ready: %zu train pairs, %.0fs\n", t.manifest.count(Split::train), t.seconds);
      return 0;
    } catch (const std::exception& e) {
      std::printf("desk training failed: %s\n", e.what());
      return 1;
    }
  }
  auto wanted = [&](int n) { return only.empty() || only.count(n); };

  int failures = 0;
  auto report = [&](int n, const char* name, const std::function<Outcome()>& fn) {
    if (!wanted(n)) return;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "parameter count", param_count);
  report(2, "gradient correctness", gradient_check);
  report(3, "MTF closure", mtf_closure);
  report(4, "SNR closure", snr_closure);
  if (wanted(5) || wanted(6) || wanted(7) || wanted(8)) {
    std::optional<Trained> t;
    std::string error;
    try {
      t = train_desk_model(work, reuse);
    } catch (const std::exception& e) {
      error = e.what();
    }
    auto with_model = [&](auto fn) {
      return [&, fn]() -> Outcome {
        if (!t) return {false, "desk training failed: " + error};
        return fn(*t);
      };
    };
    report(5, "restoration gain", with_model(restoration_gain));
    report(6, "restored MTF gain", with_model(mtf_gain));
    report(7, "INT8 drift", with_model(quant_drift));
    report(8, "tiling equivalence", with_model(tiling_equivalence));
  }
  report(9, "metric oracles", metric_oracles);
  report(10, "determinism", [&] { return determinism(work); });
  std::printf("%s: %d failing\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
