#include "convbeers/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <numeric>

#include "convbeers/checkpoint.hpp"
#include "convbeers/error.hpp"
#include "convbeers/quality.hpp"
#include "convbeers/rng.hpp"
#include "convbeers/tensor.hpp"
#include "convbeers/tiff_io.hpp"
#include "convbeers/tiling.hpp"
#include "parallel.hpp"

namespace convbeers {

std::vector<std::string> TrainConfig::violations() const {
  std::vector<std::string> v;
  if (epochs < 0) v.push_back("epochs must be >= 0");
  if (batch < 1) v.push_back("batch must be >= 1");
  if (!(lr >= 0) || !std::isfinite(lr)) v.push_back("lr must be finite and >= 0");
  if (!(weights.l1 >= 0)) v.push_back("lambda_l1 must be >= 0");
  if (!(weights.perceptual >= 0)) v.push_back("lambda_p must be >= 0");
  if (!(weights.fft >= 0)) v.push_back("lambda_fft must be >= 0");
  if (patch < 3) v.push_back("patch must be >= 3");
  if (workers < 1) v.push_back("workers must be >= 1");
  return v;
}

void TrainConfig::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg = "invalid training config:";
  for (const auto& s : v) msg += " " + s + ";";
  throw Error(ErrorCode::config, msg);
}

std::string epoch_record_json(const EpochRecord& r) {
  nlohmann::ordered_json j;
  j["epoch"] = r.epoch;
  j["steps"] = r.steps;
  j["l1"] = r.train_loss.l1;
  j["fft"] = r.train_loss.fft;
  j["perceptual"] = r.train_loss.perceptual;
  j["total"] = r.train_loss.total;
  j["val_psnr_db"] = r.val_psnr_db ? nlohmann::ordered_json(*r.val_psnr_db) : nullptr;
  j["val_ssim"] = r.val_ssim ? nlohmann::ordered_json(*r.val_ssim) : nullptr;
  return j.dump();
}

std::vector<TrainingPair> load_pairs(const DatasetManifest& manifest, Split split,
                                     const RadiometricScale& scale) {
  std::vector<TrainingPair> out;
  for (const auto& e : manifest.entries) {
    if (e.split != split) continue;
    TrainingPair p{load_tiff(manifest.degraded_path(e), scale),
                   load_tiff(manifest.reference_path(e), scale)};
    require(p.degraded.same_shape(p.reference), ErrorCode::dimension_mismatch,
            "training pair " + e.degraded + " / " + e.reference + " differ in size");
    out.push_back(std::move(p));
  }
  return out;
}

ValidationScore validate_pairs(const NetworkParams& params, const std::vector<TrainingPair>& pairs,
                               const RadiometricScale& scale, int workers) {
  require(!pairs.empty(), ErrorCode::invalid_argument, "validate_pairs: no pairs");
  std::vector<ValidationScore> scores(pairs.size());
  detail::parallel_for(static_cast<int>(pairs.size()), workers, [&](int i) {
    const auto& p = pairs[static_cast<std::size_t>(i)];
    const PanImage restored =
        dn_roundtrip(restore_image(params, p.degraded, scale.radiance_at_dn_max), scale);
    scores[static_cast<std::size_t>(i)] = {psnr(restored, p.reference, scale.radiance_at_dn_max),
                                           ssim(restored, p.reference, scale.radiance_at_dn_max)};
  });
  ValidationScore mean;
  for (const auto& s : scores) {
    mean.psnr_db += s.psnr_db;
    mean.ssim += s.ssim;
  }
  mean.psnr_db /= static_cast<double>(scores.size());
  mean.ssim /= static_cast<double>(scores.size());
  return mean;
}

namespace {

struct NormalizedPair {
  std::vector<float> x, y;
  int w, h;
};

NormalizedPair normalize(const TrainingPair& p, double scale) {
  NormalizedPair n{{}, {}, p.degraded.width(), p.degraded.height()};
  for (float v : p.degraded.pixels()) n.x.push_back(static_cast<float>(v / scale));
  for (float v : p.reference.pixels()) n.y.push_back(static_cast<float>(v / scale));
  return n;
}

bool finite(const LossBreakdown& l) {
  return std::isfinite(l.total) && std::isfinite(l.l1) && std::isfinite(l.fft) &&
         std::isfinite(l.perceptual);
}

}  // namespace

TrainResult train_pairs(const std::vector<TrainingPair>& train_set,
                        const std::vector<TrainingPair>& val_set, const TrainConfig& cfg,
                        const FeatureExtractor* fx, const NetworkParams* initial,
                        const EpochCallback& on_epoch) {
  cfg.validate();
  cfg.scale.validate();
  require(!train_set.empty(), ErrorCode::invalid_argument, "train: empty training set");
  const double scale = cfg.scale.radiance_at_dn_max;
  std::vector<NormalizedPair> data;
  for (const auto& p : train_set) {
    require(p.degraded.same_shape(p.reference), ErrorCode::dimension_mismatch,
            "train: degraded and reference patches differ in size");
    data.push_back(normalize(p, scale));
  }
  const int crop_w = std::min(cfg.patch, data.front().w);
  const int crop_h = std::min(cfg.patch, data.front().h);
  for (const auto& d : data)
    require(d.w >= crop_w && d.h >= crop_h, ErrorCode::dimension_mismatch,
            "train: every pair must be at least patch x patch");

  TrainResult result;
  result.params = initial ? *initial : init_params(cfg.seed, cfg.shape, cfg.init);
  require(result.params.shape() == cfg.shape || initial, ErrorCode::invalid_argument,
          "train: network shape mismatch");

  std::ofstream log;
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir / "checkpoints");
    log.open(cfg.out_dir / "train_log.jsonl", std::ios::trunc);
    require(static_cast<bool>(log), ErrorCode::io, "cannot write training log");
  }
  if (!val_set.empty()) {
    double base = 0;
    for (const auto& p : val_set) base += psnr(p.degraded, p.reference, scale);
    result.baseline_val_psnr_db = base / static_cast<double>(val_set.size());
  }

  AdamState adam;
  NetworkParams last_good = result.params;
  Rng rng(derive_seed(cfg.seed, 0x7472616E));
  std::vector<std::size_t> order(data.size());
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order.begin(), order.end());
    EpochRecord rec;
    rec.epoch = epoch;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch)) {
      const int n = static_cast<int>(std::min<std::size_t>(cfg.batch, order.size() - start));
      Tensor x(n, 1, crop_h, crop_w), y(n, 1, crop_h, crop_w);
      for (int i = 0; i < n; ++i) {
        const auto& d = data[order[start + static_cast<std::size_t>(i)]];
        const int ox = static_cast<int>(rng.below(static_cast<std::uint64_t>(d.w - crop_w + 1)));
        const int oy = static_cast<int>(rng.below(static_cast<std::uint64_t>(d.h - crop_h + 1)));
        for (int r = 0; r < crop_h; ++r) {
          const std::size_t src = static_cast<std::size_t>(oy + r) * d.w + ox;
          std::copy_n(d.x.data() + src, crop_w, x.item(i) + static_cast<std::size_t>(r) * crop_w);
          std::copy_n(d.y.data() + src, crop_w, y.item(i) + static_cast<std::size_t>(r) * crop_w);
        }
      }
      BackwardResult<float> step;
      try {
        step = backward(result.params, x, y, cfg.weights, fx, cfg.workers);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::numerical) throw;
        result.diverged = true;
        result.divergence_message = e.what();
      }
      if (!result.diverged && !finite(step.loss)) {
        result.diverged = true;
        result.divergence_message = "non-finite training loss";
      }
      if (result.diverged) {
        result.divergence_message += " (epoch " + std::to_string(epoch) + ", step " +
                                     std::to_string(rec.steps + 1) + ")";
        result.params = last_good;
        if (!cfg.out_dir.empty()) save_checkpoint(result.params, cfg.out_dir / "model.cbrs");
        return result;
      }
      adam_step(result.params, step.grads, adam, cfg.lr);
      ++rec.steps;
      rec.train_loss.l1 += step.loss.l1;
      rec.train_loss.fft += step.loss.fft;
      rec.train_loss.perceptual += step.loss.perceptual;
      rec.train_loss.total += step.loss.total;
    }
    if (rec.steps > 0) {
      rec.train_loss.l1 /= rec.steps;
      rec.train_loss.fft /= rec.steps;
      rec.train_loss.perceptual /= rec.steps;
      rec.train_loss.total /= rec.steps;
    }
    if (!val_set.empty()) {
      const ValidationScore v = validate_pairs(result.params, val_set, cfg.scale, cfg.workers);
      rec.val_psnr_db = v.psnr_db;
      rec.val_ssim = v.ssim;
    }
    last_good = result.params;
    result.log.push_back(rec);
    if (!cfg.out_dir.empty()) {
      log << epoch_record_json(rec) << '\n' << std::flush;
      char name[32];
      std::snprintf(name, sizeof(name), "epoch_%03d.cbrs", epoch);
      save_checkpoint(result.params, cfg.out_dir / "checkpoints" / name);
    }
    if (on_epoch) on_epoch(rec, result.params);
  }
  if (!cfg.out_dir.empty()) save_checkpoint(result.params, cfg.out_dir / "model.cbrs");
  return result;
}

TrainResult train(const DatasetManifest& manifest, const TrainConfig& cfg,
                  const FeatureExtractor* fx, const NetworkParams* initial,
                  const EpochCallback& on_epoch) {
  require(!manifest.entries.empty(), ErrorCode::invalid_argument, "train: empty manifest");
  const auto train_set = load_pairs(manifest, Split::train, cfg.scale);
  require(!train_set.empty(), ErrorCode::invalid_argument, "train: manifest has no train pairs");
  const auto val_set = load_pairs(manifest, Split::val, cfg.scale);
  return train_pairs(train_set, val_set, cfg, fx, initial, on_epoch);
}

}  // namespace convbeers
