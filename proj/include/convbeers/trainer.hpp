#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "convbeers/backward.hpp"
#include "convbeers/image.hpp"
#include "convbeers/loss.hpp"
#include "convbeers/manifest.hpp"
#include "convbeers/network.hpp"

namespace convbeers {

struct TrainConfig {
  int epochs = 30;
  int batch = 16;
  double lr = 1e-4;
  LossWeights weights;
  std::uint64_t seed = 0;
  int patch = 128;  ///< training crop side; larger pairs are cropped at random

  // Run-time settings, not part of the JSON config.
  int workers = 1;
  NetworkShape shape;
  InitScheme init = InitScheme::kaiming_damped_residual;
  RadiometricScale scale;
  std::filesystem::path out_dir;  ///< log + checkpoints; empty writes nothing

  std::vector<std::string> violations() const;
  void validate() const;
};

struct TrainingPair {
  PanImage degraded;
  PanImage reference;
};

struct EpochRecord {
  int epoch = 0;
  int steps = 0;
  LossBreakdown train_loss;  ///< mean over the epoch's batches
  std::optional<double> val_psnr_db;
  std::optional<double> val_ssim;
};

struct TrainResult {
  NetworkParams params;
  std::vector<EpochRecord> log;
  std::optional<double> baseline_val_psnr_db;  ///< degraded vs reference
  bool diverged = false;
  std::string divergence_message;
};

using EpochCallback = std::function<void(const EpochRecord&, const NetworkParams&)>;

/// Adam over shuffled mini-batches. Writes train_log.jsonl, one checkpoint
/// per epoch and model.cbrs under cfg.out_dir. A non-finite loss stops
/// training and returns the last good parameters with diverged set.
TrainResult train_pairs(const std::vector<TrainingPair>& train_set,
                        const std::vector<TrainingPair>& val_set, const TrainConfig& cfg,
                        const FeatureExtractor* fx = nullptr,
                        const NetworkParams* initial = nullptr, const EpochCallback& on_epoch = {});

/// Loads the manifest's train and val splits and calls train_pairs.
TrainResult train(const DatasetManifest& manifest, const TrainConfig& cfg,
                  const FeatureExtractor* fx = nullptr, const NetworkParams* initial = nullptr,
                  const EpochCallback& on_epoch = {});

std::vector<TrainingPair> load_pairs(const DatasetManifest& manifest, Split split,
                                     const RadiometricScale& scale = {});

/// Mean PSNR/SSIM of restored vs reference, with restored outputs passed
/// through the DN grid exactly as a saved TIFF would be.
struct ValidationScore {
  double psnr_db = 0;
  double ssim = 0;
};
ValidationScore validate_pairs(const NetworkParams& params, const std::vector<TrainingPair>& pairs,
                               const RadiometricScale& scale, int workers = 1);

std::string epoch_record_json(const EpochRecord& record);

}  // namespace convbeers
