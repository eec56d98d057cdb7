#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "convbeers/manifest.hpp"
#include "convbeers/network.hpp"
#include "convbeers/trainer.hpp"

namespace convbeers {

inline constexpr double kQuantScaleFloor = 1e-8;
inline constexpr double kActivationPercentile = 99.9;

/// Symmetric per-tensor quantizer, zero point 0.
struct QuantParams {
  double scale = 1.0;
  int bits = 8;

  std::int32_t qmax() const noexcept { return (std::int32_t{1} << (bits - 1)) - 1; }
  /// Round half to even, clamp to [-qmax, qmax].
  std::int32_t quantize(double v) const noexcept;
  float dequantize(std::int32_t q) const noexcept { return static_cast<float>(q * scale); }
  float fake(double v) const noexcept { return dequantize(quantize(v)); }
};

/// Scale for max|w| (or a percentile of |a|): value / qmax, floored at 1e-8.
QuantParams make_quant_params(double abs_max, int bits);

/// Nearest-rank percentile of |values|: element ceil(q/100 * n) of the sorted
/// absolute values (1-based). q in (0, 100].
double abs_percentile(std::span<const float> values, double q);

struct CalibrationSummary {
  std::size_t patches = 0;
  std::vector<std::uint64_t> samples;  ///< activation count per boundary (input first)
  std::vector<double> abs_max;         ///< per boundary
  std::vector<double> percentile;      ///< per boundary
};

struct QuantModel {
  NetworkParams reference;             ///< float model
  int bits = 8;
  std::vector<QuantParams> weights;    ///< one per conv
  QuantParams input;                   ///< network input boundary
  std::vector<QuantParams> activations;  ///< one per conv output
  CalibrationSummary summary;
};

/// Weight scales from max|w|; activation scales from the 99.9th-percentile
/// |a| over a float forward pass of the calibration patches (at least 8).
QuantModel calibrate(const NetworkParams& params, const std::vector<Tensor>& calibration,
                     int bits = 8);

/// Float model with every weight snapped to its grid; biases stay float.
NetworkParams quantized_weights(const QuantModel& qm);

/// Fake-quantized inference: grid-snapped weights, and the input plus every
/// conv output snapped to its activation grid. Skip adds see dequantized values.
Tensor quantized_forward(const QuantModel& qm, const Tensor& x, int workers = 1);

/// Hook that snaps activations to the model's grids (for tiled inference).
ActivationHook<float> quantization_hook(const QuantModel& qm);

struct PairDrift {
  double mae = 0;             ///< mean |float - int8|, normalized units
  double psnr_float_db = 0;
  double psnr_int8_db = 0;
  double ssim_float = 0;
  double ssim_int8 = 0;
};

struct DriftReport {
  std::vector<PairDrift> pairs;
  double mae = 0;             ///< over all pixels of all pairs
  double std = 0;             ///< std of the signed difference over all pixels
  double psnr_float_db = 0;   ///< means over pairs
  double psnr_int8_db = 0;
  double ssim_float = 0;
  double ssim_int8 = 0;
  std::size_t float_payload_bytes = 0;  ///< parameters x 4
  std::size_t int8_payload_bytes = 0;   ///< weights x 1 + biases x 4 + scales x 4
  double size_ratio = 0;
};

DriftReport compare(const QuantModel& qm, const std::vector<TrainingPair>& pairs,
                    const RadiometricScale& scale = {}, int workers = 1);
/// Uses the manifest's test split, or every entry when it has none.
DriftReport compare(const QuantModel& qm, const DatasetManifest& manifest,
                    const RadiometricScale& scale = {}, int workers = 1);

/// "CBQ8" file: u32 version, u32 channels, u32 blocks, u32 bits, f64 input
/// scale, then per conv {u8 name length, name, f64 weight scale, f64
/// activation scale, u8 rank, u32 dims, int8/int16 weights, f32 biases}.
std::vector<std::uint8_t> encode_quant_model(const QuantModel& qm);
QuantModel decode_quant_model(std::span<const std::uint8_t> bytes);
void save_quant_model(const QuantModel& qm, const std::filesystem::path& path);
QuantModel load_quant_model(const std::filesystem::path& path);

}  // namespace convbeers
