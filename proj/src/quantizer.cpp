#include "convbeers/quantizer.hpp"

#include <algorithm>
#include <cmath>

#include "bytes.hpp"
#include "convbeers/checkpoint.hpp"
#include "convbeers/error.hpp"
#include "convbeers/quality.hpp"
#include "convbeers/tiff_io.hpp"
#include "parallel.hpp"

namespace convbeers {

std::int32_t QuantParams::quantize(double v) const noexcept {
  const double q = std::nearbyint(v / scale);
  const double m = qmax();
  return static_cast<std::int32_t>(std::clamp(q, -m, m));
}

QuantParams make_quant_params(double abs_max, int bits) {
  require(bits >= 2 && bits <= 16, ErrorCode::invalid_argument, "quantizer: bits must be in [2, 16]");
  QuantParams p;
  p.bits = bits;
  p.scale = std::max(abs_max / p.qmax(), kQuantScaleFloor);
  return p;
}

namespace {

std::size_t nearest_rank(std::size_t n, double q) {
  const double k = std::ceil(q / 100.0 * static_cast<double>(n) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(k, 1.0)), 1, n);
}

constexpr int kHistogramBins = 4096;

int bin_of(double a, double max) {
  if (!(max > 0)) return 0;
  return std::min(kHistogramBins - 1, static_cast<int>(a / max * kHistogramBins));
}

}  // namespace

double abs_percentile(std::span<const float> values, double q) {
  require(!values.empty(), ErrorCode::invalid_argument, "abs_percentile: no values");
  require(q > 0 && q <= 100, ErrorCode::invalid_argument, "abs_percentile: q must be in (0, 100]");
  std::vector<float> a(values.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(values[i]);
  const std::size_t k = nearest_rank(a.size(), q) - 1;
  std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k), a.end());
  return a[k];
}

QuantModel calibrate(const NetworkParams& params, const std::vector<Tensor>& calibration, int bits) {
  std::size_t patches = 0;
  for (const auto& t : calibration) patches += static_cast<std::size_t>(t.batch());
  require(patches > 0, ErrorCode::invalid_argument, "calibrate: empty calibration set");
  require(patches >= 8, ErrorCode::invalid_argument,
          "calibrate: need at least 8 calibration patches, got " + std::to_string(patches));
  QuantModel qm;
  qm.reference = params;
  qm.bits = bits;
  const int layers = params.layers();
  for (int l = 0; l < layers; ++l) {
    double m = 0;
    for (float w : params.weight(l).values) m = std::max(m, static_cast<double>(std::abs(w)));
    qm.weights.push_back(make_quant_params(m, bits));
  }

  // Exact nearest-rank percentile per boundary in three streaming passes:
  // max, histogram, then the values of the bin that holds the rank.
  const std::size_t boundaries = static_cast<std::size_t>(layers) + 1;
  auto run = [&](const ActivationHook<float>& hook) {
    for (const auto& t : calibration) forward(params, t, 1, &hook);
  };
  std::vector<double> maxv(boundaries, 0.0);
  std::vector<std::uint64_t> count(boundaries, 0);
  run([&](int layer, float* d, std::size_t n) {
    const auto b = static_cast<std::size_t>(layer + 1);
    for (std::size_t i = 0; i < n; ++i) maxv[b] = std::max(maxv[b], static_cast<double>(std::abs(d[i])));
    count[b] += n;
  });
  std::vector<std::vector<std::uint64_t>> hist(boundaries, std::vector<std::uint64_t>(kHistogramBins, 0));
  run([&](int layer, float* d, std::size_t n) {
    const auto b = static_cast<std::size_t>(layer + 1);
    for (std::size_t i = 0; i < n; ++i) ++hist[b][static_cast<std::size_t>(bin_of(std::abs(d[i]), maxv[b]))];
  });
  std::vector<int> target_bin(boundaries);
  std::vector<std::uint64_t> rank_in_bin(boundaries);
  for (std::size_t b = 0; b < boundaries; ++b) {
    const std::uint64_t k = nearest_rank(count[b], kActivationPercentile);
    std::uint64_t cum = 0;
    int bin = 0;
    while (cum + hist[b][static_cast<std::size_t>(bin)] < k) cum += hist[b][static_cast<std::size_t>(bin++)];
    target_bin[b] = bin;
    rank_in_bin[b] = k - cum - 1;
  }
  std::vector<std::vector<float>> in_bin(boundaries);
  run([&](int layer, float* d, std::size_t n) {
    const auto b = static_cast<std::size_t>(layer + 1);
    for (std::size_t i = 0; i < n; ++i) {
      const float a = std::abs(d[i]);
      if (bin_of(a, maxv[b]) == target_bin[b]) in_bin[b].push_back(a);
    }
  });
  qm.summary.patches = patches;
  for (std::size_t b = 0; b < boundaries; ++b) {
    auto& v = in_bin[b];
    const auto k = static_cast<std::ptrdiff_t>(rank_in_bin[b]);
    std::nth_element(v.begin(), v.begin() + k, v.end());
    const double p = v[static_cast<std::size_t>(k)];
    qm.summary.samples.push_back(count[b]);
    qm.summary.abs_max.push_back(maxv[b]);
    qm.summary.percentile.push_back(p);
    if (b == 0) qm.input = make_quant_params(p, bits);
    else qm.activations.push_back(make_quant_params(p, bits));
  }
  return qm;
}

NetworkParams quantized_weights(const QuantModel& qm) {
  NetworkParams p = qm.reference;
  for (int l = 0; l < p.layers(); ++l)
    for (float& w : p.weight(l).values) w = qm.weights[static_cast<std::size_t>(l)].fake(w);
  return p;
}

ActivationHook<float> quantization_hook(const QuantModel& qm) {
  return [input = qm.input, acts = qm.activations](int layer, float* d, std::size_t n) {
    const QuantParams& q = layer < 0 ? input : acts[static_cast<std::size_t>(layer)];
    for (std::size_t i = 0; i < n; ++i) d[i] = q.fake(d[i]);
  };
}

Tensor quantized_forward(const QuantModel& qm, const Tensor& x, int workers) {
  require(qm.weights.size() == static_cast<std::size_t>(qm.reference.layers()) &&
              qm.activations.size() == qm.weights.size(),
          ErrorCode::invalid_argument, "quantized_forward: model is not calibrated");
  const NetworkParams p = quantized_weights(qm);
  const auto hook = quantization_hook(qm);
  return forward(p, x, workers, &hook);
}

DriftReport compare(const QuantModel& qm, const std::vector<TrainingPair>& pairs,
                    const RadiometricScale& scale, int workers) {
  require(!pairs.empty(), ErrorCode::invalid_argument, "compare: no pairs");
  const double peak = scale.radiance_at_dn_max;
  const NetworkParams qp = quantized_weights(qm);
  const auto hook = quantization_hook(qm);
  DriftReport rep;
  rep.pairs.resize(pairs.size());
  std::vector<double> sum(pairs.size()), sum_abs(pairs.size()), sum_sq(pairs.size());
  std::vector<std::size_t> count(pairs.size());
  detail::parallel_for(static_cast<int>(pairs.size()), workers, [&](int idx) {
    const auto i = static_cast<std::size_t>(idx);
    const Tensor x = image_to_tensor(pairs[i].degraded, peak);
    const Tensor yf = forward(qm.reference, x);
    const Tensor yq = forward(qp, x, 1, &hook);
    for (std::size_t k = 0; k < yf.size(); ++k) {
      const double d = static_cast<double>(yq.data()[k]) - yf.data()[k];
      sum[i] += d;
      sum_abs[i] += std::abs(d);
      sum_sq[i] += d * d;
    }
    count[i] = yf.size();
    const PanImage rf = dn_roundtrip(tensor_to_image(yf, 0, peak), scale);
    const PanImage rq = dn_roundtrip(tensor_to_image(yq, 0, peak), scale);
    PairDrift& p = rep.pairs[i];
    p.mae = sum_abs[i] / static_cast<double>(count[i]);
    p.psnr_float_db = psnr(rf, pairs[i].reference, peak);
    p.psnr_int8_db = psnr(rq, pairs[i].reference, peak);
    p.ssim_float = ssim(rf, pairs[i].reference, peak);
    p.ssim_int8 = ssim(rq, pairs[i].reference, peak);
  });
  double s = 0, sa = 0, ss = 0, n = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    s += sum[i];
    sa += sum_abs[i];
    ss += sum_sq[i];
    n += static_cast<double>(count[i]);
    rep.psnr_float_db += rep.pairs[i].psnr_float_db;
    rep.psnr_int8_db += rep.pairs[i].psnr_int8_db;
    rep.ssim_float += rep.pairs[i].ssim_float;
    rep.ssim_int8 += rep.pairs[i].ssim_int8;
  }
  const double np = static_cast<double>(pairs.size());
  rep.mae = sa / n;
  rep.std = std::sqrt(std::max(0.0, ss / n - (s / n) * (s / n)));
  rep.psnr_float_db /= np;
  rep.psnr_int8_db /= np;
  rep.ssim_float /= np;
  rep.ssim_int8 /= np;
  std::size_t weights = 0, biases = 0;
  for (int l = 0; l < qm.reference.layers(); ++l) {
    weights += qm.reference.weight(l).values.size();
    biases += qm.reference.bias(l).values.size();
  }
  const std::size_t scales = qm.weights.size() + qm.activations.size() + 1;
  rep.float_payload_bytes = qm.reference.parameter_count() * 4;
  rep.int8_payload_bytes = weights * (qm.bits <= 8 ? 1 : 2) + biases * 4 + scales * 4;
  rep.size_ratio = static_cast<double>(rep.float_payload_bytes) / static_cast<double>(rep.int8_payload_bytes);
  return rep;
}

DriftReport compare(const QuantModel& qm, const DatasetManifest& manifest,
                    const RadiometricScale& scale, int workers) {
  require(!manifest.entries.empty(), ErrorCode::invalid_argument, "compare: empty manifest");
  auto pairs = load_pairs(manifest, Split::test, scale);
  if (pairs.empty()) {
    for (Split s : {Split::train, Split::val}) {
      auto more = load_pairs(manifest, s, scale);
      pairs.insert(pairs.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    }
  }
  return compare(qm, pairs, scale, workers);
}

namespace {

void put_f64(detail::ByteWriter& w, double v) {
  const auto u = std::bit_cast<std::uint64_t>(v);
  w.u32(static_cast<std::uint32_t>(u));
  w.u32(static_cast<std::uint32_t>(u >> 32));
}

double get_f64(detail::ByteReader& r) {
  const std::uint64_t lo = r.u32(), hi = r.u32();
  return std::bit_cast<double>(lo | (hi << 32));
}

}  // namespace

std::vector<std::uint8_t> encode_quant_model(const QuantModel& qm) {
  require(qm.weights.size() == static_cast<std::size_t>(qm.reference.layers()), ErrorCode::invalid_argument,
          "encode_quant_model: model is not calibrated");
  detail::ByteWriter w;
  w.raw("CBQ8", 4);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(qm.reference.shape().channels));
  w.u32(static_cast<std::uint32_t>(qm.reference.shape().blocks));
  w.u32(static_cast<std::uint32_t>(qm.bits));
  put_f64(w, qm.input.scale);
  for (int l = 0; l < qm.reference.layers(); ++l) {
    const std::string name = layer_name(qm.reference.shape(), l);
    const auto& wq = qm.weights[static_cast<std::size_t>(l)];
    w.u8(static_cast<std::uint8_t>(name.size()));
    w.raw(name.data(), name.size());
    put_f64(w, wq.scale);
    put_f64(w, qm.activations[static_cast<std::size_t>(l)].scale);
    const auto& wt = qm.reference.weight(l);
    w.u8(static_cast<std::uint8_t>(wt.dims.size()));
    for (auto d : wt.dims) w.u32(d);
    for (float v : wt.values) {
      const std::int32_t q = wq.quantize(v);
      if (qm.bits <= 8) {
        w.i8(static_cast<std::int8_t>(q));
      } else {
        w.u8(static_cast<std::uint8_t>(q & 0xFF));
        w.u8(static_cast<std::uint8_t>((q >> 8) & 0xFF));
      }
    }
    for (float b : qm.reference.bias(l).values) w.f32(b);
  }
  return std::move(w.bytes());
}

QuantModel decode_quant_model(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  require(bytes.size() >= 4 && r.str(4) == "CBQ8", ErrorCode::format, "quantized model: bad magic");
  const auto version = r.u32();
  require(version == kCheckpointVersion, ErrorCode::format, "quantized model: version mismatch");
  NetworkShape shape;
  shape.channels = static_cast<int>(r.u32());
  shape.blocks = static_cast<int>(r.u32());
  require(shape.channels >= 1 && shape.channels <= 4096 && shape.blocks >= 0 && shape.blocks <= 1024,
          ErrorCode::format, "quantized model: implausible network shape");
  QuantModel qm;
  qm.bits = static_cast<int>(r.u32());
  require(qm.bits >= 2 && qm.bits <= 16, ErrorCode::format, "quantized model: bad bit width");
  qm.input = {get_f64(r), qm.bits};
  qm.reference = NetworkParams(shape);
  for (int l = 0; l < shape.layers(); ++l) {
    const std::string expected = layer_name(shape, l);
    const std::string name = r.str(r.u8());
    require(name == expected, ErrorCode::format,
            "quantized model: expected layer " + expected + ", found " + name);
    const QuantParams wq{get_f64(r), qm.bits};
    qm.weights.push_back(wq);
    qm.activations.push_back({get_f64(r), qm.bits});
    auto& wt = qm.reference.weight(l);
    require(r.u8() == wt.dims.size(), ErrorCode::format, "quantized model: rank mismatch in " + name);
    for (auto d : wt.dims)
      require(r.u32() == d, ErrorCode::format, "quantized model: dimension mismatch in " + name);
    for (float& v : wt.values) {
      std::int32_t q;
      if (qm.bits <= 8) {
        q = r.i8();
      } else {
        const std::uint32_t lo = r.u8(), hi = r.u8();
        q = static_cast<std::int16_t>(static_cast<std::uint16_t>(lo | (hi << 8)));
      }
      v = wq.dequantize(q);
    }
    for (float& b : qm.reference.bias(l).values) b = r.f32();
  }
  require(r.done(), ErrorCode::format, "length mismatch: trailing bytes in quantized model");
  return qm;
}

void save_quant_model(const QuantModel& qm, const std::filesystem::path& path) {
  detail::write_file_atomic(path, encode_quant_model(qm));
}

QuantModel load_quant_model(const std::filesystem::path& path) {
  return decode_quant_model(detail::read_file(path));
}

}  // namespace convbeers
