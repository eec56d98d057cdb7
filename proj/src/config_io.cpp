#include "convbeers/config_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "bytes.hpp"
#include "convbeers/error.hpp"

namespace convbeers {
namespace {

[[noreturn]] void fail(const std::string& what, const std::vector<std::string>& problems) {
  std::string msg = what + ": ";
  for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
  throw Error(ErrorCode::config, msg);
}

void unknown_keys(const Json& j, const std::vector<std::string>& allowed,
                  std::vector<std::string>& problems) {
  for (const auto& [key, value] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      problems.push_back("unknown key \"" + key + "\"");
}

// Reads j[key] into out when present; records a type problem otherwise.
template <class T>
void read(const Json& j, const char* key, T& out, std::vector<std::string>& problems) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) return problems.push_back(std::string("\"") + key + "\" must be a number");
    out = v.get<double>();
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      return problems.push_back(std::string("\"") + key + "\" must be a non-negative integer");
    out = v.get<std::uint64_t>();
  } else {
    if (!v.is_number_integer())
      return problems.push_back(std::string("\"") + key + "\" must be an integer");
    out = v.get<T>();
  }
}

void read_range(const Json& j, const char* scalar, const char* range, Range& out,
                std::vector<std::string>& problems) {
  const bool has_scalar = j.contains(scalar), has_range = j.contains(range);
  if (has_scalar && has_range) {
    problems.push_back(std::string("give either \"") + scalar + "\" or \"" + range + "\", not both");
    return;
  }
  if (has_scalar) {
    double v = out.first;
    read(j, scalar, v, problems);
    out = {v, v};
  } else if (has_range) {
    const Json& r = j.at(range);
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
      problems.push_back(std::string("\"") + range + "\" must be a [lo, hi] pair of numbers");
      return;
    }
    out = {r[0].get<double>(), r[1].get<double>()};
  }
}

}  // namespace

Json load_json_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  require(static_cast<bool>(f), ErrorCode::io, "cannot open " + path.string());
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::format, "invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  const std::string text = j.dump(2) + "\n";
  detail::write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void require_known_keys(const Json& j, const std::vector<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) fail(what, {"expected a JSON object"});
  std::vector<std::string> problems;
  unknown_keys(j, allowed, problems);
  if (!problems.empty()) fail(what, problems);
}

const std::vector<std::string>& degradation_config_keys() {
  static const std::vector<std::string> keys{"mtf_nyq", "mtf_range", "snr0", "snr0_range", "snr1",
                                             "snr1_range", "l0", "l1", "oversampling", "seed"};
  return keys;
}

const std::vector<std::string>& train_config_keys() {
  static const std::vector<std::string> keys{"epochs",     "batch", "lr",   "lambda_l1",
                                             "lambda_p", "lambda_fft", "seed", "patch"};
  return keys;
}

DegradationConfig degradation_preset(const std::string& name) {
  if (name == "sim-degraded-variable") return sim_degraded_variable();
  if (name == "sim-degraded-fixed") return sim_degraded_fixed();
  if (name == "sim-reference-fixed") return sim_reference_fixed();
  throw Error(ErrorCode::config, "unknown degradation preset \"" + name +
                                     "\" (expected sim-degraded-variable, sim-degraded-fixed or "
                                     "sim-reference-fixed)");
}

DegradationConfig degradation_from_json(const Json& j, const DegradationConfig& base) {
  if (j.is_string()) return degradation_preset(j.get<std::string>());
  if (!j.is_object()) fail("degradation config", {"expected an object or a preset name"});
  DegradationConfig cfg = base;
  std::vector<std::string> problems;
  unknown_keys(j, degradation_config_keys(), problems);
  read_range(j, "mtf_nyq", "mtf_range", cfg.mtf_range, problems);
  read_range(j, "snr0", "snr0_range", cfg.snr0_range, problems);
  read_range(j, "snr1", "snr1_range", cfg.snr1_range, problems);
  read(j, "l0", cfg.l0, problems);
  read(j, "l1", cfg.l1, problems);
  read(j, "oversampling", cfg.oversampling, problems);
  read(j, "seed", cfg.seed, problems);
  for (auto& v : cfg.violations()) problems.push_back(std::move(v));
  if (!problems.empty()) fail("degradation config", problems);
  return cfg;
}

Json degradation_to_json(const DegradationConfig& cfg) {
  Json j;
  j["mtf_range"] = {cfg.mtf_range.first, cfg.mtf_range.second};
  j["snr0_range"] = {cfg.snr0_range.first, cfg.snr0_range.second};
  j["snr1_range"] = {cfg.snr1_range.first, cfg.snr1_range.second};
  j["l0"] = cfg.l0;
  j["l1"] = cfg.l1;
  j["oversampling"] = cfg.oversampling;
  j["seed"] = cfg.seed;
  return j;
}

TrainConfig train_config_from_json(const Json& j, const TrainConfig& base) {
  if (!j.is_object()) fail("training config", {"expected a JSON object"});
  TrainConfig cfg = base;
  std::vector<std::string> problems;
  unknown_keys(j, train_config_keys(), problems);
  read(j, "epochs", cfg.epochs, problems);
  read(j, "batch", cfg.batch, problems);
  read(j, "lr", cfg.lr, problems);
  read(j, "lambda_l1", cfg.weights.l1, problems);
  read(j, "lambda_p", cfg.weights.perceptual, problems);
  read(j, "lambda_fft", cfg.weights.fft, problems);
  read(j, "seed", cfg.seed, problems);
  read(j, "patch", cfg.patch, problems);
  for (auto& v : cfg.violations()) problems.push_back(std::move(v));
  if (!problems.empty()) fail("training config", problems);
  return cfg;
}

Json train_config_to_json(const TrainConfig& cfg) {
  Json j;
  j["epochs"] = cfg.epochs;
  j["batch"] = cfg.batch;
  j["lr"] = cfg.lr;
  j["lambda_l1"] = cfg.weights.l1;
  j["lambda_p"] = cfg.weights.perceptual;
  j["lambda_fft"] = cfg.weights.fft;
  j["seed"] = cfg.seed;
  j["patch"] = cfg.patch;
  return j;
}

Json applied_to_json(const AppliedParams& a) {
  Json j;
  j["mtf_nyq"] = a.mtf_nyq;
  j["gamma"] = a.gamma;
  j["psf_support"] = a.psf_support;
  j["oversampling"] = a.oversampling;
  j["snr0"] = a.noise.snr0;
  j["snr1"] = a.noise.snr1;
  j["l0"] = a.noise.l0;
  j["l1"] = a.noise.l1;
  j["alpha"] = a.noise_params.alpha;
  j["beta"] = a.noise_params.beta;
  j["seed"] = a.seed;
  j["blur_clamped"] = a.blur_clamped;
  j["noise_clamped"] = a.noise_clamped;
  return j;
}

}  // namespace convbeers

namespace convbeers {

std::vector<RoiSpec> rois_from_json(const Json& j) {
  if (!j.is_array()) fail("ROI sidecar", {"expected a JSON array"});
  std::vector<RoiSpec> out;
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& e = j[i];
    const std::string at = "entry " + std::to_string(i) + ": ";
    if (!e.is_object()) {
      problems.push_back(at + "expected an object");
      continue;
    }
    std::vector<std::string> local;
    unknown_keys(e, {"x", "y", "w", "h", "kind"}, local);
    RoiSpec s;
    for (const char* k : {"x", "y", "w", "h"})
      if (!e.contains(k)) local.push_back(std::string("missing \"") + k + "\"");
    read(e, "x", s.roi.x, local);
    read(e, "y", s.roi.y, local);
    read(e, "w", s.roi.w, local);
    read(e, "h", s.roi.h, local);
    if (!e.contains("kind") || !e["kind"].is_string() ||
        (e["kind"] != "edge" && e["kind"] != "flat"))
      local.push_back("\"kind\" must be \"edge\" or \"flat\"");
    else
      s.kind = e["kind"].get<std::string>();
    for (auto& p : local) problems.push_back(at + p);
    if (local.empty()) out.push_back(s);
  }
  if (!problems.empty()) fail("ROI sidecar", problems);
  return out;
}

}  // namespace convbeers
