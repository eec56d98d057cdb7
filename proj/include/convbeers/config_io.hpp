#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "convbeers/quality.hpp"
#include "convbeers/sensor_sim.hpp"
#include "convbeers/trainer.hpp"

namespace convbeers {

using Json = nlohmann::ordered_json;

Json load_json_file(const std::filesystem::path& path);
/// Two-space indented, newline-terminated, written atomically.
void write_json_file(const std::filesystem::path& path, const Json& j);

/// Throws a config error listing every violation when `j` is not an object
/// or holds keys outside `allowed`.
void require_known_keys(const Json& j, const std::vector<std::string>& allowed, const std::string& what);

const std::vector<std::string>& degradation_config_keys();
const std::vector<std::string>& train_config_keys();

/// "sim-degraded-variable", "sim-degraded-fixed" or "sim-reference-fixed".
DegradationConfig degradation_preset(const std::string& name);

/// Either a preset name (string) or an object with the degradation keys,
/// overlaid on `base`. Every violation is reported in one config error.
DegradationConfig degradation_from_json(const Json& j, const DegradationConfig& base = {});
Json degradation_to_json(const DegradationConfig& cfg);

TrainConfig train_config_from_json(const Json& j, const TrainConfig& base = {});
Json train_config_to_json(const TrainConfig& cfg);

/// Sidecar record of one degrade() call.
Json applied_to_json(const AppliedParams& applied);

}  // namespace convbeers

namespace convbeers {

struct RoiSpec {
  Roi roi;
  std::string kind;  ///< "edge" or "flat"
};

/// ROI sidecar: a JSON array of {"x","y","w","h","kind"}.
std::vector<RoiSpec> rois_from_json(const Json& j);

}  // namespace convbeers
