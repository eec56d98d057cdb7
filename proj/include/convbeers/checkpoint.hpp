#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "convbeers/network.hpp"

namespace convbeers {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// "CBRS", u32 version, u32 channels, u32 blocks, then per tensor in
/// canonical order: u8 name length, name, u8 rank, u32 dims, f32 payload.
/// All integers and floats little-endian.
std::vector<std::uint8_t> encode_checkpoint(const NetworkParams& params);
NetworkParams decode_checkpoint(std::span<const std::uint8_t> bytes);

std::size_t checkpoint_size(const NetworkShape& shape);

/// Written to a temporary sibling and renamed into place.
void save_checkpoint(const NetworkParams& params, const std::filesystem::path& path);
NetworkParams load_checkpoint(const std::filesystem::path& path);

}  // namespace convbeers
