#include "convbeers/checkpoint.hpp"

#include "bytes.hpp"
#include "convbeers/error.hpp"

namespace convbeers {

std::vector<std::uint8_t> encode_checkpoint(const NetworkParams& params) {
  detail::ByteWriter w;
  w.raw("CBRS", 4);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(params.shape().channels));
  w.u32(static_cast<std::uint32_t>(params.shape().blocks));
  for (const auto& t : params.tensors()) {
    w.u8(static_cast<std::uint8_t>(t.name.size()));
    w.raw(t.name.data(), t.name.size());
    w.u8(static_cast<std::uint8_t>(t.dims.size()));
    for (auto d : t.dims) w.u32(d);
    for (float v : t.values) w.f32(v);
  }
  return std::move(w.bytes());
}

NetworkParams decode_checkpoint(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  require(bytes.size() >= 4 && r.str(4) == "CBRS", ErrorCode::format, "checkpoint: bad magic");
  const auto version = r.u32();
  require(version == kCheckpointVersion, ErrorCode::format,
          "checkpoint: version mismatch (file " + std::to_string(version) + ", expected " +
              std::to_string(kCheckpointVersion) + ")");
  NetworkShape shape;
  shape.channels = static_cast<int>(r.u32());
  shape.blocks = static_cast<int>(r.u32());
  require(shape.channels >= 1 && shape.channels <= 4096 && shape.blocks >= 0 && shape.blocks <= 1024,
          ErrorCode::format, "checkpoint: implausible network shape");
  NetworkParams p(shape);
  for (auto& t : p.tensors()) {
    const std::string name = r.str(r.u8());
    require(name == t.name, ErrorCode::format,
            "checkpoint: expected tensor " + t.name + ", found " + name);
    const auto rank = r.u8();
    require(rank == t.dims.size(), ErrorCode::format, "checkpoint: rank mismatch for " + name);
    for (auto d : t.dims)
      require(r.u32() == d, ErrorCode::format, "checkpoint: dimension mismatch for " + name);
    for (float& v : t.values) v = r.f32();
  }
  require(r.done(), ErrorCode::format,
          "length mismatch: " + std::to_string(r.remaining()) + " trailing bytes in checkpoint");
  return p;
}

std::size_t checkpoint_size(const NetworkShape& shape) {
  const NetworkParams p(shape);
  std::size_t n = 16;
  for (const auto& t : p.tensors()) n += 1 + t.name.size() + 1 + 4 * t.dims.size() + 4 * t.values.size();
  return n;
}

void save_checkpoint(const NetworkParams& params, const std::filesystem::path& path) {
  const auto bytes = encode_checkpoint(params);
  detail::write_file_atomic(path, bytes);
}

NetworkParams load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(detail::read_file(path));
}

}  // namespace convbeers
