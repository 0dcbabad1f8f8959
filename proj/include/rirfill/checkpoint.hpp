#pragma once

#include <filesystem>

#include "rirfill/diffusion.hpp"

namespace rirfill {

// Checkpoint layout:
//   bytes 0..7    magic "RIRFCKPT"
//   u32 LE        format version (1)
//   u64 LE        header length H
//   H bytes       UTF-8 JSON header: model config, schedule, training
//                 metadata and the tensor table (name, shape, offset, count)
//   remaining     little-endian float32 weights, tensors in table order,
//                 each tensor row-major in its listed shape
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const DiffusionModel& model);
DiffusionModel load_checkpoint(const std::filesystem::path& path);

}  // namespace rirfill
