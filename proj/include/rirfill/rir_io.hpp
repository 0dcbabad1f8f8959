#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rirfill/types.hpp"

namespace rirfill {

// RIRB: "RIRB", u32 LE {version = 1, N, K, Fs}, then N * K float32 LE in
// time-major order. Geometry, source, room and seed go to <stem>.json.
inline constexpr std::uint32_t kRirbVersion = 1;

struct RirMetadata {
  std::optional<RoomSpec> room;
  std::optional<std::uint64_t> seed;
  double target_t60 = 0.0;  // 0 when unknown
};

std::filesystem::path sidecar_path(const std::filesystem::path& path);

void save_rirb(const std::filesystem::path& path, const RirMatrix& matrix,
               const RirMetadata& meta = {});

// Reads the sidecar as well when it exists; without it geometry and source
// stay default-initialised.
RirMatrix load_rirb(const std::filesystem::path& path, RirMetadata* meta = nullptr);

// Patch dataset: "RIRP", u32 LE {version = 1, count, patch size}, then the
// patches as float32 LE, row-major. The fingerprint goes to <stem>.json.
void save_patches(const std::filesystem::path& path, const std::vector<std::vector<float>>& patches,
                  const std::string& fingerprint, const std::string& description = {});
std::vector<std::vector<float>> load_patches(const std::filesystem::path& path);

}  // namespace rirfill
