#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rirfill/types.hpp"

namespace rirfill {

// Linear map from [-max_abs, max_abs] to [0, 65535]; zero lands on 32768.
struct GrayMapping {
  double max_abs = 0.0;
  int width = 0;   // microphones
  int height = 0;  // time samples

  std::uint16_t encode(double amplitude) const;
  double decode(std::uint16_t level) const;
  double step() const { return 2.0 * max_abs / 65535.0; }
};

struct Pgm16 {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> pixels;  // row-major
};

// Binary 16-bit PGM (P5, maxval 65535, big-endian samples), one row per time
// sample. The mapping goes to <file>.json, e.g. truth.pgm.json, so it never
// collides with an RIRB sidecar of the same stem.
GrayMapping export_rir_image(const RirMatrix& matrix, const std::filesystem::path& path);

std::filesystem::path image_sidecar_path(const std::filesystem::path& path);

void write_pgm16(const std::filesystem::path& path, const Pgm16& image);
Pgm16 read_pgm16(const std::filesystem::path& path);

// Amplitudes recovered from an exported image and its sidecar, time-major.
RirMatrix import_rir_image(const std::filesystem::path& path);

}  // namespace rirfill
