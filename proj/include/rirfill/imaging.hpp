#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rirfill/types.hpp"

namespace rirfill {

inline constexpr int kPatchSize = 64;
inline constexpr int kPatchOverlap = 16;
inline constexpr int kPatchStride = kPatchSize - kPatchOverlap;
inline constexpr int kPatchPixels = kPatchSize * kPatchSize;

// Which microphone columns are measured. Missing count is round-half-up of
// ratio * N, and at least two columns always stay measured.
struct Mask {
  std::vector<bool> measured;
  double ratio = 0.0;
  std::uint64_t seed = 0;

  std::size_t size() const { return measured.size(); }
  std::size_t n_measured() const;
  std::size_t n_missing() const { return size() - n_measured(); }
  std::vector<std::size_t> missing_indices() const;
  std::vector<std::size_t> measured_indices() const;

  static Mask all_measured(std::size_t n_mics);
};

std::size_t missing_count(std::size_t n_mics, double ratio);

// Uniformly random subset of round(ratio * n_mics) missing columns,
// deterministic in `seed`. Throws when fewer than two columns would remain.
Mask make_mask(std::size_t n_mics, double ratio, std::uint64_t seed);

// Known matrix with missing columns set to zero.
RirMatrix apply_mask(const RirMatrix& matrix, const Mask& mask);

// Patch offsets along one axis of length `extent` (already padded to at least
// the patch size): stride 48, last offset clamped so the patch ends at the edge.
std::vector<int> tile_offsets(int extent);

// Half-open range [begin, end) of the image owned by patch `index` along one
// axis. Boundaries sit at the middle of each overlap; the ranges of all
// patches partition [0, unpadded_extent).
struct OwnedRange {
  int begin = 0;
  int end = 0;
};
OwnedRange owned_range(std::span<const int> offsets, std::size_t index,
                       int unpadded_extent);

struct Patch {
  int row_offset = 0;  // time
  int col_offset = 0;  // microphone
  double scale = 1.0;
  bool degenerate_scale = false;  // no measured energy, scale fell back to 1
  std::vector<float> pixels;      // 64 x 64 row-major, row = time
  std::vector<std::uint8_t> known;  // per pixel: 1 if from a measured column
};

struct PadSpec {
  int padded_rows = 0;  // time axis after zero padding
  int padded_cols = 0;  // microphone axis after column duplication
  int duplicated_cols = 0;
  int zero_rows = 0;
};

struct PatchGrid {
  int patch_size = kPatchSize;
  int overlap_px = kPatchOverlap;
  int source_rows = 0;  // K
  int source_cols = 0;  // N
  PadSpec pad;
  std::vector<int> row_offsets;
  std::vector<int> col_offsets;
  std::vector<bool> padded_measured;  // column mask over padded width
  std::vector<Patch> patches;         // row-major over (row offset, col offset)

  std::size_t size() const { return patches.size(); }
};

// Tiles a (masked) RIR image into normalised 64x64 patches. Each patch is
// divided by the max |amplitude| over its measured entries; missing columns
// are zeroed after the scale is taken.
PatchGrid split_patches(const RirMatrix& matrix, const Mask& mask);

// Dense K x N image, time-major like RirMatrix::data.
struct Image {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// Rescales each patch and writes only the pixels it owns. Padding is dropped.
Image reassemble(const PatchGrid& grid, std::span<const std::vector<float>> inpainted);
std::vector<std::vector<float>> grid_pixels(const PatchGrid& grid);

// Measured columns from `original`, missing columns from `reconstructed`.
RirMatrix complete_matrix(const RirMatrix& original, const Mask& mask,
                          const Image& reconstructed);

}  // namespace rirfill
