#include "rirfill/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace rirfill {

std::size_t Mask::n_measured() const {
  return static_cast<std::size_t>(std::count(measured.begin(), measured.end(), true));
}

std::vector<std::size_t> Mask::missing_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < measured.size(); ++i)
    if (!measured[i]) out.push_back(i);
  return out;
}

std::vector<std::size_t> Mask::measured_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < measured.size(); ++i)
    if (measured[i]) out.push_back(i);
  return out;
}

Mask Mask::all_measured(std::size_t n_mics) {
  Mask m;
  m.measured.assign(n_mics, true);
  return m;
}

std::size_t missing_count(std::size_t n_mics, double ratio) {
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n_mics) + 0.5));
}

Mask make_mask(std::size_t n_mics, double ratio, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0))
    throw std::invalid_argument("mask ratio must lie in [0, 1]");
  const std::size_t n_missing = missing_count(n_mics, ratio);
  if (n_missing > n_mics || n_mics - n_missing < 2)
    throw std::invalid_argument("mask must leave at least 2 measured columns");

  std::vector<std::size_t> order(n_mics);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first n_missing entries are the missing set.
  for (std::size_t i = 0; i < n_missing; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n_mics - 1);
    std::swap(order[i], order[pick(rng)]);
  }

  Mask m;
  m.ratio = ratio;
  m.seed = seed;
  m.measured.assign(n_mics, true);
  for (std::size_t i = 0; i < n_missing; ++i) m.measured[order[i]] = false;
  return m;
}

RirMatrix apply_mask(const RirMatrix& matrix, const Mask& mask) {
  if (mask.size() != matrix.n_mics) throw std::invalid_argument("mask/matrix width mismatch");
  RirMatrix out = matrix;
  for (std::size_t k = 0; k < out.n_samples; ++k)
    for (std::size_t i = 0; i < out.n_mics; ++i)
      if (!mask.measured[i]) out.at(k, i) = 0.0;
  return out;
}

std::vector<int> tile_offsets(int extent) {
  if (extent < kPatchSize) throw std::invalid_argument("extent smaller than a patch");
  std::vector<int> offsets{0};
  while (offsets.back() + kPatchSize < extent)
    offsets.push_back(std::min(offsets.back() + kPatchStride, extent - kPatchSize));
  return offsets;
}

OwnedRange owned_range(std::span<const int> offsets, std::size_t index,
                       int unpadded_extent) {
  if (index >= offsets.size()) throw std::out_of_range("owned_range: bad patch index");
  auto boundary = [&](std::size_t j) {
    // Middle of the overlap between patch j and j + 1.
    return (offsets[j + 1] + offsets[j] + kPatchSize) / 2;
  };
  OwnedRange r;
  r.begin = index == 0 ? 0 : boundary(index - 1);
  r.end = index + 1 == offsets.size() ? unpadded_extent : boundary(index);
  r.begin = std::min(r.begin, unpadded_extent);
  r.end = std::min(r.end, unpadded_extent);
  return r;
}

PatchGrid split_patches(const RirMatrix& matrix, const Mask& mask) {
  if (matrix.n_samples < 1) throw std::invalid_argument("split_patches: K must be >= 1");
  if (matrix.n_mics < 2) throw std::invalid_argument("split_patches: N must be >= 2");
  if (mask.size() != matrix.n_mics) throw std::invalid_argument("mask/matrix width mismatch");

  PatchGrid g;
  g.source_rows = static_cast<int>(matrix.n_samples);
  g.source_cols = static_cast<int>(matrix.n_mics);
  g.pad.padded_rows = std::max(g.source_rows, kPatchSize);
  g.pad.padded_cols = std::max(g.source_cols, kPatchSize);
  g.pad.zero_rows = g.pad.padded_rows - g.source_rows;
  g.pad.duplicated_cols = g.pad.padded_cols - g.source_cols;
  g.row_offsets = tile_offsets(g.pad.padded_rows);
  g.col_offsets = tile_offsets(g.pad.padded_cols);

  // Padded column c reads source column min(c, N - 1).
  auto source_col = [&](int c) { return std::min(c, g.source_cols - 1); };
  g.padded_measured.resize(g.pad.padded_cols);
  for (int c = 0; c < g.pad.padded_cols; ++c) g.padded_measured[c] = mask.measured[source_col(c)];

  for (int r0 : g.row_offsets) {
    for (int c0 : g.col_offsets) {
      Patch p;
      p.row_offset = r0;
      p.col_offset = c0;
      double peak = 0.0;
      for (int r = 0; r < kPatchSize; ++r) {
        const int k = r0 + r;
        if (k >= g.source_rows) break;
        for (int c = 0; c < kPatchSize; ++c) {
          const int col = c0 + c;
          if (!g.padded_measured[col]) continue;
          peak = std::max(peak, std::abs(matrix.at(k, source_col(col))));
        }
      }
      p.degenerate_scale = !(peak > 0.0);
      p.scale = p.degenerate_scale ? 1.0 : peak;

      p.pixels.assign(kPatchPixels, 0.0f);
      p.known.assign(kPatchPixels, 0);
      for (int r = 0; r < kPatchSize; ++r) {
        const int k = r0 + r;
        for (int c = 0; c < kPatchSize; ++c) {
          const int col = c0 + c;
          if (!g.padded_measured[col]) continue;
          p.known[r * kPatchSize + c] = 1;
          if (k >= g.source_rows) continue;
          const double v = std::clamp(matrix.at(k, source_col(col)) / p.scale, -1.0, 1.0);
          p.pixels[r * kPatchSize + c] = static_cast<float>(v);
        }
      }
      g.patches.push_back(std::move(p));
    }
  }
  return g;
}

std::vector<std::vector<float>> grid_pixels(const PatchGrid& grid) {
  std::vector<std::vector<float>> out;
  out.reserve(grid.size());
  for (const auto& p : grid.patches) out.push_back(p.pixels);
  return out;
}

Image reassemble(const PatchGrid& grid, std::span<const std::vector<float>> inpainted) {
  if (inpainted.size() != grid.size())
    throw std::invalid_argument("reassemble: patch count mismatch");
  Image img;
  img.rows = grid.source_rows;
  img.cols = grid.source_cols;
  img.data.assign(static_cast<std::size_t>(img.rows) * img.cols, 0.0);

  const std::size_t n_col_tiles = grid.col_offsets.size();
  for (std::size_t ti = 0; ti < grid.row_offsets.size(); ++ti) {
    const OwnedRange rows = owned_range(grid.row_offsets, ti, grid.source_rows);
    for (std::size_t tj = 0; tj < n_col_tiles; ++tj) {
      const OwnedRange cols = owned_range(grid.col_offsets, tj, grid.source_cols);
      const std::size_t idx = ti * n_col_tiles + tj;
      const Patch& p = grid.patches[idx];
      const auto& px = inpainted[idx];
      if (px.size() != static_cast<std::size_t>(kPatchPixels))
        throw std::invalid_argument("reassemble: patch is not 64x64");
      for (int k = rows.begin; k < rows.end; ++k) {
        for (int c = cols.begin; c < cols.end; ++c) {
          const int local = (k - p.row_offset) * kPatchSize + (c - p.col_offset);
          img.data[static_cast<std::size_t>(k) * img.cols + c] =
              static_cast<double>(px[local]) * p.scale;
        }
      }
    }
  }
  return img;
}

RirMatrix complete_matrix(const RirMatrix& original, const Mask& mask,
                          const Image& reconstructed) {
  if (mask.size() != original.n_mics ||
      reconstructed.rows != static_cast<int>(original.n_samples) ||
      reconstructed.cols != static_cast<int>(original.n_mics))
    throw std::invalid_argument("complete_matrix: shape mismatch");
  RirMatrix out = original;
  for (std::size_t k = 0; k < out.n_samples; ++k)
    for (std::size_t i = 0; i < out.n_mics; ++i)
      if (!mask.measured[i])
        out.at(k, i) = reconstructed.data[k * out.n_mics + i];
  return out;
}

}  // namespace rirfill
