#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rirfill/config.hpp"
#include "rirfill/diffusion.hpp"

namespace rirfill {

struct TrainingImage {
  double curvature = 0.0;
  double angle_deg = 0.0;
};

struct PatchOrigin {
  int image = 0;
  int row_offset = 0;
  int col_offset = 0;
};

struct TrainingSet {
  Patches patches;
  std::vector<TrainingImage> images;  // the realised array/source draws
  std::vector<PatchOrigin> origins;   // one per patch
  std::string fingerprint;
};

// The curvature grid 0, 1/9, ..., 1.
std::vector<double> curvature_grid();

// Simulates config.train_images RIR matrices (T60 = train_t60, K =
// train_samples) with curvature and source angle drawn uniformly from the grid
// and the nine source angles, then samples config.train_patches 64x64 crops at
// uniform positions. Each crop is divided by its own max |amplitude|.
TrainingSet build_training_set(const ExperimentConfig& config, std::uint64_t seed);

// 64x64 crop at (row, col), padded like split_patches (zero rows, repeated
// last column) and normalised to [-1, 1]. An all-zero crop stays zero.
std::vector<float> normalised_crop(const RirMatrix& matrix, int row, int col);

// Synthetic patches of a few straight, band-limited wavefronts crossing the
// microphone axis with random slope, delay, sign and amplitude.
Patches make_stripe_patches(int count, std::uint64_t seed);

}  // namespace rirfill
