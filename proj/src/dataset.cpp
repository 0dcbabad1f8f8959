#include "rirfill/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "rirfill/imaging.hpp"
#include "rirfill/room_sim.hpp"

namespace rirfill {

std::vector<double> curvature_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 9; ++i) g.push_back(i / 9.0);
  return g;
}

std::vector<float> normalised_crop(const RirMatrix& matrix, int row, int col) {
  const int K = static_cast<int>(matrix.n_samples);
  const int N = static_cast<int>(matrix.n_mics);
  std::vector<double> v(kPatchPixels, 0.0);
  double peak = 0.0;
  for (int r = 0; r < kPatchSize; ++r) {
    const int k = row + r;
    if (k >= K) break;
    for (int c = 0; c < kPatchSize; ++c) {
      const int i = std::min(col + c, N - 1);
      const double a = matrix.at(k, i);
      v[r * kPatchSize + c] = a;
      peak = std::max(peak, std::abs(a));
    }
  }
  std::vector<float> out(kPatchPixels, 0.0f);
  if (peak > 0.0)
    for (int p = 0; p < kPatchPixels; ++p)
      out[p] = static_cast<float>(std::clamp(v[p] / peak, -1.0, 1.0));
  return out;
}

TrainingSet build_training_set(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  RoomSpec room = config.room;
  room.reflection.fill(reflection_coeff_for_t60(room, config.train_t60));

  std::mt19937_64 rng(seed);
  const auto curvatures = curvature_grid();
  const auto angles = default_source_angles();
  std::uniform_int_distribution<std::size_t> pick_c(0, curvatures.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_a(0, angles.size() - 1);

  TrainingSet set;
  std::vector<RirMatrix> images;
  for (int m = 0; m < config.train_images; ++m) {
    const TrainingImage info{curvatures[pick_c(rng)], angles[pick_a(rng)]};
    const auto array = make_arc_array(config.n_mics, info.curvature, room);
    const auto source = make_source(room, array, info.angle_deg);
    images.push_back(simulate_matrix(room, source, array, config.train_samples));
    set.images.push_back(info);
  }

  const int max_row = std::max(0, config.train_samples - kPatchSize);
  const int max_col = std::max(0, config.n_mics - kPatchSize);
  std::uniform_int_distribution<int> pick_img(0, config.train_images - 1);
  std::uniform_int_distribution<int> pick_row(0, max_row);
  std::uniform_int_distribution<int> pick_col(0, max_col);
  for (int p = 0; p < config.train_patches; ++p) {
    const PatchOrigin o{pick_img(rng), pick_row(rng), pick_col(rng)};
    set.patches.push_back(normalised_crop(images[o.image], o.row_offset, o.col_offset));
    set.origins.push_back(o);
  }
  set.fingerprint = dataset_fingerprint(set.patches);
  return set;
}

Patches make_stripe_patches(int count, std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("stripe count must be non-negative");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> n_lines(2, 4);
  std::uniform_real_distribution<double> slope(-0.8, 0.8);
  std::uniform_real_distribution<double> delay(-16.0, 80.0);
  std::uniform_real_distribution<double> amp(0.3, 1.0);
  std::bernoulli_distribution negative(0.5);

  // Hann-windowed sinc pulse, the same band-limited shape the simulator draws.
  auto pulse = [](double x) {
    constexpr double half = 4.0;
    if (std::abs(x) >= half) return 0.0;
    const double s = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    return s * 0.5 * (1.0 + std::cos(std::numbers::pi * x / half));
  };

  Patches out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    std::vector<double> img(kPatchPixels, 0.0);
    const int lines = n_lines(rng);
    for (int l = 0; l < lines; ++l) {
      const double s = slope(rng);
      const double d = delay(rng);
      const double a = amp(rng) * (negative(rng) ? -1.0 : 1.0);
      for (int c = 0; c < kPatchSize; ++c) {
        const double centre = d + s * c;
        for (int r = 0; r < kPatchSize; ++r) img[r * kPatchSize + c] += a * pulse(r - centre);
      }
    }
    double peak = 0.0;
    for (double v : img) peak = std::max(peak, std::abs(v));
    if (peak < 1e-3) continue;
    std::vector<float> p(kPatchPixels);
    for (int i = 0; i < kPatchPixels; ++i) p[i] = static_cast<float>(img[i] / peak);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace rirfill
