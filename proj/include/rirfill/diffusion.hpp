#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rirfill/denoiser.hpp"
#include "rirfill/imaging.hpp"
#include "rirfill/schedule.hpp"
#include "rirfill/types.hpp"

namespace rirfill {

using Patches = std::vector<std::vector<float>>;

// x_t = sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) noise, t in [1, T].
std::vector<float> forward_sample(const NoiseSchedule& schedule, std::span<const float> x0,
                                  int t, std::span<const float> noise);

struct TrainConfig {
  DenoiserConfig model;
  int epochs = 200;
  int batch_size = 16;
  double learning_rate = 1e-3;
  double final_learning_rate = 1e-4;  // cosine decay target
  double ema_decay = 0.995;           // 0 keeps the raw weights
  double grad_clip = 1.0;             // global-norm clip, 0 disables
  bool flip_augment = true;           // random left-right (array order) flips
  bool precondition = true;           // see DiffusionModel::sigma_data
  std::uint64_t seed = 0;
};

struct TrainingMeta {
  int epochs = 0;
  int steps = 0;
  int batch_size = 0;
  double learning_rate = 0.0;
  std::uint64_t seed = 0;
  std::string dataset_fingerprint;
  std::vector<double> loss_history;  // mean loss per epoch
};

// The noise prediction is
//   eps(x_t, t) = c_skip x_t + c_out F(c_in x_t, t)
// with F the network and, for a = sqrt(alpha_bar_t), s = sqrt(1 - alpha_bar_t),
// v = a^2 sigma_data^2 + s^2:
//   c_in = 1 / sqrt(v), c_skip = s / v, c_out = a sigma_data / sqrt(v).
// c_skip x_t is the best linear guess of the noise for data of RMS
// sigma_data; F only supplies the remainder, at unit scale. sigma_data = 0
// turns this off (eps = F(x_t, t)).
struct DiffusionModel {
  Denoiser<float> net;
  NoiseSchedule schedule;
  TrainingMeta meta;
  double sigma_data = 0.0;
};

struct Preconditioning {
  double c_in = 1.0;
  double c_skip = 0.0;
  double c_out = 1.0;
};
Preconditioning preconditioning(const NoiseSchedule& schedule, double sigma_data, int t);

// Noise prediction for a batch of patches at per-patch steps.
void predict_noise(const DiffusionModel& model, std::span<const float> x, std::span<const int> t,
                   std::span<float> out);

using EpochCallback = std::function<void(int epoch, double loss)>;

// Epsilon-prediction training with Adam on uniformly sampled steps. With
// preconditioning on, sigma_data is the RMS pixel value of the dataset.
// Throws std::runtime_error if the loss turns non-finite.
DiffusionModel train(std::span<const std::vector<float>> dataset, const NoiseSchedule& schedule,
                     const TrainConfig& config, const EpochCallback& on_epoch = {});

// Content hash of a patch set (FNV-1a over the raw float bytes), hex encoded.
std::string dataset_fingerprint(std::span<const std::vector<float>> dataset);

// RePaint time sequence from T down to 0. Consecutive decreasing entries are
// reverse steps; increasing entries are forward re-noising jumps.
std::vector<int> repaint_schedule(int steps, int jump_length, int resamples);

struct RepaintOptions {
  int jump_length = 10;
  int resamples = 10;
  std::uint64_t seed = 0;
  int batch_size = 16;  // patches per network call
};

// Inpaints one 64x64 patch. `known` marks pixels whose value in `masked` is
// observed; those pixels come back unchanged.
std::vector<float> repaint_inpaint(const DiffusionModel& model, std::span<const float> masked,
                                   std::span<const std::uint8_t> known,
                                   const RepaintOptions& options);

// Batched form. Patch i draws from its own stream seeded by (seed, i), so the
// result for a patch does not depend on which other patches are present.
Patches repaint_batch(const DiffusionModel& model, const Patches& masked,
                      std::span<const std::vector<std::uint8_t>> known,
                      const RepaintOptions& options);

// Split -> RePaint per patch -> reassemble -> keep measured columns.
RirMatrix inpaint_matrix(const DiffusionModel& model, const RirMatrix& matrix, const Mask& mask,
                         const RepaintOptions& options);

}  // namespace rirfill
