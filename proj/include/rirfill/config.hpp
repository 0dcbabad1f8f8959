#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rirfill/diffusion.hpp"
#include "rirfill/types.hpp"

namespace rirfill {

struct ExperimentConfig {
  std::string profile = "desk";
  RoomSpec room;
  int n_mics = 64;

  // Training data.
  double train_t60 = 0.3;
  int train_samples = 1024;
  int train_images = 8;
  int train_patches = 176;

  // Inference data and sweep.
  double test_t60 = 0.6;
  int test_samples = 2048;
  std::vector<double> curvatures{0.0};
  std::vector<double> angles{90.0};
  std::vector<double> mask_ratios{0.3, 0.5, 0.7};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};

  // Diffusion.
  int diffusion_steps = 100;
  int jump_length = 10;
  int resamples = 3;
  int inference_batch = 16;
  TrainConfig training;

  std::filesystem::path output_dir = "out";
  std::filesystem::path checkpoint;
  int threads = 0;              // 0: hardware concurrency
  bool write_images = true;     // PGM triplets for the first seed of each cell

  static ExperimentConfig desk();
  static ExperimentConfig full();
  static ExperimentConfig for_profile(const std::string& name);

  // Throws std::invalid_argument naming the first bad field.
  void validate() const;

  NoiseSchedule schedule() const { return NoiseSchedule::scaled_linear(diffusion_steps); }
  RepaintOptions repaint(std::uint64_t seed) const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
// Fields missing from `j` keep the values of the profile named in `j`
// ("desk" when absent).
void from_json(const nlohmann::json& j, ExperimentConfig& c);

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ExperimentConfig& c);

// Dotted leaf paths of the JSON form ("training.epochs", "room.dims", ...).
std::vector<std::string> config_keys(const ExperimentConfig& c);

// Sets one field from text. Lists accept JSON arrays or comma-separated values.
void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& text);

}  // namespace rirfill
