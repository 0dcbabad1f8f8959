#include "rirfill/config.hpp"

#include <sstream>
#include <stdexcept>

#include "rirfill/serialize.hpp"

namespace rirfill {

using nlohmann::json;

ExperimentConfig ExperimentConfig::desk() { return {}; }

ExperimentConfig ExperimentConfig::full() {
  ExperimentConfig c;
  c.profile = "full";
  c.curvatures.clear();
  for (int i = 0; i <= 9; ++i) c.curvatures.push_back(i / 9.0);
  c.angles = {10, 30, 50, 70, 90, 110, 130, 150, 170};
  c.mask_ratios = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  c.diffusion_steps = 1000;
  c.resamples = 10;
  c.training.epochs = 1000;
  c.training.model.base_channels = 16;
  return c;
}

ExperimentConfig ExperimentConfig::for_profile(const std::string& name) {
  if (name == "desk") return desk();
  if (name == "full") return full();
  throw std::invalid_argument("unknown profile '" + name + "' (expected desk or full)");
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
  room.validate();
  if (n_mics < 2) fail("n_mics must be at least 2");
  if (!(train_t60 > 0.0) || !(test_t60 > 0.0)) fail("T60 values must be positive");
  if (train_samples < 1 || test_samples < 1) fail("sample counts must be positive");
  if (train_images < 1 || train_patches < 1) fail("training image and patch counts must be positive");
  for (double c : curvatures)
    if (!(c >= 0.0 && c <= 1.0)) fail("curvatures must lie in [0, 1]");
  for (double r : mask_ratios)
    if (!(r >= 0.0 && r <= 1.0)) fail("mask ratios must lie in [0, 1]");
  if (curvatures.empty() || angles.empty() || mask_ratios.empty() || seeds.empty())
    fail("sweep lists must be non-empty");
  if (diffusion_steps < 1) fail("diffusion_steps must be positive");
  if (jump_length < 1 || resamples < 1 || inference_batch < 1)
    fail("jump_length, resamples and inference_batch must be positive");
  if (threads < 0) fail("threads must be non-negative");
  training.model.validate();
  if (training.epochs < 1 || training.batch_size < 1) fail("training epochs and batch size must be positive");
  if (!(training.learning_rate > 0.0)) fail("learning rate must be positive");
}

RepaintOptions ExperimentConfig::repaint(std::uint64_t seed) const {
  RepaintOptions o;
  o.jump_length = jump_length;
  o.resamples = resamples;
  o.batch_size = inference_batch;
  o.seed = seed;
  return o;
}

void to_json(json& j, const ExperimentConfig& c) {
  const auto& t = c.training;
  j = {{"profile", c.profile},
       {"room", c.room},
       {"n_mics", c.n_mics},
       {"train_t60", c.train_t60},
       {"train_samples", c.train_samples},
       {"train_images", c.train_images},
       {"train_patches", c.train_patches},
       {"test_t60", c.test_t60},
       {"test_samples", c.test_samples},
       {"curvatures", c.curvatures},
       {"angles", c.angles},
       {"mask_ratios", c.mask_ratios},
       {"seeds", c.seeds},
       {"diffusion_steps", c.diffusion_steps},
       {"jump_length", c.jump_length},
       {"resamples", c.resamples},
       {"inference_batch", c.inference_batch},
       {"training",
        {{"base_channels", t.model.base_channels},
         {"depth", t.model.depth},
         {"time_embedding_dim", t.model.time_embedding_dim},
         {"epochs", t.epochs},
         {"batch_size", t.batch_size},
         {"learning_rate", t.learning_rate},
         {"final_learning_rate", t.final_learning_rate},
         {"ema_decay", t.ema_decay},
         {"grad_clip", t.grad_clip},
         {"flip_augment", t.flip_augment},
         {"precondition", t.precondition},
         {"seed", t.seed}}},
       {"output_dir", c.output_dir.string()},
       {"checkpoint", c.checkpoint.string()},
       {"threads", c.threads},
       {"write_images", c.write_images}};
}

void from_json(const json& j, ExperimentConfig& c) {
  c = ExperimentConfig::for_profile(j.value("profile", std::string("desk")));
  auto get = [&](const json& src, const char* key, auto& field) {
    if (src.contains(key)) src.at(key).get_to(field);
  };
  get(j, "room", c.room);
  get(j, "n_mics", c.n_mics);
  get(j, "train_t60", c.train_t60);
  get(j, "train_samples", c.train_samples);
  get(j, "train_images", c.train_images);
  get(j, "train_patches", c.train_patches);
  get(j, "test_t60", c.test_t60);
  get(j, "test_samples", c.test_samples);
  get(j, "curvatures", c.curvatures);
  get(j, "angles", c.angles);
  get(j, "mask_ratios", c.mask_ratios);
  get(j, "seeds", c.seeds);
  get(j, "diffusion_steps", c.diffusion_steps);
  get(j, "jump_length", c.jump_length);
  get(j, "resamples", c.resamples);
  get(j, "inference_batch", c.inference_batch);
  if (j.contains("training")) {
    const auto& t = j.at("training");
    auto& tc = c.training;
    get(t, "base_channels", tc.model.base_channels);
    get(t, "depth", tc.model.depth);
    get(t, "time_embedding_dim", tc.model.time_embedding_dim);
    get(t, "epochs", tc.epochs);
    get(t, "batch_size", tc.batch_size);
    get(t, "learning_rate", tc.learning_rate);
    get(t, "final_learning_rate", tc.final_learning_rate);
    get(t, "ema_decay", tc.ema_decay);
    get(t, "grad_clip", tc.grad_clip);
    get(t, "flip_augment", tc.flip_augment);
    get(t, "precondition", tc.precondition);
    get(t, "seed", tc.seed);
  }
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("checkpoint")) c.checkpoint = j.at("checkpoint").get<std::string>();
  get(j, "threads", c.threads);
  get(j, "write_images", c.write_images);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  ExperimentConfig c;
  try {
    c = j.get<ExperimentConfig>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  c.validate();
  return c;
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& c) {
  write_json_file(path, json(c));
}

namespace {

void collect_keys(const json& j, const std::string& prefix, std::vector<std::string>& out) {
  for (const auto& [k, v] : j.items()) {
    const std::string key = prefix.empty() ? k : prefix + "." + k;
    // The room is small enough to treat its arrays as leaves.
    if (v.is_object())
      collect_keys(v, key, out);
    else
      out.push_back(key);
  }
}

json parse_value(const json& current, const std::string& text) {
  if (current.is_string()) return text;
  try {
    json v = json::parse(text);
    if (current.is_array() && !v.is_array()) v = json::array({v});
    return v;
  } catch (const json::exception&) {
  }
  if (current.is_array()) {
    json arr = json::array();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
      arr.push_back(json::parse(item));
    return arr;
  }
  throw std::invalid_argument("cannot parse '" + text + "'");
}

}  // namespace

std::vector<std::string> config_keys(const ExperimentConfig& c) {
  std::vector<std::string> out;
  collect_keys(json(c), "", out);
  return out;
}

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& text) {
  json j = c;
  json::json_pointer ptr("/" + [&] {
    std::string p = key;
    for (auto& ch : p)
      if (ch == '.') ch = '/';
    return p;
  }());
  if (!j.contains(ptr)) throw std::invalid_argument("unknown config key '" + key + "'");
  try {
    j[ptr] = parse_value(j[ptr], text);
    c = j.get<ExperimentConfig>();
  } catch (const json::exception& e) {
    throw std::invalid_argument("config key '" + key + "': " + e.what());
  }
}

}  // namespace rirfill
