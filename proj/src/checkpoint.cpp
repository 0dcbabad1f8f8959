#include "rirfill/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace rirfill {

namespace {

constexpr char kMagic[8] = {'R', 'I', 'R', 'F', 'C', 'K', 'P', 'T'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename U>
void write_le(std::ostream& os, U v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename U>
U read_le(std::istream& is) {
  U v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
    throw std::runtime_error("checkpoint: truncated file");
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const DiffusionModel& model) {
  using nlohmann::json;
  const auto& cfg = model.net.config();
  json header;
  header["format"] = "rirfill-checkpoint";
  header["version"] = kCheckpointVersion;
  header["model"] = {{"base_channels", cfg.base_channels},
                     {"depth", cfg.depth},
                     {"time_embedding_dim", cfg.time_embedding_dim},
                     {"image_size", cfg.image_size}};
  header["schedule"] = {{"kind", "linear"},
                        {"steps", model.schedule.steps()},
                        {"beta_start", model.schedule.beta_start()},
                        {"beta_end", model.schedule.beta_end()}};
  const auto& m = model.meta;
  header["sigma_data"] = model.sigma_data;
  header["training"] = {{"epochs", m.epochs},
                        {"steps", m.steps},
                        {"batch_size", m.batch_size},
                        {"learning_rate", m.learning_rate},
                        {"seed", m.seed},
                        {"dataset_fingerprint", m.dataset_fingerprint},
                        {"loss_history", m.loss_history}};
  json tensors = json::array();
  for (const auto& t : model.net.layout())
    tensors.push_back({{"name", t.name}, {"shape", t.shape}, {"offset", t.offset}, {"count", t.count}});
  header["tensors"] = tensors;
  header["weight_count"] = model.net.parameter_count();

  const std::string text = header.dump();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path.string() + " for writing");
  os.write(kMagic, sizeof kMagic);
  write_le<std::uint32_t>(os, kCheckpointVersion);
  write_le<std::uint64_t>(os, text.size());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  const auto w = model.net.weights();
  os.write(reinterpret_cast<const char*>(w.data()),
           static_cast<std::streamsize>(w.size() * sizeof(float)));
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path.string());
}

DiffusionModel load_checkpoint(const std::filesystem::path& path) {
  using nlohmann::json;
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path.string());
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path.string());
  const auto version = read_le<std::uint32_t>(is);
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  const auto header_len = read_le<std::uint64_t>(is);
  std::string text(header_len, '\0');
  if (!is.read(text.data(), static_cast<std::streamsize>(header_len)))
    throw std::runtime_error("checkpoint: truncated header");
  const json header = json::parse(text);

  DenoiserConfig cfg;
  const auto& jm = header.at("model");
  cfg.base_channels = jm.at("base_channels");
  cfg.depth = jm.at("depth");
  cfg.time_embedding_dim = jm.at("time_embedding_dim");
  cfg.image_size = jm.at("image_size");

  const auto& js = header.at("schedule");
  NoiseSchedule schedule = NoiseSchedule::linear(js.at("steps"), js.at("beta_start"),
                                                 js.at("beta_end"));

  TrainingMeta meta;
  const auto& jt = header.at("training");
  meta.epochs = jt.at("epochs");
  meta.steps = jt.at("steps");
  meta.batch_size = jt.at("batch_size");
  meta.learning_rate = jt.at("learning_rate");
  meta.seed = jt.at("seed");
  meta.dataset_fingerprint = jt.at("dataset_fingerprint");
  meta.loss_history = jt.at("loss_history").get<std::vector<double>>();

  DiffusionModel model{Denoiser<float>(cfg), std::move(schedule), std::move(meta),
                       header.value("sigma_data", 0.0)};
  const std::size_t count = header.at("weight_count");
  if (count != model.net.parameter_count())
    throw std::runtime_error("checkpoint: weight count does not match the model config");
  const auto& table = header.at("tensors");
  const auto& layout = model.net.layout();
  if (table.size() != layout.size())
    throw std::runtime_error("checkpoint: tensor table does not match the model config");
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (table[i].at("name") != layout[i].name ||
        table[i].at("shape").get<std::vector<int>>() != layout[i].shape)
      throw std::runtime_error("checkpoint: tensor " + layout[i].name + " mismatch");
  }
  auto w = model.net.weights();
  if (!is.read(reinterpret_cast<char*>(w.data()), static_cast<std::streamsize>(count * sizeof(float))))
    throw std::runtime_error("checkpoint: truncated weights");
  return model;
}

}  // namespace rirfill
