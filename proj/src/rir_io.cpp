#include "rirfill/rir_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "rirfill/serialize.hpp"

namespace rirfill {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

template <typename U>
void put(std::ostream& os, U v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename U>
U get(std::istream& is, const std::filesystem::path& path) {
  U v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
    throw std::runtime_error("truncated file: " + path.string());
  return v;
}

void expect_magic(std::istream& is, const char (&magic)[5], const std::filesystem::path& path) {
  char buf[4];
  if (!is.read(buf, 4) || std::memcmp(buf, magic, 4) != 0)
    throw std::runtime_error("bad magic in " + path.string() + ", expected " + magic);
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  auto p = path;
  p.replace_extension(".json");
  return p;
}

void to_json(nlohmann::json& j, const Vec3& v) { j = {v.x, v.y, v.z}; }
void from_json(const nlohmann::json& j, Vec3& v) {
  v = {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

void to_json(nlohmann::json& j, const RoomSpec& r) {
  j = {{"dims", r.dims},
       {"reflection", r.reflection},
       {"speed_of_sound", r.speed_of_sound},
       {"sample_rate", r.sample_rate}};
}
void from_json(const nlohmann::json& j, RoomSpec& r) {
  RoomSpec d;
  r.dims = j.value("dims", d.dims);
  r.reflection = j.value("reflection", d.reflection);
  r.speed_of_sound = j.value("speed_of_sound", d.speed_of_sound);
  r.sample_rate = j.value("sample_rate", d.sample_rate);
}

void to_json(nlohmann::json& j, const ArrayGeometry& g) {
  j = {{"label", g.label}, {"curvature", g.curvature}, {"center", g.center},
       {"positions", g.positions}};
}
void from_json(const nlohmann::json& j, ArrayGeometry& g) {
  g.label = j.value("label", std::string{});
  g.curvature = j.value("curvature", 0.0);
  if (j.contains("center")) g.center = j.at("center").get<Vec3>();
  g.positions = j.value("positions", std::vector<Vec3>{});
}

void to_json(nlohmann::json& j, const SourceSpec& s) {
  j = {{"position", s.position}, {"angle_deg", s.angle_deg}};
}
void from_json(const nlohmann::json& j, SourceSpec& s) {
  s.position = j.at("position").get<Vec3>();
  s.angle_deg = j.value("angle_deg", 90.0);
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

void save_rirb(const std::filesystem::path& path, const RirMatrix& matrix, const RirMetadata& meta) {
  if (matrix.data.size() != matrix.n_mics * matrix.n_samples)
    throw std::invalid_argument("save_rirb: data size does not match shape");
  const double fs = std::round(matrix.sample_rate);
  if (fs != matrix.sample_rate || fs <= 0.0)
    throw std::invalid_argument("save_rirb: sample rate must be a positive integer");

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os.write("RIRB", 4);
  put<std::uint32_t>(os, kRirbVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(matrix.n_mics));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(matrix.n_samples));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(fs));
  std::vector<float> buf(matrix.data.begin(), matrix.data.end());
  os.write(reinterpret_cast<const char*>(buf.data()),
           static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!os) throw std::runtime_error("write failed: " + path.string());

  nlohmann::json j = {{"format", "RIRB"},
                      {"version", kRirbVersion},
                      {"n_mics", matrix.n_mics},
                      {"n_samples", matrix.n_samples},
                      {"sample_rate", matrix.sample_rate},
                      {"geometry", matrix.geometry},
                      {"source", matrix.source}};
  if (meta.room) {
    j["room"] = *meta.room;
    j["beta"] = meta.room->reflection;
  }
  if (meta.seed) j["seed"] = *meta.seed;
  if (meta.target_t60 > 0.0) j["target_t60"] = meta.target_t60;
  write_json_file(sidecar_path(path), j);
}

RirMatrix load_rirb(const std::filesystem::path& path, RirMetadata* meta) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  expect_magic(is, "RIRB", path);
  const auto version = get<std::uint32_t>(is, path);
  if (version != kRirbVersion)
    throw std::runtime_error("unsupported RIRB version " + std::to_string(version));
  const auto n = get<std::uint32_t>(is, path);
  const auto k = get<std::uint32_t>(is, path);
  const auto fs = get<std::uint32_t>(is, path);
  RirMatrix m(k, n, fs);
  std::vector<float> buf(static_cast<std::size_t>(n) * k);
  if (!is.read(reinterpret_cast<char*>(buf.data()),
               static_cast<std::streamsize>(buf.size() * sizeof(float))))
    throw std::runtime_error("truncated RIRB payload: " + path.string());
  std::copy(buf.begin(), buf.end(), m.data.begin());

  const auto side = sidecar_path(path);
  if (std::filesystem::exists(side)) {
    const auto j = read_json_file(side);
    if (j.contains("geometry")) m.geometry = j.at("geometry").get<ArrayGeometry>();
    if (j.contains("source")) m.source = j.at("source").get<SourceSpec>();
    if (meta) {
      if (j.contains("room")) meta->room = j.at("room").get<RoomSpec>();
      if (j.contains("seed")) meta->seed = j.at("seed").get<std::uint64_t>();
      meta->target_t60 = j.value("target_t60", 0.0);
    }
  }
  return m;
}

void save_patches(const std::filesystem::path& path, const std::vector<std::vector<float>>& patches,
                  const std::string& fingerprint, const std::string& description) {
  const std::size_t px = patches.empty() ? 0 : patches.front().size();
  const auto side = static_cast<std::uint32_t>(std::lround(std::sqrt(static_cast<double>(px))));
  for (const auto& p : patches)
    if (p.size() != px || static_cast<std::size_t>(side) * side != px)
      throw std::invalid_argument("save_patches: patches must be equal-sized squares");

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os.write("RIRP", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(patches.size()));
  put<std::uint32_t>(os, side);
  for (const auto& p : patches)
    os.write(reinterpret_cast<const char*>(p.data()), static_cast<std::streamsize>(px * sizeof(float)));
  if (!os) throw std::runtime_error("write failed: " + path.string());

  nlohmann::json j = {{"format", "RIRP"}, {"count", patches.size()}, {"patch_size", side},
                      {"fingerprint", fingerprint}};
  if (!description.empty()) j["description"] = description;
  write_json_file(sidecar_path(path), j);
}

std::vector<std::vector<float>> load_patches(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  expect_magic(is, "RIRP", path);
  if (get<std::uint32_t>(is, path) != 1) throw std::runtime_error("unsupported RIRP version");
  const auto count = get<std::uint32_t>(is, path);
  const auto side = get<std::uint32_t>(is, path);
  std::vector<std::vector<float>> out(count, std::vector<float>(static_cast<std::size_t>(side) * side));
  for (auto& p : out)
    if (!is.read(reinterpret_cast<char*>(p.data()), static_cast<std::streamsize>(p.size() * sizeof(float))))
      throw std::runtime_error("truncated RIRP payload: " + path.string());
  return out;
}

}  // namespace rirfill
