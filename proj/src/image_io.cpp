#include "rirfill/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "rirfill/serialize.hpp"

namespace rirfill {

std::filesystem::path image_sidecar_path(const std::filesystem::path& path) {
  auto p = path;
  p += ".json";
  return p;
}

std::uint16_t GrayMapping::encode(double amplitude) const {
  if (max_abs == 0.0) return 32768;
  const double u = (amplitude + max_abs) / (2.0 * max_abs) * 65535.0;
  return static_cast<std::uint16_t>(std::clamp(std::floor(u + 0.5), 0.0, 65535.0));
}

double GrayMapping::decode(std::uint16_t level) const {
  return static_cast<double>(level) / 65535.0 * 2.0 * max_abs - max_abs;
}

void write_pgm16(const std::filesystem::path& path, const Pgm16& image) {
  if (image.pixels.size() != static_cast<std::size_t>(image.width) * image.height)
    throw std::invalid_argument("write_pgm16: pixel count does not match size");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "P5\n" << image.width << ' ' << image.height << "\n65535\n";
  std::string buf(image.pixels.size() * 2, '\0');
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    buf[2 * i] = static_cast<char>(image.pixels[i] >> 8);
    buf[2 * i + 1] = static_cast<char>(image.pixels[i] & 0xff);
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

Pgm16 read_pgm16(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  auto token = [&]() {
    std::string t;
    char c;
    while (is.get(c)) {
      if (c == '#') {
        std::string skip;
        std::getline(is, skip);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        if (!t.empty()) break;
      } else {
        t.push_back(c);
      }
    }
    return t;
  };
  if (token() != "P5") throw std::runtime_error(path.string() + " is not a binary PGM");
  Pgm16 img;
  img.width = std::stoi(token());
  img.height = std::stoi(token());
  if (std::stoi(token()) != 65535) throw std::runtime_error(path.string() + " is not 16-bit");
  std::string buf(static_cast<std::size_t>(img.width) * img.height * 2, '\0');
  if (!is.read(buf.data(), static_cast<std::streamsize>(buf.size())))
    throw std::runtime_error("truncated PGM: " + path.string());
  img.pixels.resize(buf.size() / 2);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    img.pixels[i] = static_cast<std::uint16_t>((static_cast<unsigned char>(buf[2 * i]) << 8) |
                                               static_cast<unsigned char>(buf[2 * i + 1]));
  return img;
}

GrayMapping export_rir_image(const RirMatrix& matrix, const std::filesystem::path& path) {
  GrayMapping map;
  map.width = static_cast<int>(matrix.n_mics);
  map.height = static_cast<int>(matrix.n_samples);
  for (double v : matrix.data) map.max_abs = std::max(map.max_abs, std::abs(v));

  Pgm16 img{map.width, map.height, {}};
  img.pixels.reserve(matrix.data.size());
  for (double v : matrix.data) img.pixels.push_back(map.encode(v));
  write_pgm16(path, img);

  write_json_file(image_sidecar_path(path), {{"format", "PGM16"},
                                       {"max_abs", map.max_abs},
                                       {"min_value", -map.max_abs},
                                       {"max_value", map.max_abs},
                                       {"levels", 65535},
                                       {"width", map.width},
                                       {"height", map.height},
                                       {"rows", "time"},
                                       {"cols", "microphone"},
                                       {"sample_rate", matrix.sample_rate}});
  return map;
}

RirMatrix import_rir_image(const std::filesystem::path& path) {
  const Pgm16 img = read_pgm16(path);
  const auto j = read_json_file(image_sidecar_path(path));
  GrayMapping map{j.at("max_abs").get<double>(), img.width, img.height};
  RirMatrix m(img.height, img.width, j.value("sample_rate", 8000.0));
  for (std::size_t i = 0; i < img.pixels.size(); ++i) m.data[i] = map.decode(img.pixels[i]);
  return m;
}

}  // namespace rirfill
