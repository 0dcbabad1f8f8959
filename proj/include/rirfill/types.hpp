#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rirfill {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline double distance(Vec3 a, Vec3 b) { return (a - b).norm(); }

// Shoebox room. Wall order for `reflection`: x=0, x=Lx, y=0, y=Ly, z=0, z=Lz.
struct RoomSpec {
  std::array<double, 3> dims{6.0, 5.5, 2.8};
  std::array<double, 6> reflection{0, 0, 0, 0, 0, 0};
  double speed_of_sound = 343.0;
  double sample_rate = 8000.0;

  static RoomSpec uniform(std::array<double, 3> dims, double beta,
                          double sample_rate = 8000.0,
                          double speed_of_sound = 343.0);

  // Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  // Strictly inside: every coordinate in the open interval (0, L).
  bool contains(Vec3 p) const;
  double volume() const { return dims[0] * dims[1] * dims[2]; }
  double surface_area() const {
    return 2.0 * (dims[0] * dims[1] + dims[1] * dims[2] + dims[0] * dims[2]);
  }
};

struct ArrayGeometry {
  std::vector<Vec3> positions;
  double curvature = 0.0;
  std::string label;

  std::size_t size() const { return positions.size(); }
  // Centroid of the straight (curvature 0) layout, shared by every curvature.
  Vec3 center;
};

struct SourceSpec {
  Vec3 position;
  double angle_deg = 90.0;
};

// N microphone responses of K samples. Storage is time-major: row k is a
// time sample, column i a microphone, element (k, i) at data[k * N + i].
struct RirMatrix {
  std::size_t n_mics = 0;
  std::size_t n_samples = 0;
  double sample_rate = 8000.0;
  ArrayGeometry geometry;
  SourceSpec source;
  std::vector<double> data;

  RirMatrix() = default;
  RirMatrix(std::size_t n_samples_, std::size_t n_mics_, double fs)
      : n_mics(n_mics_), n_samples(n_samples_), sample_rate(fs),
        data(n_mics_ * n_samples_, 0.0) {}

  double& at(std::size_t k, std::size_t i) { return data[k * n_mics + i]; }
  double at(std::size_t k, std::size_t i) const { return data[k * n_mics + i]; }

  std::vector<double> column(std::size_t i) const;
  void set_column(std::size_t i, std::span<const double> values);
  bool same_shape(const RirMatrix& other) const {
    return n_mics == other.n_mics && n_samples == other.n_samples;
  }
};

}  // namespace rirfill
