#include "rirfill/room_sim.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rirfill {

namespace {

constexpr double kPi = std::numbers::pi;

void require_inside(const RoomSpec& room, Vec3 p, const char* what) {
  if (!room.contains(p)) {
    std::ostringstream os;
    os << what << " (" << p.x << ", " << p.y << ", " << p.z
       << ") is not strictly inside the room";
    throw std::invalid_argument(os.str());
  }
}

// Adds amp * w(n - delay) * sinc(n - delay) for the 81 taps nearest `delay`.
// The window is a Hann of half-width 41 centred on the true delay, so the
// kernel is symmetric about it.
void add_fractional_impulse(std::vector<double>& out, double delay, double amp) {
  constexpr int half = kFracDelayTaps / 2;
  constexpr double window_half = half + 1.0;
  const long centre = std::lround(delay);
  const double frac = delay - static_cast<double>(centre);  // in [-0.5, 0.5]
  const long n_out = static_cast<long>(out.size());

  if (std::abs(frac) < 1e-12) {
    if (centre >= 0 && centre < n_out) out[centre] += amp;
    return;
  }

  // sin(pi (k - frac)) = (-1)^(k+1) sin(pi frac)
  const double s = std::sin(kPi * frac);
  // cos(pi (k - frac) / window_half) via a rotating phasor starting at k = -half
  const double step = kPi / window_half;
  std::complex<double> phasor = std::polar(1.0, step * (-half - frac));
  const std::complex<double> rot = std::polar(1.0, step);

  for (int k = -half; k <= half; ++k, phasor *= rot) {
    const long n = centre + k;
    if (n < 0 || n >= n_out) continue;
    const double x = k - frac;
    const double sign = (k % 2 == 0) ? -1.0 : 1.0;
    const double sinc = sign * s / (kPi * x);
    const double w = 0.5 * (1.0 + phasor.real());
    out[n] += amp * w * sinc;
  }
}

int image_range(double dim, double max_dist) {
  return static_cast<int>(std::ceil(max_dist / (2.0 * dim))) + 1;
}

}  // namespace

RoomSpec RoomSpec::uniform(std::array<double, 3> dims, double beta,
                           double sample_rate, double speed_of_sound) {
  RoomSpec r;
  r.dims = dims;
  r.reflection.fill(beta);
  r.sample_rate = sample_rate;
  r.speed_of_sound = speed_of_sound;
  return r;
}

void RoomSpec::validate() const {
  for (double d : dims)
    if (!(d > 0.0)) throw std::invalid_argument("room dimensions must be positive");
  for (double b : reflection)
    if (!(b >= 0.0 && b < 1.0))
      throw std::invalid_argument("reflection coefficients must lie in [0, 1)");
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample_rate must be positive");
  if (!(speed_of_sound > 0.0))
    throw std::invalid_argument("speed_of_sound must be positive");
}

bool RoomSpec::contains(Vec3 p) const {
  return p.x > 0.0 && p.x < dims[0] && p.y > 0.0 && p.y < dims[1] &&
         p.z > 0.0 && p.z < dims[2];
}

std::vector<double> RirMatrix::column(std::size_t i) const {
  std::vector<double> c(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) c[k] = at(k, i);
  return c;
}

void RirMatrix::set_column(std::size_t i, std::span<const double> values) {
  if (values.size() != n_samples)
    throw std::invalid_argument("set_column: length mismatch");
  for (std::size_t k = 0; k < n_samples; ++k) at(k, i) = values[k];
}

ArrayGeometry make_arc_array(int n_mics, double curvature, const RoomSpec& room) {
  if (n_mics < 2) throw std::invalid_argument("an array needs at least 2 microphones");
  if (!(curvature >= 0.0 && curvature <= 1.0))
    throw std::invalid_argument("curvature must lie in [0, 1]");
  room.validate();

  ArrayGeometry g;
  g.curvature = curvature;
  g.center = {room.dims[0] / 2.0, room.dims[1] / 2.0, kArrayHeight};
  std::ostringstream label;
  label << "arc_l" << curvature;
  g.label = label.str();

  g.positions.reserve(n_mics);
  for (int i = 0; i < n_mics; ++i) {
    const double u = static_cast<double>(i) / (n_mics - 1);
    const Vec3 lin{g.center.x - kArraySpan / 2.0 + kArraySpan * u, g.center.y,
                   g.center.z};
    const double theta = kPi * u;
    const Vec3 circ{g.center.x - kArcRadius * std::cos(theta),
                    g.center.y - kArcRadius * std::sin(theta), g.center.z};
    const Vec3 p = (1.0 - curvature) * lin + curvature * circ;
    require_inside(room, p, "microphone");
    g.positions.push_back(p);
  }
  return g;
}

std::vector<double> default_source_angles() {
  std::vector<double> a;
  for (int i = 0; i < 9; ++i) a.push_back(10.0 + 20.0 * i);
  return a;
}

SourceSpec make_source(const RoomSpec& room, const ArrayGeometry& array,
                       double angle_deg) {
  const double phi = angle_deg * kPi / 180.0;
  SourceSpec s;
  s.angle_deg = angle_deg;
  s.position = {array.center.x + kSourceRadius * std::cos(phi),
                array.center.y + kSourceRadius * std::sin(phi), array.center.z};
  require_inside(room, s.position, "source");
  return s;
}

std::vector<SourceSpec> make_source_positions(const RoomSpec& room,
                                              const ArrayGeometry& array) {
  std::vector<SourceSpec> out;
  for (double a : default_source_angles()) out.push_back(make_source(room, array, a));
  return out;
}

std::vector<double> simulate_rir(const RoomSpec& room, Vec3 source, Vec3 mic,
                                 int n_samples) {
  room.validate();
  if (n_samples <= 0) throw std::invalid_argument("n_samples must be positive");
  require_inside(room, source, "source");
  require_inside(room, mic, "microphone");
  if (distance(source, mic) < 1e-9)
    throw std::invalid_argument("source and microphone coincide");

  const double c = room.speed_of_sound;
  const double fs = room.sample_rate;
  // Images whose kernel can still reach the last sample.
  const double max_dist = c * (n_samples + kFracDelayTaps / 2 + 1) / fs;
  const std::array<double, 3> s{source.x, source.y, source.z};
  const std::array<double, 3> m{mic.x, mic.y, mic.z};
  const auto& L = room.dims;
  const auto& beta = room.reflection;

  std::vector<double> out(n_samples, 0.0);
  std::array<int, 3> range{};
  for (int a = 0; a < 3; ++a) range[a] = image_range(L[a], max_dist);

  // Per-axis image offsets and gains, indexed by (n, q).
  struct AxisImage {
    double offset;  // image coordinate minus mic coordinate
    double gain;
  };
  std::array<std::vector<AxisImage>, 3> axis;
  for (int a = 0; a < 3; ++a) {
    for (int n = -range[a]; n <= range[a]; ++n) {
      for (int q = 0; q <= 1; ++q) {
        const double coord = (1 - 2 * q) * s[a] + 2.0 * n * L[a];
        const double gain = std::pow(beta[2 * a], std::abs(n - q)) *
                            std::pow(beta[2 * a + 1], std::abs(n));
        axis[a].push_back({coord - m[a], gain});
      }
    }
  }

  const double max_d2 = max_dist * max_dist;
  for (const auto& ix : axis[0]) {
    if (ix.gain == 0.0) continue;
    const double dx2 = ix.offset * ix.offset;
    if (dx2 >= max_d2) continue;
    for (const auto& iy : axis[1]) {
      const double dxy2 = dx2 + iy.offset * iy.offset;
      if (dxy2 >= max_d2) continue;
      const double gxy = ix.gain * iy.gain;
      for (const auto& iz : axis[2]) {
        const double d2 = dxy2 + iz.offset * iz.offset;
        if (d2 >= max_d2) continue;
        const double gain = gxy * iz.gain;
        if (gain == 0.0) continue;
        const double d = std::sqrt(d2);
        add_fractional_impulse(out, d * fs / c, gain / (4.0 * kPi * d));
      }
    }
  }
  return out;
}

RirMatrix simulate_matrix(const RoomSpec& room, const SourceSpec& source,
                          const ArrayGeometry& array, int n_samples) {
  if (n_samples <= 0) throw std::invalid_argument("n_samples must be positive");
  RirMatrix h(static_cast<std::size_t>(n_samples), array.size(), room.sample_rate);
  h.geometry = array;
  h.source = source;
  for (std::size_t i = 0; i < array.size(); ++i) {
    const auto col = simulate_rir(room, source.position, array.positions[i], n_samples);
    h.set_column(i, col);
  }
  return h;
}

double reflection_coeff_for_t60(const RoomSpec& room, double target_t60) {
  if (!(target_t60 > 0.0)) throw std::invalid_argument("target T60 must be positive");
  const double alpha = 0.161 * room.volume() / (target_t60 * room.surface_area());
  if (alpha >= 1.0) {
    std::ostringstream os;
    os << "T60 of " << target_t60 << " s is too short for this room (alpha = "
       << alpha << " >= 1)";
    throw std::invalid_argument(os.str());
  }
  return std::sqrt(1.0 - alpha);
}

}  // namespace rirfill
