#pragma once

#include <vector>

#include "rirfill/types.hpp"

namespace rirfill {

// Fixed layout conventions for the arc arrays.
inline constexpr double kArraySpan = 3.0;        // ULA length, meters
inline constexpr double kArcRadius = 1.5;        // semi-circle radius, meters
inline constexpr double kArrayHeight = 1.4;      // array and source height
inline constexpr double kSourceRadius = 2.0;     // source distance from center
inline constexpr int kFracDelayTaps = 81;        // Hann-windowed sinc length

// Microphones on an arc between a uniform linear array (curvature 0) and a
// semi-circle of radius 1.5 m (curvature 1). Both layouts share endpoints and
// the array center; intermediate curvatures interpolate each position
// linearly. The linear array runs along +x; the arc bulges towards -y.
ArrayGeometry make_arc_array(int n_mics, double curvature, const RoomSpec& room);

// The nine source angles used throughout: 10, 30, ..., 170 degrees.
std::vector<double> default_source_angles();

// Source on the radius-2 m semi-circle around the array center, at `angle_deg`
// from the array axis (+x); 90 degrees is broadside (+y).
SourceSpec make_source(const RoomSpec& room, const ArrayGeometry& array,
                       double angle_deg);
std::vector<SourceSpec> make_source_positions(const RoomSpec& room,
                                              const ArrayGeometry& array);

// Image-source response of length n_samples. Each image contributes
// prod(beta^reflections) / (4 pi d) at fractional delay d * fs / c, rendered
// with an 81-tap Hann-windowed sinc centred on the true delay. Every image
// whose kernel overlaps [0, n_samples) is included.
std::vector<double> simulate_rir(const RoomSpec& room, Vec3 source, Vec3 mic,
                                 int n_samples);

RirMatrix simulate_matrix(const RoomSpec& room, const SourceSpec& source,
                          const ArrayGeometry& array, int n_samples);

// Uniform wall reflection coefficient for a target reverberation time via
// inverse Sabine: alpha = 0.161 V / (T60 S), beta = sqrt(1 - alpha).
double reflection_coeff_for_t60(const RoomSpec& room, double target_t60);

}  // namespace rirfill
