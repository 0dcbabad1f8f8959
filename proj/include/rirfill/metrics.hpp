#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rirfill/types.hpp"

namespace rirfill {

// Reported in place of a finite NMSE when the estimate is exact.
inline constexpr double kExactNmseDb = -std::numeric_limits<double>::infinity();

// 10 log10 of the mean over `mics` of |est_i - h_i|^2 / |h_i|^2. Throws
// std::invalid_argument if any listed truth column has zero energy.
double nmse_db(const RirMatrix& truth, const RirMatrix& estimate,
               std::span<const std::size_t> mics);

// Mean over `mics` of 1 - (h_i . est_i)^2 / (|h_i|^2 |est_i|^2), in [0, 1].
// Throws std::invalid_argument on a zero-norm truth or estimate column.
double cosine_distance(const RirMatrix& truth, const RirMatrix& estimate,
                       std::span<const std::size_t> mics);

// Per-column forms of the two measures.
double column_nmse_ratio(std::span<const double> truth, std::span<const double> estimate);
double column_cosine_distance(std::span<const double> truth, std::span<const double> estimate);

// Schroeder backward integral in dB, normalised to 0 dB at n = 0. Samples
// after the last nonzero one are -inf. Throws on an all-zero response.
std::vector<double> edc_db(std::span<const double> h);

// T60 from a least-squares line through the EDC between -5 and -35 dB,
// extrapolated to 60 dB of decay. Throws std::domain_error if the curve never
// reaches -35 dB.
double t60_from_edc(std::span<const double> edc, double sample_rate);

struct EvalKey {
  double curvature = 0.0;
  double angle_deg = 0.0;
  double mask_ratio = 0.0;
  std::uint64_t seed = 0;
  std::string method;
};

struct MicScore {
  std::size_t mic = 0;
  double nmse_db = 0.0;
  double cd = 0.0;
  std::optional<std::string> error;
};

struct EvalReport {
  EvalKey key;
  double nmse_db = 0.0;  // over the mics without an error; kExactNmseDb if exact
  double cd = 0.0;
  std::vector<MicScore> per_mic;  // one entry per missing microphone
  std::optional<std::string> error;

  bool ok() const { return !error.has_value(); }
};

// Scores `estimate` against `truth` over the missing set of `mask`. Columns
// with undefined measures get a per-mic error and are left out of the means.
// With an empty missing set both means are the exact-reconstruction values.
EvalReport evaluate(const RirMatrix& truth, const RirMatrix& estimate,
                    std::span<const std::size_t> missing, EvalKey key = {});

}  // namespace rirfill
