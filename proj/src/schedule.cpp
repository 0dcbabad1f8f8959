#include "rirfill/schedule.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace rirfill {

NoiseSchedule NoiseSchedule::linear(int steps, double beta_start, double beta_end) {
  if (steps < 1) throw std::invalid_argument("schedule needs at least one step");
  if (!(beta_start > 0.0 && beta_start < beta_end && beta_end < 1.0) &&
      !(steps == 1 && beta_start > 0.0 && beta_start < 1.0))
    throw std::invalid_argument("schedule requires 0 < beta_start < beta_end < 1");
  NoiseSchedule s;
  s.beta_.resize(steps);
  for (int i = 0; i < steps; ++i) {
    const double u = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
    s.beta_[i] = beta_start + (beta_end - beta_start) * u;
  }
  s.alpha_bar_.resize(steps + 1);
  s.alpha_bar_[0] = 1.0;
  for (int t = 1; t <= steps; ++t) s.alpha_bar_[t] = s.alpha_bar_[t - 1] * (1.0 - s.beta_[t - 1]);
  return s;
}

NoiseSchedule NoiseSchedule::scaled_linear(int steps) {
  if (steps < 1) throw std::invalid_argument("schedule needs at least one step");
  // Below 50 steps the stretch would push beta_end to 1 or beyond.
  const double scale = std::min(1000.0 / steps, 49.95);
  return linear(steps, scale * 1e-4, scale * 0.02);
}

double NoiseSchedule::beta(int t) const {
  if (t < 1 || t > steps())
    throw std::out_of_range("diffusion step " + std::to_string(t) + " outside [1, T]");
  return beta_[t - 1];
}

double NoiseSchedule::alpha_bar(int t) const {
  if (t < 0 || t > steps())
    throw std::out_of_range("diffusion step " + std::to_string(t) + " outside [0, T]");
  return alpha_bar_[t];
}

}  // namespace rirfill
