#pragma once

#include <vector>

namespace rirfill {

// Linear beta schedule. Steps are 1-based: beta(t), alpha(t) for t in [1, T];
// alpha_bar(t) for t in [0, T] with alpha_bar(0) = 1.
class NoiseSchedule {
 public:
  NoiseSchedule() = default;

  // beta_t linear from beta_start (t = 1) to beta_end (t = T).
  static NoiseSchedule linear(int steps, double beta_start, double beta_end);

  // The 1e-4 -> 0.02 range stretched by 1000 / steps, so that short chains
  // still end near pure noise. Identical to linear(1000, 1e-4, 0.02) at 1000.
  // The stretch is capped at 49.95 so that beta_end stays below 1.
  static NoiseSchedule scaled_linear(int steps);

  int steps() const { return static_cast<int>(beta_.size()); }
  double beta_start() const { return beta_.front(); }
  double beta_end() const { return beta_.back(); }

  double beta(int t) const;
  double alpha(int t) const { return 1.0 - beta(t); }
  double alpha_bar(int t) const;

  const std::vector<double>& betas() const { return beta_; }

 private:
  std::vector<double> beta_;
  std::vector<double> alpha_bar_;  // index t, alpha_bar_[0] = 1
};

}  // namespace rirfill
