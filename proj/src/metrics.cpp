#include "rirfill/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rirfill {

namespace {

void check_pair(const RirMatrix& truth, const RirMatrix& estimate,
                std::span<const std::size_t> mics) {
  if (!truth.same_shape(estimate)) throw std::invalid_argument("metrics: shape mismatch");
  for (auto i : mics)
    if (i >= truth.n_mics) throw std::out_of_range("metrics: microphone index out of range");
}

}  // namespace

double column_nmse_ratio(std::span<const double> truth, std::span<const double> estimate) {
  if (truth.size() != estimate.size()) throw std::invalid_argument("nmse: length mismatch");
  double err = 0.0, energy = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const double d = estimate[k] - truth[k];
    err += d * d;
    energy += truth[k] * truth[k];
  }
  if (energy == 0.0) throw std::invalid_argument("nmse: truth column has zero energy");
  return err / energy;
}

double column_cosine_distance(std::span<const double> truth, std::span<const double> estimate) {
  if (truth.size() != estimate.size()) throw std::invalid_argument("cd: length mismatch");
  double dot = 0.0, tt = 0.0, ee = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    dot += truth[k] * estimate[k];
    tt += truth[k] * truth[k];
    ee += estimate[k] * estimate[k];
  }
  if (tt == 0.0) throw std::invalid_argument("cd: truth column has zero norm");
  if (ee == 0.0) throw std::invalid_argument("cd: estimate column has zero norm");
  const double c2 = (dot / tt) * (dot / ee);
  return std::clamp(1.0 - c2, 0.0, 1.0);
}

double nmse_db(const RirMatrix& truth, const RirMatrix& estimate,
               std::span<const std::size_t> mics) {
  check_pair(truth, estimate, mics);
  if (mics.empty()) return kExactNmseDb;
  double sum = 0.0;
  for (auto i : mics) sum += column_nmse_ratio(truth.column(i), estimate.column(i));
  const double mean = sum / static_cast<double>(mics.size());
  return mean == 0.0 ? kExactNmseDb : 10.0 * std::log10(mean);
}

double cosine_distance(const RirMatrix& truth, const RirMatrix& estimate,
                       std::span<const std::size_t> mics) {
  check_pair(truth, estimate, mics);
  if (mics.empty()) return 0.0;
  double sum = 0.0;
  for (auto i : mics) sum += column_cosine_distance(truth.column(i), estimate.column(i));
  return sum / static_cast<double>(mics.size());
}

std::vector<double> edc_db(std::span<const double> h) {
  std::vector<double> tail(h.size());
  double acc = 0.0;
  for (std::size_t n = h.size(); n-- > 0;) {
    acc += h[n] * h[n];
    tail[n] = acc;
  }
  if (h.empty() || acc == 0.0) throw std::invalid_argument("edc: response is all zero");
  for (auto& v : tail)
    v = v > 0.0 ? 10.0 * std::log10(v / acc) : -std::numeric_limits<double>::infinity();
  tail[0] = 0.0;
  return tail;
}

double t60_from_edc(std::span<const double> edc, double sample_rate) {
  if (!(sample_rate > 0.0)) throw std::invalid_argument("t60: sample rate must be positive");
  const auto first = std::find_if(edc.begin(), edc.end(), [](double v) { return v <= -5.0; });
  const auto past = std::find_if(edc.begin(), edc.end(), [](double v) { return v < -35.0; });
  if (past == edc.end()) throw std::domain_error("t60: decay curve never reaches -35 dB");

  double sn = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (auto it = first; it != past; ++it) {
    const double x = static_cast<double>(it - edc.begin());
    const double y = *it;
    sn += 1.0;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  if (sn < 2.0) throw std::domain_error("t60: too few samples in the -5..-35 dB range");
  const double slope = (sn * sxy - sx * sy) / (sn * sxx - sx * sx);
  if (!(slope < 0.0)) throw std::domain_error("t60: decay slope is not negative");
  return -60.0 / slope / sample_rate;
}

EvalReport evaluate(const RirMatrix& truth, const RirMatrix& estimate,
                    std::span<const std::size_t> missing, EvalKey key) {
  EvalReport report;
  report.key = std::move(key);
  try {
    check_pair(truth, estimate, missing);
  } catch (const std::exception& e) {
    report.error = e.what();
    return report;
  }

  double nmse_sum = 0.0, cd_sum = 0.0;
  std::size_t nmse_n = 0, cd_n = 0;
  for (auto i : missing) {
    MicScore s;
    s.mic = i;
    const auto t = truth.column(i);
    const auto e = estimate.column(i);
    try {
      const double r = column_nmse_ratio(t, e);
      s.nmse_db = r == 0.0 ? kExactNmseDb : 10.0 * std::log10(r);
      nmse_sum += r;
      ++nmse_n;
      s.cd = column_cosine_distance(t, e);
      cd_sum += s.cd;
      ++cd_n;
    } catch (const std::exception& ex) {
      s.error = ex.what();
    }
    report.per_mic.push_back(std::move(s));
  }

  if (!missing.empty() && (nmse_n == 0 || cd_n == 0)) {
    report.error = "no microphone with a defined score";
    return report;
  }
  const double mean = nmse_n ? nmse_sum / static_cast<double>(nmse_n) : 0.0;
  report.nmse_db = mean == 0.0 ? kExactNmseDb : 10.0 * std::log10(mean);
  report.cd = cd_n ? cd_sum / static_cast<double>(cd_n) : 0.0;
  return report;
}

}  // namespace rirfill
