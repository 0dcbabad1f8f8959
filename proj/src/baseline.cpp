#include "rirfill/baseline.hpp"

#include <algorithm>
#include <stdexcept>

namespace rirfill {

NaturalSpline::NaturalSpline(std::vector<double> knots, std::vector<double> queries)
    : x_(std::move(knots)), q_(std::move(queries)) {
  const std::size_t n = x_.size();
  if (n < 2) throw std::invalid_argument("spline needs at least two knots");
  for (std::size_t j = 1; j < n; ++j)
    if (!(x_[j] > x_[j - 1])) throw std::invalid_argument("spline knots must be increasing");

  h_.resize(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) h_[j] = x_[j + 1] - x_[j];

  lookup_.resize(q_.size());
  for (std::size_t k = 0; k < q_.size(); ++k) {
    const auto it = std::upper_bound(x_.begin(), x_.end(), q_[k]);
    std::size_t seg = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    seg = std::min(seg, n - 2);
    lookup_[k] = {seg, q_[k] - x_[seg]};
  }

  // Second derivatives m_1..m_{n-2} solve
  //   h_{j-1} m_{j-1} + 2 (h_{j-1} + h_j) m_j + h_j m_{j+1} = 6 (d_j - d_{j-1})
  // with m_0 = m_{n-1} = 0. Forward elimination depends only on the knots.
  if (n > 2) {
    const std::size_t m = n - 2;
    diag_.resize(m);
    lower_.resize(m, 0.0);
    diag_[0] = 2.0 * (h_[0] + h_[1]);
    for (std::size_t r = 1; r < m; ++r) {
      lower_[r] = h_[r] / diag_[r - 1];
      diag_[r] = 2.0 * (h_[r] + h_[r + 1]) - lower_[r] * h_[r];
    }
  }
}

void NaturalSpline::evaluate(std::span<const double> y, std::span<double> out) const {
  const std::size_t n = x_.size();
  if (y.size() != n || out.size() != q_.size())
    throw std::invalid_argument("spline: value or output size mismatch");

  if (n == 3) {
    // A natural spline through three points is not a parabola; the quadratic
    // is used instead so that three knots still capture curvature.
    for (std::size_t k = 0; k < q_.size(); ++k) {
      const double q = q_[k];
      double s = 0.0;
      for (std::size_t a = 0; a < 3; ++a) {
        double l = 1.0;
        for (std::size_t b = 0; b < 3; ++b)
          if (b != a) l *= (q - x_[b]) / (x_[a] - x_[b]);
        s += l * y[a];
      }
      out[k] = s;
    }
    return;
  }

  std::vector<double> m(n, 0.0);
  if (n > 2) {
    const std::size_t inner = n - 2;
    std::vector<double> rhs(inner);
    for (std::size_t r = 0; r < inner; ++r)
      rhs[r] = 6.0 * ((y[r + 2] - y[r + 1]) / h_[r + 1] - (y[r + 1] - y[r]) / h_[r]);
    for (std::size_t r = 1; r < inner; ++r) rhs[r] -= lower_[r] * rhs[r - 1];
    m[inner] = rhs[inner - 1] / diag_[inner - 1];
    for (std::size_t r = inner - 1; r-- > 0;)
      m[r + 1] = (rhs[r] - h_[r + 1] * m[r + 2]) / diag_[r];
  }

  for (std::size_t k = 0; k < q_.size(); ++k) {
    const auto [j, t] = lookup_[k];
    const double h = h_[j];
    const double slope = (y[j + 1] - y[j]) / h - h * (2.0 * m[j] + m[j + 1]) / 6.0;
    if (t < 0.0) {
      out[k] = y[j] + slope * t;
    } else if (t > h) {
      const double end_slope = (y[j + 1] - y[j]) / h + h * (m[j] + 2.0 * m[j + 1]) / 6.0;
      out[k] = y[j + 1] + end_slope * (t - h);
    } else {
      out[k] = y[j] + t * (slope + t * (m[j] / 2.0 + t * (m[j + 1] - m[j]) / (6.0 * h)));
    }
  }
}

std::vector<double> NaturalSpline::evaluate(std::span<const double> values) const {
  std::vector<double> out(q_.size());
  evaluate(values, out);
  return out;
}

RirMatrix sci_interpolate(const RirMatrix& matrix, const Mask& mask) {
  if (mask.size() != matrix.n_mics)
    throw std::invalid_argument("sci: mask size does not match microphone count");
  const auto known = mask.measured_indices();
  const auto missing = mask.missing_indices();
  if (known.size() < 2) throw std::invalid_argument("sci: needs at least two measured columns");

  RirMatrix out = matrix;
  if (missing.empty()) return out;

  const NaturalSpline spline(std::vector<double>(known.begin(), known.end()),
                             std::vector<double>(missing.begin(), missing.end()));
  std::vector<double> y(known.size()), est(missing.size());
  for (std::size_t k = 0; k < matrix.n_samples; ++k) {
    for (std::size_t j = 0; j < known.size(); ++j) y[j] = matrix.at(k, known[j]);
    spline.evaluate(y, est);
    for (std::size_t j = 0; j < missing.size(); ++j) out.at(k, missing[j]) = est[j];
  }
  return out;
}

}  // namespace rirfill
