#pragma once

// Independent reference implementations used only by the tests.

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Second derivatives of the natural cubic spline through (x, y), written the
// textbook way: decomposition sweep with the u[] scratch array, then back
// substitution.
inline std::vector<double> textbook_second_derivs(const std::vector<double>& x,
                                                  const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> y2(n, 0.0), u(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
    const double p = sig * y2[i - 1] + 2.0;
    y2[i] = (sig - 1.0) / p;
    u[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]) - (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
    u[i] = (6.0 * u[i] / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / p;
  }
  y2[n - 1] = 0.0;
  for (std::size_t k = n - 1; k-- > 0;) y2[k] = y2[k] * y2[k + 1] + u[k];
  return y2;
}

// Evaluation in the a/b-weight form; beyond the end knots, the straight line
// with the end slope.
inline double spline_eval(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& y2, double q) {
  const std::size_t n = x.size();
  if (q < x[0]) {
    const double h = x[1] - x[0];
    const double d = (y[1] - y[0]) / h - h * (2.0 * y2[0] + y2[1]) / 6.0;
    return y[0] + d * (q - x[0]);
  }
  if (q > x[n - 1]) {
    const double h = x[n - 1] - x[n - 2];
    const double d = (y[n - 1] - y[n - 2]) / h + h * (y2[n - 2] + 2.0 * y2[n - 1]) / 6.0;
    return y[n - 1] + d * (q - x[n - 1]);
  }
  std::size_t lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const std::size_t k = (hi + lo) / 2;
    if (x[k] > q)
      hi = k;
    else
      lo = k;
  }
  const double h = x[hi] - x[lo];
  const double a = (x[hi] - q) / h;
  const double b = (q - x[lo]) / h;
  return a * y[lo] + b * y[hi] +
         ((a * a * a - a) * y2[lo] + (b * b * b - b) * y2[hi]) * (h * h) / 6.0;
}

// Same spline from the full n x n system (end rows m = 0) solved densely.
inline std::vector<double> dense_second_derivs(const std::vector<double>& x,
                                               const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  A(0, 0) = 1.0;
  A(n - 1, n - 1) = 1.0;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
    A(i, i - 1) = h0 / 6.0;
    A(i, i) = (h0 + h1) / 3.0;
    A(i, i + 1) = h1 / 6.0;
    b(i) = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
  }
  const Eigen::VectorXd m = A.fullPivLu().solve(b);
  return {m.data(), m.data() + n};
}

// Energy of the direct pulse expected in free field: (1 / (4 pi d))^2.
inline double free_field_energy(double d) {
  const double a = 1.0 / (4.0 * M_PI * d);
  return a * a;
}

}  // namespace oracle
