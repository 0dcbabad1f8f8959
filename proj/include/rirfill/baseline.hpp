#pragma once

#include <span>
#include <vector>

#include "rirfill/imaging.hpp"
#include "rirfill/types.hpp"

namespace rirfill {

// Natural cubic spline through fixed knots, evaluated at fixed query points.
// The knot layout is factorised once; each call to `evaluate` is then a
// tridiagonal back-substitution for one set of knot values. Outside the knot
// range the spline continues as a straight line (zero curvature at the ends).
// Two knots give the straight line through them, three the parabola.
class NaturalSpline {
 public:
  NaturalSpline(std::vector<double> knots, std::vector<double> queries);

  void evaluate(std::span<const double> values, std::span<double> out) const;
  std::vector<double> evaluate(std::span<const double> values) const;

  std::size_t n_knots() const { return x_.size(); }
  std::size_t n_queries() const { return q_.size(); }

 private:
  struct Lookup {
    std::size_t seg = 0;  // left knot of the containing interval
    double t = 0.0;       // offset from that knot
  };

  std::vector<double> x_;
  std::vector<double> q_;
  std::vector<Lookup> lookup_;
  std::vector<double> h_;
  std::vector<double> diag_;   // eliminated diagonal of the interior system
  std::vector<double> lower_;  // elimination multipliers
};

// Spline cubic interpolation over microphone index, independently for every
// time sample. Measured columns are copied unchanged. Throws
// std::invalid_argument with fewer than two measured columns.
RirMatrix sci_interpolate(const RirMatrix& matrix, const Mask& mask);

}  // namespace rirfill
