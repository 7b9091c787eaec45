#pragma once

#include <span>
#include <vector>

namespace propopt {

/// Natural cubic spline y(x) through strictly increasing knots.
///
/// The spline is linear in the data values, so splining derivative samples
/// gives the derivative of the splined samples. Two knots degenerate to the
/// straight line, which is what a natural spline reduces to.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::span<const double> x, std::span<const double> y);

  double operator()(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  std::span<const double> knots() const { return x_; }
  std::span<const double> values() const { return y_; }
  bool empty() const { return x_.empty(); }

 private:
  std::size_t interval(double x) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at knots
};

/// Solve the natural-spline second-derivative system for several value
/// columns sharing one knot vector. `values` is knot-major: values[k*ncol+j].
/// Returns the second derivatives in the same layout.
std::vector<double> natural_spline_moments(std::span<const double> x,
                                           std::span<const double> values,
                                           std::size_t ncol);

}  // namespace propopt
