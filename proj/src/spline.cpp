#include "propopt/spline.hpp"

#include <algorithm>
#include <cmath>

#include "propopt/errors.hpp"

namespace propopt {

std::vector<double> natural_spline_moments(std::span<const double> x,
                                           std::span<const double> values,
                                           std::size_t ncol) {
  const std::size_t n = x.size();
  std::vector<double> m(n * ncol, 0.0);
  if (n < 3) return m;

  // Thomas algorithm on the interior knots; natural ends have m = 0.
  const std::size_t ni = n - 2;
  std::vector<double> diag(ni), upper(ni), rhs(ni * ncol);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x[i] - x[i - 1];
    const double h1 = x[i + 1] - x[i];
    diag[i - 1] = 2.0 * (h0 + h1);
    upper[i - 1] = h1;
    for (std::size_t j = 0; j < ncol; ++j) {
      const double s1 = (values[(i + 1) * ncol + j] - values[i * ncol + j]) / h1;
      const double s0 = (values[i * ncol + j] - values[(i - 1) * ncol + j]) / h0;
      rhs[(i - 1) * ncol + j] = 6.0 * (s1 - s0);
    }
  }
  // lower[i] == upper[i-1] == h_i (symmetric system)
  for (std::size_t i = 1; i < ni; ++i) {
    const double w = upper[i - 1] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    for (std::size_t j = 0; j < ncol; ++j) rhs[i * ncol + j] -= w * rhs[(i - 1) * ncol + j];
  }
  for (std::size_t j = 0; j < ncol; ++j) {
    m[(ni)*ncol + j] = rhs[(ni - 1) * ncol + j] / diag[ni - 1];
  }
  for (std::size_t i = ni - 1; i-- > 0;) {
    for (std::size_t j = 0; j < ncol; ++j) {
      m[(i + 1) * ncol + j] =
          (rhs[i * ncol + j] - upper[i] * m[(i + 2) * ncol + j]) / diag[i];
    }
  }
  return m;
}

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
  if (x_.size() != y_.size() || x_.size() < 2) {
    throw InvalidInput("cubic spline needs at least two knots with matching values");
  }
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (!(x_[i] > x_[i - 1])) throw InvalidInput("cubic spline knots must be strictly increasing");
  }
  m_ = natural_spline_moments(x_, y_, 1);
}

std::size_t CubicSpline::interval(double x) const {
  auto it = std::upper_bound(x_.begin() + 1, x_.end() - 1, x);
  return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double CubicSpline::operator()(double x) const {
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double x) const {
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h +
         (-(3.0 * a * a - 1.0) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
}

double CubicSpline::second_derivative(double x) const {
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  return a * m_[i] + b * m_[i + 1];
}

}  // namespace propopt
