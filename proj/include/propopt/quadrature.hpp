#pragma once

#include <vector>

namespace propopt {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss–Legendre rule with n points on [a, b]. Exact for polynomials of
/// degree <= 2n-1.
GaussRule gauss_legendre(int n, double a = 0.0, double b = 1.0);

/// Tensor Gauss–Legendre sum over [0,1]^2: sum_ij w_i w_j f(u_i, v_j).
template <typename F>
double tensor_integrate(int n_u, int n_v, F&& f) {
  const GaussRule ru = gauss_legendre(n_u);
  const GaussRule rv = gauss_legendre(n_v);
  double sum = 0.0;
  for (std::size_t j = 0; j < rv.nodes.size(); ++j) {
    double row = 0.0;
    for (std::size_t i = 0; i < ru.nodes.size(); ++i) row += ru.weights[i] * f(ru.nodes[i], rv.nodes[j]);
    sum += rv.weights[j] * row;
  }
  return sum;
}

}  // namespace propopt
