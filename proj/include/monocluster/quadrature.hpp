#pragma once

#include <functional>
#include <vector>

namespace monocluster {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [a, b]; exact for polynomials of degree 2n-1.
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Composite Gauss-Legendre: `panels` equal panels on [a, b], n points each.
QuadratureRule composite_gauss_legendre(int n, int panels, double a, double b);

// Tensor-product integral of f over the unit cube [0,1]^dim with an n-point
// rule per axis. f receives the node coordinates.
double integrate_unit_cube(int dim, int n,
                           const std::function<double(const std::vector<double>&)>& f);

}  // namespace monocluster
