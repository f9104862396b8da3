#include "monocluster/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "monocluster/error.hpp"

namespace monocluster {

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw ConfigError("gauss_legendre: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double dx = p1 / (n * (x * p1 - p0) / (x * x - 1.0));
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(int n, int panels, double a, double b) {
  if (panels < 1) throw ConfigError("composite_gauss_legendre: panels must be positive");
  QuadratureRule rule;
  const double width = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    const QuadratureRule panel = gauss_legendre(n, a + k * width, a + (k + 1) * width);
    rule.nodes.insert(rule.nodes.end(), panel.nodes.begin(), panel.nodes.end());
    rule.weights.insert(rule.weights.end(), panel.weights.begin(), panel.weights.end());
  }
  return rule;
}

double integrate_unit_cube(int dim, int n,
                           const std::function<double(const std::vector<double>&)>& f) {
  if (dim == 0) return f({});
  const QuadratureRule rule = gauss_legendre(n, 0.0, 1.0);
  std::vector<int> index(dim, 0);
  std::vector<double> point(dim);
  double total = 0.0;
  while (true) {
    double weight = 1.0;
    for (int j = 0; j < dim; ++j) {
      point[j] = rule.nodes[index[j]];
      weight *= rule.weights[index[j]];
    }
    total += weight * f(point);
    int j = 0;
    while (j < dim && ++index[j] == n) index[j++] = 0;
    if (j == dim) break;
  }
  return total;
}

}  // namespace monocluster
